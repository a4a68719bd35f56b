import pytest

from fipsynth.arena import Arena, build
from fipsynth.fip import WinningCondition, coalition
from fipsynth.oracle import (PLAYER_LOSES, PLAYER_WINS, DepthExceeded, TooLarge, all_histories, brute_h,
                             brute_indist, brute_solve, class_image_violations, equivalence_violations,
                             exists_consistent_strategy, feasible_histories, game_tree_reach, image_relation,
                             info_tree, rectangularity_violations, verify_strategy, zig_zag_violations)
from fipsynth.strategy import constant_strategy

from conftest import normalized, game

ZERO = coalition(0)


def test_history_counts():
    n = normalized("peek")
    assert [len(hs) for hs in feasible_histories(n, 3)] == [1, 3, 9, 27]
    assert [len(hs) for hs in all_histories("ab", 2)] == [1, 2, 4]
    # sync-reach has two feasible profiles per move
    assert len(feasible_histories(normalized("sync-reach"), 5)[5]) == 486


def test_partition_of_empty_history(peek_n):
    assert brute_indist(peek_n, ZERO, 0) == [[((),)]]


def test_peek_partition_sizes(peek_n):
    part = brute_indist(peek_n, ZERO, 3)
    assert [len(p) for p in part] == [1, 2, 5, 14]
    quiet = [cls for cls in part[3] if all(("c", "c") not in h for h in cls)]
    assert len(quiet) == 1 and len(quiet[0]) == 8
    # every partition covers the feasible histories exactly once
    hist = feasible_histories(peek_n, 3)
    for t in range(4):
        assert sorted(h for cls in part[t] for h in cls) == sorted(hist[t])


def test_full_coalition_partition_is_discrete(peek_n):
    part = brute_indist(peek_n, coalition(0, 1), 3)
    assert all(len(cls) == 1 for p in part for cls in p)


def test_depth_limits(peek_n):
    with pytest.raises(DepthExceeded):
        brute_indist(peek_n, ZERO, 7)
    with pytest.raises(DepthExceeded):
        brute_h(peek_n, 6)


def test_knowledge_by_definition(peek_n):
    h = brute_h(peek_n, 3)
    assert len(h[()][ZERO]) == 1
    assert len(h[(("-", "a"),)][ZERO]) == 2
    assert len(h[(("-", "a"), ("c", "c"))][ZERO]) == 1
    assert h[(("-", "a"),)] is not h[(("-", "b"),)]
    assert h[(("-", "a"),)][ZERO] is h[(("-", "b"),)][ZERO]


def test_image_checks_on_peek(peek_n):
    h = brute_h(peek_n, 3)
    part = brute_indist(peek_n, ZERO, 3)
    assert rectangularity_violations(h, part) == []
    assert class_image_violations(h, part) == []
    rels = image_relation(h, part)
    assert len(rels) == 4 and all(equivalence_violations(r) == [] for r in rels)


def test_equivalence_violations_flags_bad_relations():
    assert equivalence_violations({(1, 1), (2, 2), (1, 2), (2, 1)}) == []
    assert equivalence_violations({(1, 1), (2, 2), (1, 2)})
    assert equivalence_violations({(1, 2), (2, 1)})


def test_peek_branching(peek_n):
    tree = info_tree(peek_n, 4)
    t, i = tree.class_of((("-", "a"),) * 3)
    assert len(tree.classes[t][i]) == 8
    succ = tree.successors(t, i)
    assert len(succ) == 9
    sizes = sorted(len(tree.classes[4][j]) for j in succ)
    # one merged continuation and eight revealed singletons
    assert sizes == [1] * 8 + [16]


def test_info_tree_colors_and_leaves(peek_n):
    tree = info_tree(peek_n, 2)
    assert tree.colors[0] == [None]
    assert tree.edges[2] == {}
    assert tree.successors(2, 0) == set()
    with pytest.raises(KeyError):
        tree.class_of((("c", "c"),) * 5)


def test_zig_zag_on_peek(peek_n):
    assert zig_zag_violations(peek_n, build(peek_n), info_tree(peek_n, 4)) == []


def test_zig_zag_detects_wrong_arena(peek_n):
    a = build(peek_n)
    # drop every edge except the first successor of each action
    broken = Arena(a.actions, a.colors, [{act: succ[:1] for act, succ in row.items()} for row in a.edges],
                   a.initial, a.keys, a.witnesses)
    assert zig_zag_violations(peek_n, broken, info_tree(peek_n, 3))


def test_brute_solve_single_node():
    loop = Arena(["go"], ["c"], [{"go": [0]}])
    assert brute_solve(loop, WinningCondition.reachability(["c"])) == PLAYER_WINS
    assert brute_solve(loop, WinningCondition.reachability(["d"])) == PLAYER_LOSES
    assert game_tree_reach(loop, ["c"]) == PLAYER_WINS
    assert game_tree_reach(loop, ["d"]) == PLAYER_LOSES


def test_brute_solve_size_limit():
    ring = Arena(["go"], ["c"] * 11, [{"go": [(v + 1) % 11]} for v in range(11)])
    with pytest.raises(TooLarge):
        brute_solve(ring, WinningCondition.reachability(["c"]))
    assert game_tree_reach(ring, ["c"]) == PLAYER_WINS


def test_verify_trivial_game():
    g = game("peek")
    # the observer learns the letter only when player 0 plays y; constant x never reveals it
    assert not verify_strategy(g, constant_strategy(g.moves, "x"), 4).ok
    v = verify_strategy(g, constant_strategy(g.moves, "y"), 4)
    assert v.ok, v


def test_inconsistent_strategy_is_reported():
    from fipsynth.automata import Alphabet, MealyMachine, SemiAutomaton
    from fipsynth.strategy import Strategy

    g = game("sync-reach")
    # reads the secret bit that player 0 cannot observe
    outs = [["guessA" if str(c).endswith("0") else "guessB" for c in g.moves]]
    s = Strategy(MealyMachine(SemiAutomaton(Alphabet(g.moves), [[0] * len(g.moves)]), outs), "wait")
    v = verify_strategy(g, s, 2)
    assert not v.ok and v.reason == "strategy is not information consistent"
    h1, h2 = v.counterexample
    assert s.decide(h1) != s.decide(h2)


@pytest.mark.parametrize("name,expected", [("sync-reach", True), ("nosync-reach", False)])
def test_strategy_existence(name, expected):
    assert exists_consistent_strategy(game(name), 6) is expected


def test_strategy_existence_rejects_parity():
    with pytest.raises(ValueError):
        exists_consistent_strategy(game("chain"), 3)
