"""Acceptance criteria 1 to 9.

Each test carries a ``criterion`` marker; the run ends with one PASS/FAIL
line per criterion (see the summary hook in conftest.py).
"""

import time

import pytest

from fipsynth.arena import build
from fipsynth.automata import coreachable
from fipsynth.cli import main
from fipsynth.fip import WinningCondition, coalition, indistinguishable
from fipsynth.io import read_json, strategy_from_json
from fipsynth.knowledge import intern, lift
from fipsynth.oracle import (PLAYER_WINS, all_histories, brute_h, brute_indist, brute_solve,
                             class_image_violations, equivalence_violations, exists_consistent_strategy,
                             feasible_histories, game_tree_reach, image_relation, info_tree, lift_population,
                             lift_violations, morphism_mismatches, partition_by_signature,
                             rectangularity_violations, verify_strategy, zig_zag_violations)
from fipsynth.solve import solve_parity, solve_reachability
from fipsynth.twotape import fip_to_2dfa, is_indist_relation, relation_accepts, relation_equivalent

from conftest import GAME_FIXTURES, KNOWLEDGE_FIXTURES, fixture_path, game, normalized, relation
from test_knowledge import FULL3, P0, P01, P02, Q2, Q3, s, three_player_example, v01, v02
from test_solve import PRIORITIES, random_population, with_initial

ZERO = coalition(0)
criterion = pytest.mark.criterion


# -- 1: the one-move update reproduces the knowledge function ----------------------

@criterion(1, "knowledge update equals the definition on all feasible histories to depth 5")
def test_criterion_1_morphism_depth_5():
    start = time.perf_counter()
    for name in KNOWLEDGE_FIXTURES:
        assert morphism_mismatches(normalized(name), 5) == [], name
    assert time.perf_counter() - start < 120


# -- 2: algebraic identities to depth 4 --------------------------------------------

@criterion(2, "rectangularity, image equivalence, class image and lift laws at depth 4")
@pytest.mark.parametrize("name", KNOWLEDGE_FIXTURES)
def test_criterion_2_algebraic_identities(name):
    n = normalized(name)
    hist = feasible_histories(n, 4)
    h = brute_h(n, 4, histories=hist)
    u = n.knowledge().universe
    for J in u.coalitions:
        if J == u.full:
            continue
        part = brute_indist(n, J, 4, histories=hist)
        assert rectangularity_violations(h, part) == []
        assert class_image_violations(h, part) == []
        assert all(equivalence_violations(rel) == [] for rel in image_relation(h, part))
    values = lift_population(h.values())
    assert lift_violations(n.num_players, values) == {"identity": 0, "renaming": 0, "compositionality": 0}


# -- 3: worked lift example -------------------------------------------------------

@criterion(3, "three-player lift example after talking to player 1 and to player 2")
def test_criterion_3_lift_example():
    p = three_player_example()
    assert lift(0b010, P0, p[P01], 3) is intern(P0, {(v01(s(Q3)), v02(s(Q3)), s(Q3))})
    assert lift(0b100, P0, p[P02], 3) is intern(P0, {
        (v01(s(Q2)), v02(s(Q2), s(Q3)), s(Q2)),
        (v01(s(Q3)), v02(s(Q2), s(Q3)), s(Q3)),
    })
    assert p[FULL3] is s(Q3)


# -- 4: two-tape relation agrees with the view graphs -----------------------------

def related_words(r, x, live):
    """Every ``y`` with ``(x, y)`` accepted, by a walk pruned at dead states."""
    table = r.dfa.base.table
    found = []

    def walk(q, i, y):
        if i == len(x):
            if q in r.dfa.accepting:
                found.append(tuple(y))
            return
        for c in r.moves:
            nxt = table[q][r.letter(x[i], c)]
            if nxt in live:
                y.append(c)
                walk(nxt, i + 1, y)
                y.pop()

    if r.dfa.base.initial in live:
        walk(r.dfa.base.initial, 0, [])
    return sorted(found)


@criterion(4, "two-tape relation equals player-0 indistinguishability up to length 6")
@pytest.mark.parametrize("name", GAME_FIXTURES)
def test_criterion_4_relation_matches_view_graphs(name):
    g = game(name)
    r = fip_to_2dfa(g)
    live = coreachable(r.dfa)
    hists = all_histories(g.moves, 6)
    # literal pairwise comparison while it is cheap
    for hs in hists[:4]:
        for x in hs:
            for y in hs:
                assert relation_accepts(r, x, y) == indistinguishable(g, ZERO, x, y), (x, y)
    # every length: the related set of each history is exactly its information set
    for hs in hists:
        for cls in partition_by_signature(g, ZERO, hs):
            assert all(indistinguishable(g, ZERO, cls[0], y) for y in cls[1:])
            for x in cls:
                assert related_words(r, x, live) == list(cls), x


@criterion(4, "two-tape relation equals player-0 indistinguishability up to length 6")
def test_criterion_4_peek_matches_completed_relation():
    ok, witness = relation_equivalent(fip_to_2dfa(game("peek")), relation("fig5c"))
    assert ok, witness


# -- 5: relation validity checker ---------------------------------------------------

@criterion(5, "validity checker accepts the shipped relations and rejects the mutants")
@pytest.mark.parametrize("name", ["fig5c", "fig8", "fig9-separated"])
def test_criterion_5_valid_relations(name):
    d = is_indist_relation(relation(name))
    assert d.ok, d


@criterion(5, "validity checker accepts the shipped relations and rejects the mutants")
@pytest.mark.xfail(strict=True, reason="fig9.json is not transitive; see notes/decisions.md")
def test_criterion_5_unseparated_block_relation():
    d = is_indist_relation(relation("fig9"))
    print(f"fig9.json: {d.axiom} fails, witness {d.witness}")
    assert d.ok


@criterion(5, "validity checker accepts the shipped relations and rejects the mutants")
@pytest.mark.parametrize("name,axiom", [
    ("fig5c-no-cc-loop", "reflexivity"), ("fig5c-asymmetric", "symmetry"),
    ("fig5c-forgetful", "transitivity"), ("fig5c-unclosed", "prefix-closure"),
])
def test_criterion_5_mutants_fail(name, axiom):
    d = is_indist_relation(relation(name))
    assert not d.ok and d.axiom == axiom
    assert all(len(w) <= 4 for w in d.witness)


# -- 6: end-to-end synthesis ------------------------------------------------------

@criterion(6, "synthesis wins sync-reach with a verified strategy and loses nosync-reach")
def test_criterion_6_sync_wins(tmp_path, capsys):
    out = tmp_path / "strategy.json"
    assert main(["synth", str(fixture_path("sync-reach")), "--out", str(out)]) == 0
    assert "player-wins" in capsys.readouterr().out
    g = game("sync-reach")
    v = verify_strategy(g, strategy_from_json(read_json(out), g.moves), 6)
    assert v.ok, v


@criterion(6, "synthesis wins sync-reach with a verified strategy and loses nosync-reach")
def test_criterion_6_nosync_loses(capsys):
    assert main(["synth", str(fixture_path("nosync-reach"))]) == 1
    assert capsys.readouterr().out.strip().endswith("player-loses")
    assert exists_consistent_strategy(game("nosync-reach"), 6) is False
    # the same search does find the synchronized strategy
    assert exists_consistent_strategy(game("sync-reach"), 6) is True


# -- 7: solver differential -------------------------------------------------------

@criterion(7, "parity and reachability solvers agree with brute force on 200 random arenas")
def test_criterion_7_solver_differential():
    population = random_population()
    assert len(population) == 200
    assert all(len(a) <= 8 for a in population)
    parity = WinningCondition.parity(PRIORITIES)
    agree_parity = agree_reach = 0
    for a in population:
        pr = solve_parity(a, PRIORITIES)
        rr = solve_reachability(a, {"p0"})
        agree_parity += all((v in pr.region) == (brute_solve(with_initial(a, v), parity) == PLAYER_WINS)
                            for v in a.nodes)
        agree_reach += all((v in rr.region) == (game_tree_reach(with_initial(a, v), {"p0"}) == PLAYER_WINS)
                           for v in a.nodes)
    assert (agree_parity, agree_reach) == (200, 200)


# -- 8: unbounded branching -------------------------------------------------------

@criterion(8, "merged depth-3 information set of peek has 9 successors")
def test_criterion_8_branching():
    tree = info_tree(normalized("peek"), 4)
    t, i = tree.class_of((("-", "a"),) * 3)
    assert len(tree.classes[t][i]) == 2 ** 3
    assert len(tree.successors(t, i)) == 2 ** 3 + 1


# -- 9: bounded bisimulation ------------------------------------------------------

@criterion(9, "information tree and arena satisfy zig and zag to depth 5")
@pytest.mark.parametrize("name", GAME_FIXTURES)
def test_criterion_9_zig_zag(name):
    n = normalized(name)
    assert zig_zag_violations(n, build(n), info_tree(n, 5)) == []
