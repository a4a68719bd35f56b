import pytest
from hypothesis import given, settings, strategies as st

from fipsynth.automata import Alphabet, MealyMachine, SemiAutomaton
from fipsynth.fip import FipGame, WinningCondition, coalition
from fipsynth.knowledge import (InconsistentConfig, InfeasibleMove, KnowledgeConfig, SortMismatch, intern, lift,
                                nabla, render_config, universe)
from fipsynth.normalize import normalize
from fipsynth.oracle import brute_h, feasible_histories, lift_violations, morphism_mismatches

from conftest import GAME_FIXTURES, normalized

Q1, Q2, Q3 = 1, 2, 3
P0, P01, P02, FULL3 = 0b001, 0b011, 0b101, 0b111


def s(*states):
    return intern(FULL3, states)


def v01(*entries):
    return intern(P01, {(e,) for e in entries})


def v02(*entries):
    return intern(P02, {(e,) for e in entries})


def three_player_example():
    """A configuration for players 0, 1, 2 whose actual state is q3.

    Player 1 knows the state exactly. Player 2 hesitates between q2 and q3.
    Player 0 alone considers three worlds.
    """
    u = universe(3)
    k01 = v01(s(Q3))
    k02 = v02(s(Q2), s(Q3))
    k0 = intern(P0, {
        (v01(s(Q1), s(Q2)), v02(s(Q1)), s(Q1)),
        (v01(s(Q1), s(Q2)), v02(s(Q2), s(Q3)), s(Q2)),
        (k01, k02, s(Q3)),
    })
    return KnowledgeConfig(u, (k0, k01, k02, s(Q3)))


def test_example_configuration_is_consistent():
    p = three_player_example()
    assert p.universe.coalitions == (P0, P01, P02, FULL3)
    p.check_consistent()
    assert p.state == Q3


def test_lift_after_talking_to_one():
    p = three_player_example()
    got = lift(0b010, P0, p[P01], 3)
    # everybody ends up knowing q3
    assert got is intern(P0, {(v01(s(Q3)), v02(s(Q3)), s(Q3))})


def test_lift_after_talking_to_two():
    p = three_player_example()
    got = lift(0b100, P0, p[P02], 3)
    expected = intern(P0, {
        (v01(s(Q2)), v02(s(Q2), s(Q3)), s(Q2)),
        (v01(s(Q3)), v02(s(Q2), s(Q3)), s(Q3)),
    })
    assert got is expected


def test_lift_identity_branch():
    p = three_player_example()
    for J in p.universe.coalitions:
        for S in range(8):
            if S & ~J == 0:
                assert lift(S, J, p[J], 3) is p[J]


def test_lift_sort_errors():
    p = three_player_example()
    with pytest.raises(SortMismatch):
        lift(0b010, P0, p[P02], 3)
    with pytest.raises(SortMismatch):
        lift(0b001, 0b010, p[FULL3], 3)
    with pytest.raises(SortMismatch):
        nabla(0, P01, (s(Q3),), p[P01], 3)


def test_nabla_two_players_is_subset_knowledge():
    u = universe(2)
    psi = intern(0b11, {Q1, Q2})
    for q in (Q1, Q2):
        assert nabla(0b10, 0b01, q, intern(0b11, {q}), 2) == (intern(0b11, {q}),)
    # the only superset merges with the whole value: one world carrying psi
    assert lift(0b10, 0b01, psi, 2) is intern(0b01, {(psi,)})
    assert u.up[0b01] == (0b11,)


def test_interning_is_structural():
    a = intern(P01, {(s(Q1),), (s(Q2),)})
    b = intern(P01, [(s(Q2),), (s(Q1),)])
    assert a is b
    assert intern(P01, {(s(Q1),)}) is not a


def test_inconsistent_config_detected():
    u = universe(3)
    p = three_player_example()
    bad = KnowledgeConfig(u, (p[P0], v01(s(Q2)), p[P02], p[FULL3]))
    with pytest.raises(InconsistentConfig):
        bad.check_consistent()


@pytest.mark.parametrize("name", GAME_FIXTURES)
def test_initial_config(name):
    n = normalized(name)
    p = n.knowledge().initial_config()
    assert p[p.universe.full].items == frozenset({n.initial_state})
    assert all(len(v) == 1 for v in p.values)
    p.check_consistent()
    assert brute_h(n, 0)[()] == p


def test_peek_uncertainty_then_reveal(peek_n):
    eng = peek_n.knowledge()
    zero = coalition(0)
    p = eng.run([("-", "a"), ("-", "b")])
    assert len(p[zero]) == 2
    p = eng.delta(p, ("c", "c"))
    assert len(p[zero]) == 1
    assert len(p[coalition(0, 1)]) == 1


def test_infeasible_move_raises():
    n = normalized("sync-reach")
    eng = n.knowledge()
    p = eng.initial_config()
    bad = [k for k in range(len(n.profiles)) if not eng.feasible(p, k)]
    assert bad
    with pytest.raises(InfeasibleMove):
        eng.delta(p, bad[0])


def full_communication():
    moves = ["a", "b", "c"]
    alpha = Alphabet(moves)
    one = SemiAutomaton(alpha, [[0, 0, 0]])
    obs0 = MealyMachine(one, [["o", "o", "p"]])
    obs1 = MealyMachine(one, [["a", "b", "c"]])
    col = MealyMachine(SemiAutomaton(alpha, [[1, 0, 0], [0, 1, 1]]), [["u", "v", "v"], ["v", "u", "u"]])
    return FipGame(moves, ["x", "y"], {"a": "x", "b": "x", "c": "y"}, [obs0, obs1],
                   {"o": [(0, 1), (1, 0)], "p": [(0, 1), (1, 0)], "a": [(1, 0)], "b": [(1, 0)], "c": [(1, 0)]},
                   col, WinningCondition.reachability(["u"]))


def test_full_communication_keeps_singletons():
    n = normalize(full_communication())
    eng = n.knowledge()
    hist = feasible_histories(n, 4)
    for hs in hist:
        for h in hs:
            assert all(len(v) == 1 for v in eng.run(h).values)


@pytest.mark.parametrize("name", ["peek", "hier4"])
def test_delta_matches_definition_shallow(name):
    assert morphism_mismatches(normalized(name), 3) == []


def test_render_config_mentions_states():
    text = render_config(three_player_example(), lambda q: f"q{q}")
    assert text.splitlines()[0].startswith("{0}: {")
    assert "{0,1,2}: {q3}" in text
    assert "q1" in text and "q2" in text


# -- algebraic laws of lift on arbitrary sort-correct values ----------------------

def values_of(sort, draw, u, depth=0):
    if sort == u.full:
        return intern(sort, draw(st.sets(st.integers(0, 3), min_size=1, max_size=3)))
    n = draw(st.integers(1, 2 if depth else 3))
    items = set()
    for _ in range(n):
        items.add(tuple(values_of(K, draw, u, depth + 1) for K in u.up[sort]))
    return intern(sort, items)


@st.composite
def knowledge_values(draw):
    u = universe(3)
    sort = draw(st.sampled_from(u.coalitions))
    return values_of(sort, draw, u)


@settings(max_examples=150, deadline=None)
@given(knowledge_values())
def test_lift_laws_on_random_values(v):
    assert lift_violations(3, [v]) == {"identity": 0, "renaming": 0, "compositionality": 0}
