"""Synchronous relations on histories as DFAs over pairs of moves."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from .automata import (Alphabet, AlphabetMismatch, Dfa, SemiAutomaton, coreachable, dfa_equivalent, dfa_minimize,
                       reachable_states, run, shortest_word_to)
from .fip import FipGame, validate
from .normalize import InvalidGame

REJ = "rej"
DEFAULT_COMPOSE_LIMIT = 200_000


class MissingActMap(ValueError):
    pass


class RelationTooLarge(RuntimeError):
    pass


def pair_alphabet(moves: Alphabet) -> Alphabet:
    return Alphabet((x, y) for x in moves for y in moves)


class TwoTapeDfa:
    """A DFA over ``moves x moves``; ``act`` is optional."""

    def __init__(self, dfa: Dfa, moves: Alphabet, act: Mapping[Hashable, Hashable] | None = None):
        if dfa.alphabet != pair_alphabet(moves):
            raise AlphabetMismatch("two-tape DFA must read exactly the pairs of moves")
        self.dfa = dfa
        self.moves = moves
        self.act = dict(act) if act is not None else None

    @property
    def num_states(self) -> int:
        return self.dfa.num_states

    def letter(self, x, y) -> int:
        return self.dfa.alphabet.index((x, y))


def zip_word(t1: Sequence, t2: Sequence) -> list:
    return list(zip(t1, t2))


def unzip_word(word: Sequence[tuple]) -> tuple[tuple, tuple]:
    return tuple(x for x, _ in word), tuple(y for _, y in word)


def relation_accepts(r: TwoTapeDfa, t1: Sequence, t2: Sequence) -> bool:
    if len(t1) != len(t2):
        return False
    return run(r.dfa.base, zip_word(t1, t2)) in r.dfa.accepting


def relation_equivalent(r1: TwoTapeDfa, r2: TwoTapeDfa) -> tuple[bool, tuple | None]:
    """Equality of relations; on failure a shortest distinguishing pair."""
    if r1.moves != r2.moves:
        raise AlphabetMismatch("relations over different move sets")
    same, word = dfa_equivalent(r1.dfa, r2.dfa)
    return same, None if same else unzip_word(word)


def swap_tapes(r: TwoTapeDfa) -> TwoTapeDfa:
    pairs = r.dfa.alphabet
    perm = [pairs.index((y, x)) for x, y in pairs]
    table = [[row[j] for j in perm] for row in r.dfa.base.table]
    base = SemiAutomaton(pairs, table, r.dfa.base.initial, r.dfa.base.names)
    return TwoTapeDfa(Dfa(base, r.dfa.accepting), r.moves, r.act)


def fip_to_2dfa(game: FipGame) -> TwoTapeDfa:
    """Product of per-player observation-equality trackers with link propagation.

    An entry is ``(state on tape 1, state on tape 2, last observation)`` or
    ``REJ`` once the player tells the two histories apart, directly or
    through a link to a player who does.
    """
    problems = validate(game)
    if problems:
        raise InvalidGame(problems)
    obs = game.observations
    n = game.num_players
    pairs = pair_alphabet(game.moves)
    start = tuple((m.base.initial, m.base.initial, None) for m in obs)
    ids = {start: 0}
    order = [start]
    rows = []
    for state in order:
        row = []
        for x, y in pairs:
            kx, ky = game.moves.index(x), game.moves.index(y)
            nxt = []
            for m, e in zip(obs, state):
                if e == REJ:
                    nxt.append(REJ)
                    continue
                q1, q2, _ = e
                o1, o2 = m.out[q1][kx], m.out[q2][ky]
                nxt.append((m.base.table[q1][kx], m.base.table[q2][ky], o1) if o1 == o2 else REJ)
            closed = {i for i in range(n) if nxt[i] == REJ}
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    if i in closed:
                        continue
                    if any(src == i and j in closed for src, j in game.links(nxt[i][2])):
                        closed.add(i)
                        changed = True
            tgt = tuple(REJ if i in closed else nxt[i] for i in range(n))
            if tgt not in ids:
                ids[tgt] = len(order)
                order.append(tgt)
            row.append(ids[tgt])
        rows.append(row)
    accepting = [q for q, s in enumerate(order) if s[0] != REJ]
    base = SemiAutomaton(pairs, rows, 0, order)
    return TwoTapeDfa(Dfa(base, accepting), game.moves, game.act)


@dataclass(frozen=True)
class Diagnosis:
    ok: bool
    axiom: str | None = None
    witness: tuple | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _pair_witness(word) -> tuple:
    return unzip_word(word)


def check_reflexive(r: TwoTapeDfa) -> Diagnosis:
    diag = [r.letter(c, c) for c in r.moves]
    bad = set(range(r.num_states)) - r.dfa.accepting
    w = shortest_word_to(r.dfa.base, bad, diag)
    if w is None:
        return Diagnosis(True)
    return Diagnosis(False, "reflexivity", _pair_witness(w), "a history is not related to itself")


def check_symmetric(r: TwoTapeDfa) -> Diagnosis:
    same, w = dfa_equivalent(r.dfa, swap_tapes(r).dfa)
    if same:
        return Diagnosis(True)
    return Diagnosis(False, "symmetry", _pair_witness(w), "relation differs from its tape swap")


def check_transitive(r: TwoTapeDfa, limit: int = DEFAULT_COMPOSE_LIMIT) -> Diagnosis:
    """Search for ``x ~ y ~ z`` with ``x !~ z`` through the determinized composition.

    A state is the set of pairs (state on (x, y), state on (y, z)) over all
    middle words, together with the state on (x, z).
    """
    table = r.dfa.base.table
    acc = r.dfa.accepting
    moves = r.moves.symbols
    idx = {(x, y): r.letter(x, y) for x in moves for y in moves}
    q0 = r.dfa.base.initial
    start = (frozenset({(q0, q0)}), q0)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        S, q = node
        if q not in acc and any(p1 in acc and p2 in acc for p1, p2 in S):
            word = []
            cur = node
            while parent[cur] is not None:
                cur, letter = parent[cur]
                word.append(letter)
            word.reverse()
            xs = tuple(x for x, _ in word)
            zs = tuple(z for _, z in word)
            return Diagnosis(False, "transitivity", (xs, _middle(r, xs, zs), zs),
                             "x~y and y~z but not x~z")
        for x in moves:
            for z in moves:
                T = frozenset((table[p1][idx[x, y]], table[p2][idx[y, z]]) for p1, p2 in S for y in moves)
                nxt = (T, table[q][idx[x, z]])
                if nxt not in parent:
                    if len(parent) >= limit:
                        raise RelationTooLarge(f"composition exceeded {limit} states")
                    parent[nxt] = (node, (x, z))
                    queue.append(nxt)
    return Diagnosis(True)


def _middle(r: TwoTapeDfa, xs: tuple, zs: tuple) -> tuple:
    """A middle word ``y`` with (xs, y) and (y, zs) both accepted."""
    table = r.dfa.base.table
    q0 = r.dfa.base.initial
    layers = [{(q0, q0): None}]
    for x, z in zip(xs, zs):
        nxt: dict = {}
        for (p1, p2) in layers[-1]:
            for y in r.moves:
                key = (table[p1][r.letter(x, y)], table[p2][r.letter(y, z)])
                nxt.setdefault(key, ((p1, p2), y))
        layers.append(nxt)
    end = next(k for k in layers[-1] if k[0] in r.dfa.accepting and k[1] in r.dfa.accepting)
    ys = []
    for layer in reversed(layers[1:]):
        end, y = layer[end]
        ys.append(y)
    return tuple(reversed(ys))


def _useful(r: TwoTapeDfa) -> set[int]:
    return set(reachable_states(r.dfa.base)) & coreachable(r.dfa)


def check_prefix_closed(r: TwoTapeDfa) -> Diagnosis:
    useful = _useful(r)
    bad = useful - r.dfa.accepting
    if not bad:
        return Diagnosis(True)
    w = shortest_word_to(r.dfa.base, bad)
    return Diagnosis(False, "prefix-closure", _pair_witness(w), "a rejected pair has an accepted extension")


def check_visible(r: TwoTapeDfa) -> Diagnosis:
    if r.act is None:
        raise MissingActMap("visibility check needs the action map")
    useful = _useful(r)
    table = r.dfa.base.table
    best = None
    for q in sorted(useful):
        for k, (x, y) in enumerate(r.dfa.alphabet):
            if r.act[x] != r.act[y] and table[q][k] in useful:
                w = shortest_word_to(r.dfa.base, {q}) + ((x, y),)
                if best is None or len(w) < len(best):
                    best = w
    if best is None:
        return Diagnosis(True)
    return Diagnosis(False, "visibility", _pair_witness(best), "related histories differ in an action")


def is_indist_relation(r: TwoTapeDfa, visibility: bool | None = None,
                       compose_limit: int = DEFAULT_COMPOSE_LIMIT) -> Diagnosis:
    """Check the axioms in order and report the first one that fails.

    Visibility is checked when ``visibility`` is true, or when it is left
    unset and the relation carries an action map.
    """
    if visibility and r.act is None:
        raise MissingActMap("visibility check needs the action map")
    checks = [check_reflexive, check_symmetric, lambda x: check_transitive(x, compose_limit),
              check_prefix_closed]
    if visibility or (visibility is None and r.act is not None):
        checks.append(check_visible)
    # every axiom is a property of the language; the minimal machine keeps compositions small
    r = TwoTapeDfa(dfa_minimize(r.dfa), r.moves, r.act)
    for check in checks:
        d = check(r)
        if not d.ok:
            return d
    return Diagnosis(True, message="indistinguishability relation")
