"""Finite semi-automata, Mealy transducers and DFAs.

States are dense integers and letters are interned through an ``Alphabet``
so that transition functions are plain row-major tables.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Sequence

Letter = Hashable


class UnknownLetter(KeyError):
    pass


class AlphabetMismatch(ValueError):
    pass


class Alphabet:
    """An ordered, interned set of letters."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[Letter]):
        self.symbols = tuple(symbols)
        self._index = {s: i for i, s in enumerate(self.symbols)}
        if len(self._index) != len(self.symbols):
            raise ValueError("duplicate letters in alphabet")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, letter) -> bool:
        return letter in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)!r})"

    def index(self, letter: Letter) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise UnknownLetter(letter) from None

    def encode(self, word: Iterable[Letter]) -> list[int]:
        return [self.index(c) for c in word]


class SemiAutomaton:
    """Deterministic, complete transition structure.

    ``table[q][k]`` is the successor of state ``q`` on the ``k``-th letter.
    ``names`` optionally keeps the external state labels for I/O.
    """

    __slots__ = ("alphabet", "table", "initial", "names")

    def __init__(self, alphabet: Alphabet, table: Sequence[Sequence[int]],
                 initial: int = 0, names: Sequence[Hashable] | None = None):
        self.alphabet = alphabet
        self.table = tuple(tuple(row) for row in table)
        self.initial = initial
        self.names = tuple(names) if names is not None else tuple(range(len(self.table)))
        n = len(self.table)
        if not 0 <= initial < n:
            raise ValueError(f"initial state {initial} out of range")
        for q, row in enumerate(self.table):
            if len(row) != len(alphabet):
                raise ValueError(f"state {self.names[q]!r} has a partial transition row")
            for r in row:
                if not 0 <= r < n:
                    raise ValueError(f"transition target {r} out of range")

    @property
    def num_states(self) -> int:
        return len(self.table)

    def step(self, q: int, letter: Letter) -> int:
        return self.table[q][self.alphabet.index(letter)]

    def __repr__(self) -> str:
        return f"SemiAutomaton({self.num_states} states over {len(self.alphabet)} letters)"


class MealyMachine:
    __slots__ = ("base", "out")

    def __init__(self, base: SemiAutomaton, out: Sequence[Sequence[Hashable]]):
        self.base = base
        self.out = tuple(tuple(row) for row in out)
        if len(self.out) != base.num_states or any(len(r) != len(base.alphabet) for r in self.out):
            raise ValueError("output function is not total")

    @property
    def alphabet(self) -> Alphabet:
        return self.base.alphabet

    @property
    def out_alphabet(self) -> tuple:
        seen = dict.fromkeys(o for row in self.out for o in row)
        return tuple(seen)

    def step(self, q: int, letter: Letter) -> tuple[int, Hashable]:
        k = self.base.alphabet.index(letter)
        return self.base.table[q][k], self.out[q][k]


class Dfa:
    __slots__ = ("base", "accepting")

    def __init__(self, base: SemiAutomaton, accepting: Iterable[int]):
        self.base = base
        self.accepting = frozenset(accepting)
        if any(not 0 <= q < base.num_states for q in self.accepting):
            raise ValueError("accepting state out of range")

    @property
    def alphabet(self) -> Alphabet:
        return self.base.alphabet

    @property
    def num_states(self) -> int:
        return self.base.num_states


def run_from(semi: SemiAutomaton, q: int, word: Iterable[Letter]) -> int:
    for c in word:
        q = semi.table[q][semi.alphabet.index(c)]
    return q


def run(semi: SemiAutomaton, word: Iterable[Letter]) -> int:
    return run_from(semi, semi.initial, word)


def mealy_trace(m: MealyMachine, word: Iterable[Letter]) -> list:
    """Outputs of all non-empty prefixes of ``word``."""
    q = m.base.initial
    outs = []
    for c in word:
        k = m.base.alphabet.index(c)
        outs.append(m.out[q][k])
        q = m.base.table[q][k]
    return outs


def product(s1: SemiAutomaton, s2: SemiAutomaton) -> SemiAutomaton:
    """Synchronous product restricted to its reachable part.

    State names of the result are pairs of the component state indices.
    """
    if s1.alphabet != s2.alphabet:
        raise AlphabetMismatch("product needs identical alphabets")
    start = (s1.initial, s2.initial)
    ids = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        p, q = order[i]
        row = []
        for r1, r2 in zip(s1.table[p], s2.table[q]):
            pair = (r1, r2)
            if pair not in ids:
                ids[pair] = len(order)
                order.append(pair)
            row.append(ids[pair])
        rows.append(row)
        i += 1
    return SemiAutomaton(s1.alphabet, rows, 0, order)


def reachable_states(semi: SemiAutomaton) -> list[int]:
    seen = {semi.initial}
    order = [semi.initial]
    for q in order:
        for r in semi.table[q]:
            if r not in seen:
                seen.add(r)
                order.append(r)
    return order


def dfa_accepts(d: Dfa, word: Iterable[Letter]) -> bool:
    return run(d.base, word) in d.accepting


def dfa_equivalent(d1: Dfa, d2: Dfa) -> tuple[bool, tuple | None]:
    """Language equivalence; on failure also a shortest distinguishing word.

    BFS explores letters in alphabet order, so among shortest witnesses the
    lexicographically least (by letter index) is returned.
    """
    if d1.alphabet != d2.alphabet:
        raise AlphabetMismatch("equivalence needs identical alphabets")
    start = (d1.base.initial, d2.base.initial)
    parent: dict[tuple[int, int], tuple | None] = {start: None}
    queue = deque([start])
    letters = d1.alphabet.symbols
    while queue:
        pair = queue.popleft()
        p, q = pair
        if (p in d1.accepting) != (q in d2.accepting):
            return False, _trace_back(parent, pair)
        for k, c in enumerate(letters):
            nxt = (d1.base.table[p][k], d2.base.table[q][k])
            if nxt not in parent:
                parent[nxt] = (pair, c)
                queue.append(nxt)
    return True, None


def _trace_back(parent: dict, node) -> tuple:
    word = []
    while parent[node] is not None:
        node, c = parent[node]
        word.append(c)
    return tuple(reversed(word))


def dfa_minimize(d: Dfa) -> Dfa:
    """Moore partition refinement on the reachable part.

    Blocks are renumbered in BFS order from the initial block, which makes
    the result canonical: equivalent DFAs minimize to identical tables.
    """
    reach = reachable_states(d.base)
    table = d.base.table
    block = {q: int(q in d.accepting) for q in reach}
    count = len(set(block.values()))
    while True:
        sigs: dict[tuple, int] = {}
        new_block = {}
        for q in reach:
            sig = (block[q],) + tuple(block[r] for r in table[q])
            new_block[q] = sigs.setdefault(sig, len(sigs))
        block = new_block
        if len(sigs) == count:
            break
        count = len(sigs)
    rep: dict[int, int] = {}
    for q in reach:
        rep.setdefault(block[q], q)
    order = [block[d.base.initial]]
    ids = {order[0]: 0}
    rows = []
    for b in order:
        row = []
        for r in table[rep[b]]:
            br = block[r]
            if br not in ids:
                ids[br] = len(order)
                order.append(br)
            row.append(ids[br])
        rows.append(row)
    accepting = [ids[b] for b in order if rep[b] in d.accepting]
    names = [d.base.names[rep[b]] for b in order]
    return Dfa(SemiAutomaton(d.alphabet, rows, 0, names), accepting)


def shortest_word_to(semi: SemiAutomaton, targets: Iterable[int],
                     letters: Sequence[int] | None = None) -> tuple | None:
    """Shortest word from the initial state into ``targets`` (or None).

    ``letters`` restricts the BFS to a subset of letter indices.
    """
    goal = set(targets)
    ks = range(len(semi.alphabet)) if letters is None else letters
    parent: dict[int, tuple | None] = {semi.initial: None}
    queue = deque([semi.initial])
    while queue:
        q = queue.popleft()
        if q in goal:
            return _trace_back(parent, q)
        for k in ks:
            r = semi.table[q][k]
            if r not in parent:
                parent[r] = (q, semi.alphabet.symbols[k])
                queue.append(r)
    return None


def coreachable(d: Dfa) -> set[int]:
    """States from which some accepting state is reachable."""
    preds: list[set[int]] = [set() for _ in range(d.num_states)]
    for q, row in enumerate(d.base.table):
        for r in row:
            preds[r].add(q)
    seen = set(d.accepting)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in preds[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def build_semi(alphabet: Alphabet, names: Sequence[Hashable], initial: Hashable,
               delta: dict[tuple[Hashable, Letter], Hashable],
               sink: Hashable | None = None) -> SemiAutomaton:
    """Table construction from a named transition map.

    A missing transition is an error unless ``sink`` names the state that
    absorbs it.
    """
    ids = {n: i for i, n in enumerate(names)}
    if initial not in ids:
        raise ValueError(f"unknown initial state {initial!r}")
    if sink is not None and sink not in ids:
        raise ValueError(f"unknown sink state {sink!r}")
    rows = []
    for n in names:
        row = []
        for c in alphabet:
            tgt = delta.get((n, c), sink)
            if tgt is None:
                raise ValueError(f"missing transition from {n!r} on {c!r}")
            if tgt not in ids:
                raise ValueError(f"unknown target state {tgt!r}")
            row.append(ids[tgt])
        rows.append(row)
    return SemiAutomaton(alphabet, rows, ids[initial], names)
