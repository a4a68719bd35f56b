"""Coalition-indexed knowledge sets and their one-move update.

For the grand coalition the knowledge is a set of machine states. For a
smaller coalition ``J`` (always containing player 0) it is a set of tuples
indexed by the strict supersets of ``J``: each tuple is one world ``J``
considers possible, recorded as what every larger coalition would know there.

All values are hash-consed, so structurally equal values are the same
object and comparing them is an identity check.
"""

from __future__ import annotations

import weakref
from functools import lru_cache
from typing import Callable, Hashable, Iterable

from .fip import coalitions_with_zero, format_coalition, full_coalition, members, strict_supersets, sync_profile


class SortMismatch(TypeError):
    pass


class InfeasibleMove(ValueError):
    """The move extends no feasible history: the play has escaped."""


class InconsistentConfig(AssertionError):
    pass


class KnowledgeValue:
    __slots__ = ("sort", "items", "_hash", "__weakref__")

    def __init__(self, sort: int, items: frozenset):
        self.sort = sort
        self.items = items
        self._hash = hash((sort, items))

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __repr__(self) -> str:
        return f"KnowledgeValue({format_coalition(self.sort)}, {len(self.items)} items)"


_interner: "weakref.WeakValueDictionary[tuple, KnowledgeValue]" = weakref.WeakValueDictionary()


def intern(sort: int, items: Iterable) -> KnowledgeValue:
    """The unique value of ``sort`` with these items.

    Not thread-safe: the pipeline is single-threaded.
    """
    items = frozenset(items)
    key = (sort, items)
    v = _interner.get(key)
    if v is None:
        v = KnowledgeValue(sort, items)
        _interner[key] = v
    return v


def interned_count() -> int:
    return len(_interner)


def _item_key(item):
    if isinstance(item, tuple):
        return (1, tuple(x._hash for x in item))
    return (0, item)


def sorted_items(v: KnowledgeValue) -> list:
    """Items in a deterministic order (states ascending, tuples by child hashes)."""
    return sorted(v.items, key=_item_key)


class Universe:
    """Coalition bookkeeping for a fixed number of players, plus lift."""

    def __init__(self, num_players: int):
        self.num_players = num_players
        self.full = full_coalition(num_players)
        self.coalitions = tuple(coalitions_with_zero(num_players))
        self.index = {J: i for i, J in enumerate(self.coalitions)}
        self.up = {J: strict_supersets(J, self.full) for J in self.coalitions}
        self.pos = {J: {K: i for i, K in enumerate(ups)} for J, ups in self.up.items()}
        # descending cardinality, ties by mask
        self.by_size = tuple(sorted(self.coalitions, key=lambda m: (-bin(m).count("1"), m)))
        self._lift_memo: dict[tuple, KnowledgeValue] = {}

    def entry(self, phi: tuple, sort: int, K: int) -> KnowledgeValue:
        """Entry ``K`` of a tuple that is an element of a value of ``sort``."""
        return phi[self.pos[sort][K]]

    def lift(self, S: int, J: int, psi: KnowledgeValue) -> KnowledgeValue:
        """Knowledge of ``J`` after it merged views with ``S``.

        ``psi`` is the knowledge of the merged coalition ``J | S``.
        """
        X = J | S
        if not J & 1:
            raise SortMismatch(f"target coalition {format_coalition(J)} lacks player 0")
        if psi.sort != X:
            raise SortMismatch(f"expected a value of sort {format_coalition(X)}, got {format_coalition(psi.sort)}")
        if X == J:
            return psi
        key = (S, J, psi)
        hit = self._lift_memo.get(key)
        if hit is None:
            hit = intern(J, {self.nabla(S, J, phi, psi) for phi in psi.items})
            self._lift_memo[key] = hit
        return hit

    def nabla(self, S: int, J: int, phi, psi: KnowledgeValue) -> tuple:
        X = J | S
        if psi.sort != X or X == J:
            raise SortMismatch("nabla needs a value of sort strictly above the target")
        out = []
        for K in self.up[J]:
            if K | S == X:
                out.append(self.lift(S, K, psi))
            else:
                out.append(self.lift(S, K, self.entry(phi, X, K | S)))
        return tuple(out)


@lru_cache(maxsize=None)
def universe(num_players: int) -> Universe:
    return Universe(num_players)


def lift(S: int, J: int, psi: KnowledgeValue, num_players: int) -> KnowledgeValue:
    return universe(num_players).lift(S, J, psi)


def nabla(S: int, J: int, phi, psi: KnowledgeValue, num_players: int) -> tuple:
    return universe(num_players).nabla(S, J, phi, psi)


class KnowledgeConfig:
    """One knowledge value per coalition containing player 0."""

    __slots__ = ("universe", "values", "_hash")

    def __init__(self, u: Universe, values: tuple):
        self.universe = u
        self.values = values
        self._hash = hash(values)

    def __getitem__(self, J: int) -> KnowledgeValue:
        return self.values[self.universe.index[J]]

    def __eq__(self, other) -> bool:
        return isinstance(other, KnowledgeConfig) and self.values == other.values

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        sizes = ", ".join(f"{format_coalition(J)}:{len(v)}" for J, v in zip(self.universe.coalitions, self.values))
        return f"KnowledgeConfig({sizes})"

    def items(self):
        return zip(self.universe.coalitions, self.values)

    @property
    def state(self) -> int:
        (q,) = self.values[-1].items
        return q

    def world(self, J: int) -> tuple:
        """The tuple describing the actual world at coalition ``J``."""
        return tuple(self[K] for K in self.universe.up[J])

    def check_consistent(self) -> None:
        u = self.universe
        if len(self[u.full]) != 1:
            raise InconsistentConfig("grand-coalition entry is not a singleton")
        for J in u.coalitions:
            if J != u.full and self.world(J) not in self[J].items:
                raise InconsistentConfig(f"actual world missing from the entry of {format_coalition(J)}")


def config_from_class(u: Universe, key: KnowledgeValue, phi: tuple) -> KnowledgeConfig:
    """The configuration whose player-0 entry is ``key`` and whose world is ``phi``."""
    vals = [key] + list(phi)
    return KnowledgeConfig(u, tuple(vals))


class KnowledgeEngine:
    """Configurations and their update for one normalized game."""

    def __init__(self, n):
        self.n = n
        u = self.universe = universe(n.num_players)
        self.table = n.machine.base.table
        self.sink = n.sink
        profiles = n.profiles.symbols
        self.sync = {J: tuple(sync_profile(n.base, J, p) for p in profiles) for J in u.coalitions}
        self.keys = {}
        self.groups = {}
        for S in u.coalitions:
            ms = members(S)
            ks = tuple(tuple(p[i] for i in ms) for p in profiles)
            groups: dict[tuple, list[int]] = {}
            for k, key in enumerate(ks):
                groups.setdefault(key, []).append(k)
            self.keys[S] = ks
            self.groups[S] = {key: tuple(v) for key, v in groups.items()}
        self._adv: dict[tuple, KnowledgeValue] = {}
        self._stp: dict[tuple, KnowledgeValue] = {}

    def initial_config(self) -> KnowledgeConfig:
        u = self.universe
        vals = {u.full: intern(u.full, {self.n.initial_state})}
        for J in u.by_size[1:]:
            vals[J] = intern(J, {tuple(vals[K] for K in u.up[J])})
        return KnowledgeConfig(u, tuple(vals[J] for J in u.coalitions))

    def move_index(self, c) -> int:
        return c if isinstance(c, int) else self.n.profiles.index(c)

    def feasible(self, p: KnowledgeConfig, c) -> bool:
        return self.table[p.state][self.move_index(c)] != self.sink

    def delta(self, p: KnowledgeConfig, c) -> KnowledgeConfig:
        k = self.move_index(c)
        if self.table[p.state][k] == self.sink:
            raise InfeasibleMove(c)
        u = self.universe
        vals = tuple(self._step(J, k, p[self.sync[J][k]]) for J in u.coalitions)
        out = KnowledgeConfig(u, vals)
        out.check_consistent()
        return out

    def run(self, history) -> KnowledgeConfig:
        p = self.initial_config()
        for c in history:
            p = self.delta(p, c)
        return p

    def _step(self, J: int, k: int, psi: KnowledgeValue) -> KnowledgeValue:
        key = (J, k, psi)
        hit = self._stp.get(key)
        if hit is None:
            S = self.sync[J][k]
            hit = self.universe.lift(S, J, self._advance(S, k, psi))
            self._stp[key] = hit
        return hit

    def _advance(self, S: int, k: int, psi: KnowledgeValue) -> KnowledgeValue:
        key = (S, k, psi)
        hit = self._adv.get(key)
        if hit is not None:
            return hit
        u = self.universe
        table, sink = self.table, self.sink
        if S == u.full:
            states = set()
            for q in psi.items:
                r = table[q][k]
                if r == sink:
                    raise InfeasibleMove(k)
                states.add(r)
            hit = intern(S, states)
        else:
            ups = u.up[S]
            pos = u.pos[S]
            at_full = pos[u.full]
            cands = self.groups[S][self.keys[S][k]]
            elems = set()
            for phi in psi.items:
                (q,) = phi[at_full].items
                row = table[q]
                for d in cands:
                    if row[d] == sink:
                        continue
                    elems.add(tuple(self._step(K, d, phi[pos[self.sync[K][d]]]) for K in ups))
            hit = intern(S, elems)
        self._adv[key] = hit
        return hit


def render(v: KnowledgeValue, u: Universe, state_name: Callable[[int], str] = str, indent: int = 0) -> str:
    """Nested textual rendering, one tuple per block."""
    pad = "  " * indent
    if v.sort == u.full:
        return "{" + ", ".join(state_name(q) for q in sorted_items(v)) + "}"
    lines = ["{"]
    for phi in sorted_items(v):
        lines.append(pad + "  (")
        for K, entry in zip(u.up[v.sort], phi):
            lines.append(pad + f"    {format_coalition(K)}: " + render(entry, u, state_name, indent + 2))
        lines.append(pad + "  )")
    lines.append(pad + "}")
    return "\n".join(lines)


def render_config(p: KnowledgeConfig, state_name: Callable[[int], str] = str) -> str:
    u = p.universe
    return "\n".join(f"{format_coalition(J)}: " + render(v, u, state_name) for J, v in p.items())
