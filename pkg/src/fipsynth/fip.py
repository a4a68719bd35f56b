"""Games whose information structure is a full-information protocol.

Player 0 is the only one choosing actions; players 1..n are passive
observers. Every player sees its own observation stream, and an observation
``sigma`` may trigger links ``(i, j)``: player ``i`` then learns everything
player ``j`` has seen so far, including what ``j`` itself learned by earlier
links.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .automata import Alphabet, MealyMachine, mealy_trace, reachable_states

MAX_PLAYERS = 16
MAX_PRIORITY = 16


# -- coalitions as bitmasks ---------------------------------------------------

def coalition(*players: int) -> int:
    mask = 0
    for p in players:
        mask |= 1 << p
    return mask


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def full_coalition(num_players: int) -> int:
    return (1 << num_players) - 1


def coalitions_with_zero(num_players: int) -> list[int]:
    """All coalitions containing player 0, ascending by bitmask."""
    return [m for m in range(1, full_coalition(num_players) + 1) if m & 1]


def strict_supersets(mask: int, full: int) -> tuple[int, ...]:
    """Strict supersets of ``mask`` inside ``full``, ascending."""
    free = full & ~mask
    out = []
    sub = free
    while sub:
        out.append(mask | sub)
        sub = (sub - 1) & free
    return tuple(sorted(out))


def format_coalition(mask: int) -> str:
    return "{" + ",".join(map(str, members(mask))) + "}"


# -- the game -----------------------------------------------------------------

@dataclass(frozen=True)
class WinningCondition:
    kind: str  # "reachability" or "parity"
    targets: frozenset = frozenset()
    priorities: Mapping[Hashable, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("reachability", "parity"):
            raise ValueError(f"unknown condition kind {self.kind!r}")

    @classmethod
    def reachability(cls, targets: Iterable[Hashable]) -> "WinningCondition":
        return cls("reachability", targets=frozenset(targets))

    @classmethod
    def parity(cls, priorities: Mapping[Hashable, int]) -> "WinningCondition":
        return cls("parity", priorities=dict(priorities))


class FipGame:
    """A repeated game with one active player and FIP observations.

    ``observations[i]`` defines the observation function of player ``i``,
    ``comm`` maps each observation to the set of links it fires.
    """

    def __init__(self, moves: Alphabet | Sequence[Hashable], actions: Sequence[Hashable],
                 act: Mapping[Hashable, Hashable], observations: Sequence[MealyMachine],
                 comm: Mapping[Hashable, Iterable[tuple[int, int]]],
                 coloring: MealyMachine, condition: WinningCondition):
        self.moves = moves if isinstance(moves, Alphabet) else Alphabet(moves)
        self.actions = tuple(actions)
        self.act = dict(act)
        self.observations = tuple(observations)
        self.comm = {sigma: frozenset(tuple(l) for l in links) for sigma, links in comm.items()}
        self.coloring = coloring
        self.condition = condition

    @property
    def num_players(self) -> int:
        return len(self.observations)

    @property
    def full(self) -> int:
        return full_coalition(self.num_players)

    def observation_symbols(self) -> tuple:
        seen: dict = {}
        for m in self.observations:
            for row in m.out:
                for o in row:
                    seen.setdefault(o, None)
        return tuple(seen)

    def colors(self) -> tuple:
        return self.coloring.out_alphabet

    def links(self, sigma: Hashable) -> frozenset:
        return self.comm.get(sigma, frozenset())

    def profile_machine_states(self):
        """Initial tuple of observation-machine states."""
        return tuple(m.base.initial for m in self.observations)

    def observe(self, states: tuple[int, ...], c: Hashable) -> tuple[tuple[int, ...], tuple]:
        """One step of all observation machines: next states and the profile."""
        nxt = []
        prof = []
        for m, q in zip(self.observations, states):
            r, o = m.step(q, c)
            nxt.append(r)
            prof.append(o)
        return tuple(nxt), tuple(prof)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: tuple = ()


def validate(game: FipGame, visibility: str = "global") -> list[Violation]:
    """Static well-formedness checks; an empty list means the game is valid.

    ``visibility`` is ``"global"`` (every pair of player-0 states) or
    ``"reachable"`` (pairs of states reachable from the initial state, which
    matches quantifying over all pairs of histories).
    """
    report: list[Violation] = []
    n = game.num_players
    if not 1 <= n <= MAX_PLAYERS:
        report.append(Violation("players", f"{n} players; supported range is 1..{MAX_PLAYERS}"))
        return report
    for i, m in enumerate(game.observations):
        if m.alphabet != game.moves:
            report.append(Violation("alphabet", f"observation machine of player {i} reads a different alphabet"))
    if game.coloring.alphabet != game.moves:
        report.append(Violation("alphabet", "coloring machine reads a different alphabet"))
    for c in game.moves:
        if c not in game.act:
            report.append(Violation("act", f"move {c!r} has no action", (c,)))
        elif game.act[c] not in game.actions:
            report.append(Violation("act", f"move {c!r} maps to undeclared action {game.act[c]!r}", (c,)))
    if report:
        return report

    for sigma in game.observation_symbols():
        if sigma not in game.comm:
            report.append(Violation("comm", f"no communication entry for observation {sigma!r}", (sigma,)))
    for sigma, links in game.comm.items():
        for i, j in links:
            if not (0 <= i < n and 0 <= j < n):
                report.append(Violation("comm", f"link ({i},{j}) on {sigma!r} names an unknown player", (sigma,)))

    w = visibility_witness(game, reachable_only=(visibility == "reachable"))
    if w is not None:
        c1, c2 = w
        report.append(Violation(
            "visibility",
            f"moves {c1!r} and {c2!r} carry different actions but player 0 can observe them identically",
            w))

    cond = game.condition
    if cond.kind == "parity":
        for color in game.colors():
            if color not in cond.priorities:
                report.append(Violation("parity", f"color {color!r} has no priority", (color,)))
        for color, p in cond.priorities.items():
            if not 0 <= p <= MAX_PRIORITY:
                report.append(Violation("parity", f"priority {p} of {color!r} outside 0..{MAX_PRIORITY}", (color,)))
    return report


def visibility_witness(game: FipGame, reachable_only: bool = False) -> tuple | None:
    """A pair of moves with different actions sharing a player-0 output."""
    m0 = game.observations[0]
    states = reachable_states(m0.base) if reachable_only else range(m0.base.num_states)
    first: dict[Hashable, Hashable] = {}
    for q in sorted(states):
        for k, c in enumerate(game.moves):
            o = m0.out[q][k]
            prev = first.setdefault(o, c)
            if game.act[prev] != game.act[c]:
                return (prev, c)
    return None


# -- view graphs and indistinguishability ------------------------------------

@dataclass(frozen=True)
class ViewGraph:
    num_players: int
    length: int
    edges: frozenset

    @property
    def nodes(self) -> list[tuple[int, int]]:
        return [(i, t) for i in range(self.num_players) for t in range(self.length + 1)]

    def reachable(self, start: tuple[int, int]) -> set[tuple[int, int]]:
        succ: dict[tuple[int, int], list] = {}
        for u, v in self.edges:
            succ.setdefault(u, []).append(v)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in succ.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def observation_traces(game: FipGame, history: Sequence[Hashable]) -> list[list]:
    return [mealy_trace(m, history) for m in game.observations]


def _comm_edges(game: FipGame, traces: list[list], length: int):
    for t in range(1, length + 1):
        for i in range(game.num_players):
            for (src, j) in game.links(traces[i][t - 1]):
                if src == i:
                    yield (i, t), (j, t)


def view_graph(game: FipGame, history: Sequence[Hashable]) -> ViewGraph:
    traces = observation_traces(game, history)
    length = len(history)
    edges = {((i, t), (i, t - 1)) for i in range(game.num_players) for t in range(1, length + 1)}
    edges.update(_comm_edges(game, traces, length))
    return ViewGraph(game.num_players, length, frozenset(edges))


def _seen_nodes(game: FipGame, traces: list[list], length: int, starts: Iterable[int]) -> set:
    # Past edges are implicit: reaching (j, t) means every (j, s), s <= t, is seen.
    latest: dict[int, int] = {}
    stack = [(i, length) for i in starts]
    while stack:
        j, t = stack.pop()
        if latest.get(j, -1) >= t:
            continue
        lo = latest.get(j, 0)
        latest[j] = t
        for s in range(t, lo, -1):
            for (src, k) in game.links(traces[j][s - 1]):
                if src == j and latest.get(k, -1) < s:
                    stack.append((k, s))
    return {(j, s) for j, t in latest.items() for s in range(1, t + 1)}


def view_signature(game: FipGame, J: int, history: Sequence[Hashable],
                   traces: list[list] | None = None) -> frozenset:
    """Observations at all nodes coalition ``J`` can see after ``history``."""
    if traces is None:
        traces = observation_traces(game, history)
    nodes = _seen_nodes(game, traces, len(history), members(J))
    return frozenset((j, t, traces[j][t - 1]) for j, t in nodes)


def indistinguishable(game: FipGame, J: int, t1: Sequence[Hashable], t2: Sequence[Hashable]) -> bool:
    """Literal reading of the view-graph definition, evaluated on ``t1``'s graph."""
    if len(t1) != len(t2):
        return False
    graph = view_graph(game, t1)
    tr1 = observation_traces(game, t1)
    tr2 = observation_traces(game, t2)
    for i in members(J):
        for j, t in graph.reachable((i, len(t1))):
            if t >= 1 and tr1[j][t - 1] != tr2[j][t - 1]:
                return False
    return True


def sync_profile(game: FipGame, J: int, profile: Sequence[Hashable]) -> int:
    """Closure of ``J`` under the links fired by an observation profile."""
    result = J
    stack = members(J)
    while stack:
        i = stack.pop()
        for (src, j) in game.links(profile[i]):
            if src == i and not result >> j & 1:
                result |= 1 << j
                stack.append(j)
    return result


def sync(game: FipGame, J: int, c: Hashable, history: Sequence[Hashable] = ()) -> int:
    """Players ``J`` ends up sharing its view with on move ``c``.

    Observations may depend on the past, hence the optional ``history``
    preceding ``c``; for games with memoryless observations it is irrelevant.
    """
    states = game.profile_machine_states()
    for d in history:
        states, _ = game.observe(states, d)
    _, profile = game.observe(states, c)
    return sync_profile(game, J, profile)
