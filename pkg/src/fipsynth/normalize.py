"""Reduction to games whose observations are plain projections of the move.

Each source move is replaced by its observation profile (one symbol per
player). Profile sequences that no source history produces are "escapes":
the folded coloring machine sends them to an absorbing state whose color
``ESCAPED`` counts as an immediate win for player 0.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable

from .automata import Alphabet, Dfa, MealyMachine, SemiAutomaton
from .fip import FipGame, Violation, WinningCondition, validate
from .strategy import Strategy

ESCAPED = "escaped"


class InvalidGame(ValueError):
    def __init__(self, problems: list[Violation]):
        self.problems = problems
        super().__init__("; ".join(p.message for p in problems))


class NormalizedFip:
    """A game over observation profiles, plus the link back to its source.

    ``machine`` is the coloring folded with feasibility: its states are
    dense ints, ``state_color[q]`` is the color emitted when entering ``q``
    (``None`` for the initial state) and ``sink`` is the escape state.
    """

    def __init__(self, origin: FipGame, profiles: Alphabet, act: dict, machine: MealyMachine,
                 state_color: tuple, sink: int, transducer: MealyMachine,
                 state_labels: tuple = ()):
        self.origin = origin
        self.profiles = profiles
        self.act = act
        self.machine = machine
        self.state_color = state_color
        self.sink = sink
        self.transducer = transducer
        self.state_labels = state_labels
        self.num_players = origin.num_players
        self.comm = origin.comm
        cond = origin.condition
        if cond.kind == "reachability":
            self.condition = WinningCondition.reachability(cond.targets | {ESCAPED})
        else:
            self.condition = WinningCondition.parity({**cond.priorities, ESCAPED: 0})
        self.feasibility = Dfa(machine.base, [q for q in range(machine.base.num_states) if q != sink])
        self.base = FipGame(
            profiles, origin.actions, act,
            [_projection(profiles, i) for i in range(self.num_players)],
            origin.comm, machine, self.condition)
        self._engine = None

    @property
    def moves(self) -> Alphabet:
        return self.profiles

    @property
    def folded_coloring(self) -> MealyMachine:
        return self.machine

    @property
    def initial_state(self) -> int:
        return self.machine.base.initial

    def step(self, q: int, k: int) -> int:
        return self.machine.base.table[q][k]

    def profile_of(self, history) -> tuple:
        """Image of a source history under the observation-profile map."""
        from .automata import mealy_trace

        return tuple(mealy_trace(self.transducer, history))

    def knowledge(self):
        """The (cached) knowledge engine for this game."""
        if self._engine is None:
            from .knowledge import KnowledgeEngine

            self._engine = KnowledgeEngine(self)
        return self._engine


def _projection(profiles: Alphabet, i: int) -> MealyMachine:
    semi = SemiAutomaton(profiles, [[0] * len(profiles)])
    return MealyMachine(semi, [[p[i] for p in profiles]])


def profile_transducer(game: FipGame) -> MealyMachine:
    """Mealy machine mapping each source move to its observation profile."""
    start = game.profile_machine_states()
    ids = {start: 0}
    order = [start]
    rows, outs = [], []
    for states in order:
        row, out = [], []
        for c in game.moves:
            nxt, prof = game.observe(states, c)
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            row.append(ids[nxt])
            out.append(prof)
        rows.append(row)
        outs.append(out)
    return MealyMachine(SemiAutomaton(game.moves, rows, 0, order), outs)


def normalize(game: FipGame, visibility: str = "global") -> NormalizedFip:
    problems = validate(game, visibility)
    if problems:
        raise InvalidGame(problems)
    transducer = profile_transducer(game)
    ptable, pout = transducer.base.table, transducer.out
    coloring = game.coloring

    # Subset construction over (profile-machine state, coloring state) pairs.
    start = (frozenset({(transducer.base.initial, coloring.base.initial)}), None)
    ids = {start: 0}
    order = [start]
    profile_ids: dict[tuple, int] = {}
    profile_list: list[tuple] = []
    edges: list[dict[int, int]] = []
    zero_action: dict[Hashable, Hashable] = {}
    for pairs, _ in order:
        grouped: dict[tuple, tuple[set, dict]] = {}
        for p, r in sorted(pairs):
            for k, c in enumerate(game.moves):
                prof = pout[p][k]
                tgt, col = grouped.setdefault(prof, (set(), {}))
                tgt.add((ptable[p][k], coloring.base.table[r][k]))
                col.setdefault(coloring.out[r][k], c)
                seen = zero_action.setdefault(prof[0], game.act[c])
                if seen != game.act[c]:
                    raise InvalidGame([Violation(
                        "visibility", f"player-0 observation {prof[0]!r} is shared by different actions", (c,))])
        row = {}
        for prof, (tgt, col) in grouped.items():
            if len(col) > 1:
                raise InvalidGame([Violation(
                    "coloring",
                    "coloring is not determined by the observations: moves "
                    + " and ".join(repr(c) for c in col.values()) + " yield one profile but different colors",
                    tuple(col.values()))])
            (color,) = col
            nxt = (frozenset(tgt), color)
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            if prof not in profile_ids:
                profile_ids[prof] = len(profile_list)
                profile_list.append(prof)
            row[profile_ids[prof]] = ids[nxt]
        edges.append(row)

    sink = len(order)
    profiles = Alphabet(profile_list)
    state_color = tuple(color for _, color in order) + (ESCAPED,)
    table = [[row.get(k, sink) for k in range(len(profiles))] for row in edges]
    table.append([sink] * len(profiles))
    out = [[state_color[t] for t in row] for row in table]
    labels = tuple(order) + ("escape",)
    machine = MealyMachine(SemiAutomaton(profiles, table, 0, range(len(table))), out)
    act = {prof: zero_action[prof[0]] for prof in profile_list}
    return NormalizedFip(game, profiles, act, machine, state_color, sink, transducer, labels)


def denormalize_strategy(n: NormalizedFip, s: Strategy) -> Strategy:
    """Run ``s`` on the profiles of the source history.

    States of the result are reachable pairs (profile-machine state,
    strategy state).
    """
    tr = n.transducer
    sm = s.machine
    start = (tr.base.initial, sm.base.initial)
    ids = {start: 0}
    order = [start]
    rows, outs = [], []
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        row, out = [], []
        for k, c in enumerate(n.origin.moves):
            prof = tr.out[p][k]
            j = sm.alphabet.index(prof)
            nxt = (tr.base.table[p][k], sm.base.table[q][j])
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(ids[nxt])
            out.append(sm.out[q][j])
        rows.append(row)
        outs.append(out)
    machine = MealyMachine(SemiAutomaton(n.origin.moves, rows, 0, order), outs)
    return Strategy(machine, s.first_action, denormalized=True)
