"""Reachability and parity solving on arenas, and strategy extraction.

Parity uses the min-even convention: player 0 wins a play iff the least
priority seen infinitely often is even.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Mapping

from .arena import Arena, LimitExceeded, max_nodes_from_env
from .automata import MealyMachine, SemiAutomaton
from .fip import WinningCondition
from .normalize import ESCAPED, NormalizedFip, denormalize_strategy
from .strategy import Strategy, constant_strategy

__all__ = [
    "NotWinning", "SolveResult", "Strategy", "constant_strategy", "extract_strategy",
    "solve", "solve_parity", "solve_reachability",
]

PLAYER_WINS = "player-wins"
PLAYER_LOSES = "player-loses"


class NotWinning(ValueError):
    pass


@dataclass(frozen=True)
class SolveResult:
    winner: str
    region: frozenset
    strategy: Mapping[int, Hashable] = field(default_factory=dict)
    ranks: Mapping[int, int] = field(default_factory=dict)

    @property
    def player_wins(self) -> bool:
        return self.winner == PLAYER_WINS


def _predecessors(a: Arena) -> list[list[tuple[int, Hashable]]]:
    preds: list[list] = [[] for _ in a.nodes]
    for v in a.nodes:
        for act, succ in a.edges[v].items():
            for w in succ:
                preds[w].append((v, act))
    return preds


def solve_reachability(a: Arena, targets) -> SolveResult:
    """Attractor of the target-colored nodes; escapes always count as targets."""
    goal = set(targets) | {ESCAPED}
    rank: dict[int, int] = {}
    missing = {(v, act): len(succ) for v in a.nodes for act, succ in a.edges[v].items()}
    preds = _predecessors(a)
    layer = [v for v in a.nodes if a.colors[v] in goal]
    for v in layer:
        rank[v] = 0
    level = 0
    while layer:
        level += 1
        nxt = []
        for w in layer:
            for v, act in preds[w]:
                missing[v, act] -= 1
                if missing[v, act] == 0 and v not in rank:
                    rank[v] = level
                    nxt.append(v)
        layer = nxt
    strategy = {}
    for v, r in rank.items():
        if r == 0:
            strategy[v] = a.available(v)[0]
            continue
        for act in a.available(v):
            if all(rank.get(w, r) < r for w in a.edges[v][act]):
                strategy[v] = act
                break
    winner = PLAYER_WINS if a.initial in rank else PLAYER_LOSES
    return SolveResult(winner, frozenset(rank), dict(sorted(strategy.items())), dict(sorted(rank.items())))


# -- parity --------------------------------------------------------------------

class _Game:
    """Two-player graph: nodes ``< split`` belong to player 0, the rest to player 1."""

    def __init__(self, a: Arena, priority: list[int]):
        n = len(a)
        self.split = n
        self.prio = list(priority)
        self.succ: list[list[int]] = [[] for _ in range(n)]
        self.choice: dict[int, tuple[int, Hashable]] = {}
        for v in a.nodes:
            for act, targets in a.edges[v].items():
                e = n + len(self.choice)
                self.choice[e] = (v, act)
                self.succ[v].append(e)
                self.succ.append(list(targets))
                self.prio.append(priority[v])
        self.pred: list[list[int]] = [[] for _ in self.succ]
        for v, ss in enumerate(self.succ):
            for w in ss:
                self.pred[w].append(v)

    def owner(self, v: int) -> int:
        return 0 if v < self.split else 1


def _attractor(g: _Game, nodes: frozenset, player: int, target: set) -> tuple[set, dict]:
    attr = set(target)
    strat: dict[int, int] = {}
    count = {v: sum(1 for w in g.succ[v] if w in nodes) for v in nodes}
    queue = deque(sorted(target))
    while queue:
        w = queue.popleft()
        for v in g.pred[w]:
            if v not in nodes or v in attr:
                continue
            if g.owner(v) == player:
                attr.add(v)
                strat[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strat


def _zielonka(g: _Game, nodes: frozenset) -> tuple[list[set], list[dict]]:
    if not nodes:
        return [set(), set()], [{}, {}]
    p = min(g.prio[v] for v in nodes)
    i = p % 2
    top = {v for v in nodes if g.prio[v] == p}
    A, sA = _attractor(g, nodes, i, top)
    W1, S1 = _zielonka(g, frozenset(nodes - A))
    if not W1[1 - i]:
        win = [set(), set()]
        strat: list[dict] = [{}, {}]
        win[i] = set(nodes)
        strat[i] = {**S1[i], **sA}
        for v in top:
            if g.owner(v) == i:
                strat[i][v] = next(w for w in g.succ[v] if w in nodes)
        return win, strat
    B, sB = _attractor(g, nodes, 1 - i, W1[1 - i])
    W2, S2 = _zielonka(g, frozenset(nodes - B))
    win = [set(), set()]
    strat = [{}, {}]
    win[1 - i] = W2[1 - i] | B
    strat[1 - i] = {**S2[1 - i], **S1[1 - i], **sB}
    win[i] = W2[i]
    strat[i] = S2[i]
    return win, strat


def solve_parity(a: Arena, priorities: Mapping[Hashable, int]) -> SolveResult:
    """Zielonka's recursive algorithm on the action-expanded graph.

    A node without a color (the initial node) is never revisited, so its
    priority does not matter; it gets 0.
    """
    prio = {**priorities, ESCAPED: 0, None: 0}
    g = _Game(a, [prio[c] for c in a.colors])
    win, strat = _zielonka(g, frozenset(range(len(g.succ))))
    region = frozenset(v for v in win[0] if v < g.split)
    strategy = {v: g.choice[strat[0][v]][1] for v in sorted(region)}
    winner = PLAYER_WINS if a.initial in region else PLAYER_LOSES
    return SolveResult(winner, region, strategy)


def solve(a: Arena, condition: WinningCondition) -> SolveResult:
    if condition.kind == "reachability":
        return solve_reachability(a, condition.targets)
    return solve_parity(a, condition.priorities)


# -- strategy extraction ---------------------------------------------------------

def extract_strategy(n: NormalizedFip, a: Arena, r: SolveResult, denormalize: bool = True,
                     max_states: int | None = None) -> Strategy:
    """Finite-state strategy reading profiles (or source moves, by default).

    Machine states are knowledge configurations: the class of the next node
    is not a function of the current node and the move alone, so states
    carry the full configuration and the output is looked up at its node.
    Profiles that no source history produces lead to an absorbing state.
    """
    if not r.player_wins:
        raise NotWinning("player 0 has no winning strategy")
    limit = max_nodes_from_env() if max_states is None else max_states
    eng = n.knowledge()

    def action_at(v: int):
        return r.strategy.get(v, a.available(v)[0])

    start = eng.initial_config()
    ids = {start: 0}
    order = [start]
    rows, outs = [], []
    escape = None
    fallback = n.origin.actions[0]
    for p in order:
        row, out = [], []
        for k in range(len(n.profiles)):
            if not eng.feasible(p, k):
                if escape is None:
                    escape = -1
                row.append(-1)
                out.append(fallback)
                continue
            q = eng.delta(p, k)
            j = ids.get(q)
            if j is None:
                if len(order) >= limit:
                    raise LimitExceeded(f"strategy state limit {limit} reached", {"states": len(order)})
                j = ids[q] = len(order)
                order.append(q)
            row.append(j)
            out.append(action_at(a.node_of(q)))
        rows.append(row)
        outs.append(out)
    if escape is not None:
        sink = len(rows)
        rows = [[sink if t == -1 else t for t in row] for row in rows]
        rows.append([sink] * len(n.profiles))
        outs.append([fallback] * len(n.profiles))
    semi = SemiAutomaton(n.profiles, rows, 0)
    s = Strategy(MealyMachine(semi, outs), action_at(a.initial))
    return denormalize_strategy(n, s) if denormalize else s


def strategy_table(s: Strategy) -> str:
    """Human-readable transition/output dump."""
    m = s.machine
    lines = [f"first action: {s.first_action}"]
    for q, row in enumerate(m.base.table):
        for k, letter in enumerate(m.alphabet):
            lines.append(f"{q} --{letter}/{m.out[q][k]}--> {row[k]}")
    return "\n".join(lines)
