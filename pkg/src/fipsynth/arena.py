"""Finite perfect-information arena over player-0 knowledge classes.

Nodes are keyed by the player-0 entry of a knowledge configuration; the
configurations sharing that entry form the node's class. Edges are grouped
by action and collect the classes reachable through feasible moves.
"""

from __future__ import annotations

import json
import os
from collections import deque
from typing import Hashable, Sequence

from .knowledge import KnowledgeConfig, KnowledgeValue, config_from_class, sorted_items

DEFAULT_MAX_NODES = 1 << 20


class LimitExceeded(RuntimeError):
    def __init__(self, message: str, stats: dict):
        super().__init__(message)
        self.stats = stats


class ColorClashBug(AssertionError):
    """Configurations of one class disagree on the color: a construction bug."""


class UnknownClass(KeyError):
    pass


def max_nodes_from_env(default: int = DEFAULT_MAX_NODES) -> int:
    raw = os.environ.get("FIPSYNTH_MAX_NODES")
    return int(raw) if raw else default


class Arena:
    """Colored game graph; ``edges[v][a]`` is the sorted successor tuple.

    Only available actions appear in ``edges[v]``, in canonical action order.
    ``keys`` and ``witnesses`` are empty for hand-built arenas.
    """

    def __init__(self, actions: Sequence[Hashable], colors: Sequence[Hashable],
                 edges: Sequence[dict], initial: int = 0,
                 keys: Sequence[KnowledgeValue] = (), witnesses: Sequence[KnowledgeConfig] = ()):
        self.actions = tuple(actions)
        self.colors = tuple(colors)
        order = {a: i for i, a in enumerate(self.actions)}
        self.edges = tuple(
            {a: tuple(sorted(set(row[a]))) for a in sorted(row, key=order.__getitem__)} for row in edges)
        self.initial = initial
        self.keys = tuple(keys)
        self.witnesses = tuple(witnesses)
        self._index = {k: v for v, k in enumerate(self.keys)}
        for v, row in enumerate(self.edges):
            if not row or any(not succ for succ in row.values()):
                raise ValueError(f"node {v} lacks an action with a successor")

    def __len__(self) -> int:
        return len(self.colors)

    @property
    def nodes(self) -> range:
        return range(len(self.colors))

    def available(self, v: int) -> tuple:
        return tuple(self.edges[v])

    def successors(self, v: int, a: Hashable) -> tuple:
        return self.edges[v].get(a, ())

    def node_of(self, config: KnowledgeConfig) -> int:
        key = config.values[0]
        try:
            return self._index[key]
        except KeyError:
            raise UnknownClass("configuration class was never explored") from None

    def num_edges(self) -> int:
        return sum(len(s) for row in self.edges for s in row.values())

    def stats(self) -> dict:
        return {"nodes": len(self), "edges": self.num_edges()}


def build(n, max_nodes: int | None = None) -> Arena:
    """Explore the classes reachable from the initial configuration."""
    limit = max_nodes_from_env() if max_nodes is None else max_nodes
    eng = n.knowledge()
    u = eng.universe
    act = [n.act[p] for p in n.profiles]
    action_order = {a: i for i, a in enumerate(n.origin.actions)}
    start = eng.initial_config()
    keys = [start.values[0]]
    index = {keys[0]: 0}
    witnesses = [start]
    colors = []
    edges = []
    queue = deque([0])
    if limit < 1:
        raise LimitExceeded("node limit reached", {"nodes": 0, "limit": limit})
    while queue:
        v = queue.popleft()
        key = keys[v]
        color_seen = None
        row: dict[Hashable, set] = {}
        for phi in sorted_items(key):
            p = config_from_class(u, key, phi)
            p.check_consistent()
            c = n.state_color[p.state]
            if color_seen is None:
                color_seen = (c,)
            elif color_seen != (c,):
                raise ColorClashBug(f"node {v} mixes colors {color_seen[0]!r} and {c!r}")
            for k in range(len(n.profiles)):
                if not eng.feasible(p, k):
                    continue
                q = eng.delta(p, k)
                tk = q.values[0]
                w = index.get(tk)
                if w is None:
                    if len(keys) >= limit:
                        raise LimitExceeded(
                            f"node limit {limit} reached",
                            {"nodes": len(keys), "explored": v, "limit": limit})
                    w = index[tk] = len(keys)
                    keys.append(tk)
                    witnesses.append(q)
                    queue.append(w)
                row.setdefault(act[k], set()).add(w)
        colors.append(color_seen[0])
        edges.append({a: row[a] for a in sorted(row, key=action_order.__getitem__)})
    return Arena(n.origin.actions, colors, edges, 0, keys, witnesses)


def _label(color) -> str:
    return "-" if color is None else str(color)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(a: Arena) -> str:
    lines = ["digraph arena {", "  rankdir=LR;", "  init [shape=point];", "  init -> n%d;" % a.initial]
    for v in a.nodes:
        lines.append(f"  n{v} [label={_quote(f'{v}:{_label(a.colors[v])}')}];")
    for v in a.nodes:
        for act, succ in a.edges[v].items():
            for w in succ:
                lines.append(f"  n{v} -> n{w} [label={_quote(str(act))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(a: Arena) -> dict:
    return {
        "schema_version": 1,
        "kind": "arena",
        "actions": list(a.actions),
        "initial": a.initial,
        "nodes": [
            {"id": v, "color": a.colors[v], **({"class_size": len(a.keys[v])} if a.keys else {})}
            for v in a.nodes
        ],
        "edges": [
            {"source": v, "action": act, "targets": list(succ)}
            for v in a.nodes for act, succ in a.edges[v].items()
        ],
    }


def from_json(doc: dict) -> Arena:
    rows: list[dict] = [{} for _ in doc["nodes"]]
    for e in doc["edges"]:
        rows[e["source"]].setdefault(e["action"], []).extend(e["targets"])
    return Arena(doc["actions"], [nd["color"] for nd in doc["nodes"]], rows, doc["initial"])


def dumps(a: Arena) -> str:
    return json.dumps(to_json(a), indent=2, sort_keys=False)
