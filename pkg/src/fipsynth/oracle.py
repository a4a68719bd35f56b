"""Brute-force ground truth by enumerating histories.

Nothing here uses the knowledge update; configurations are rebuilt from
explicit equivalence classes so that the two can be compared.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .arena import Arena
from .fip import FipGame, indistinguishable, observation_traces, view_signature, coalition
from .knowledge import KnowledgeConfig, intern, universe
from .normalize import NormalizedFip
from .solve import PLAYER_LOSES, PLAYER_WINS
from .strategy import Strategy

DEFAULT_MAX_DEPTH = 6
MAX_BRUTE_NODES = 10


class DepthExceeded(ValueError):
    pass


class TooLarge(ValueError):
    pass


def _check_depth(d: int, max_depth: int) -> None:
    if d > max_depth:
        raise DepthExceeded(f"depth {d} exceeds the configured maximum {max_depth}")


# -- histories ----------------------------------------------------------------

def feasible_histories(n: NormalizedFip, d: int) -> list[list[tuple]]:
    """Feasible profile words by length: ``out[t]`` lists those of length t.

    Words are in canonical order (profile index order, lexicographic).
    """
    table = n.machine.base.table
    profiles = n.profiles.symbols
    layer = [((), n.initial_state)]
    out = [[()]]
    for _ in range(d):
        nxt = []
        for word, q in layer:
            for k, p in enumerate(profiles):
                r = table[q][k]
                if r != n.sink:
                    nxt.append((word + (p,), r))
        layer = nxt
        out.append([w for w, _ in layer])
    return out


def all_histories(moves: Sequence, d: int) -> list[list[tuple]]:
    return [list(itertools.product(moves, repeat=t)) for t in range(d + 1)]


def _state_of(n: NormalizedFip, word) -> int:
    q = n.initial_state
    for p in word:
        q = n.step(q, n.profiles.index(p))
    return q


# -- indistinguishability -------------------------------------------------------

def _canonical(classes: Iterable[Iterable[tuple]]) -> list[tuple]:
    return sorted(tuple(sorted(c)) for c in classes)


def partition_by_signature(game: FipGame, J: int, histories: Iterable[tuple]) -> list[tuple]:
    groups: dict = defaultdict(list)
    for h in histories:
        groups[view_signature(game, J, h, observation_traces(game, h))].append(h)
    return _canonical(groups.values())


def _recursive_keys(n: NormalizedFip, d: int, hist: list[list[tuple]]) -> dict[int, dict[tuple, Hashable]]:
    """key_J(tau c) = (K, key_K(tau), c restricted to K) with K the closure of J under c."""
    from .fip import sync_profile, members

    u = universe(n.num_players)
    keys: dict[int, dict[tuple, Hashable]] = {J: {(): ()} for J in u.coalitions}
    for t in range(1, d + 1):
        for h in hist[t]:
            tau, c = h[:-1], h[-1]
            for J in u.coalitions:
                K = sync_profile(n.base, J, c)
                keys[J][h] = (K, keys[K][tau], tuple(c[i] for i in members(K)))
    return keys


def brute_indist(n: NormalizedFip, J: int, d: int, max_depth: int = DEFAULT_MAX_DEPTH,
                 histories: list[list[tuple]] | None = None) -> list[list[tuple]]:
    """Partition of the feasible histories of each length ``<= d`` for coalition ``J``.

    Computed by grouping view signatures (with every member literally checked
    against its class representative) and, independently, by the one-move
    recursion on sync closures; the two must coincide.
    """
    _check_depth(d, max_depth)
    hist = histories if histories is not None else feasible_histories(n, d)
    keys = _recursive_keys(n, d, hist)
    result = []
    for t in range(d + 1):
        by_sig = partition_by_signature(n.base, J, hist[t])
        for cls in by_sig:
            rep = cls[0]
            for h in cls[1:]:
                if not indistinguishable(n.base, J, rep, h):
                    raise AssertionError(f"signature grouping merged distinguishable {rep} and {h}")
        groups: dict = defaultdict(list)
        for h in hist[t]:
            groups[keys[J][h]].append(h)
        by_key = _canonical(groups.values())
        if by_key != by_sig:
            raise AssertionError(f"partitions disagree at length {t} for coalition {J}")
        result.append(by_sig)
    return result


def class_index(partition: list[tuple]) -> dict[tuple, int]:
    return {h: i for i, cls in enumerate(partition) for h in cls}


# -- the knowledge function by definition ------------------------------------------

def brute_h(n: NormalizedFip, d: int, max_depth: int = 5,
            histories: list[list[tuple]] | None = None) -> dict[tuple, KnowledgeConfig]:
    _check_depth(d, max_depth)
    u = universe(n.num_players)
    hist = histories if histories is not None else feasible_histories(n, d)
    parts = {J: brute_indist(n, J, d, max(max_depth, d), hist) for J in u.coalitions if J != u.full}
    out: dict[tuple, KnowledgeConfig] = {}
    for t in range(d + 1):
        vals: dict[int, dict[tuple, object]] = {u.full: {h: intern(u.full, {_state_of(n, h)}) for h in hist[t]}}
        for J in u.by_size[1:]:
            vals[J] = {}
            for cls in parts[J][t]:
                v = intern(J, {tuple(vals[K][h] for K in u.up[J]) for h in cls})
                for h in cls:
                    vals[J][h] = v
        for h in hist[t]:
            out[h] = KnowledgeConfig(u, tuple(vals[J][h] for J in u.coalitions))
    return out


def delta_iterate(n: NormalizedFip, d: int, histories: list[list[tuple]] | None = None) -> dict[tuple, KnowledgeConfig]:
    eng = n.knowledge()
    hist = histories if histories is not None else feasible_histories(n, d)
    out = {(): eng.initial_config()}
    for t in range(1, d + 1):
        for h in hist[t]:
            out[h] = eng.delta(out[h[:-1]], h[-1])
    return out


def morphism_mismatches(n: NormalizedFip, d: int) -> list[tuple]:
    hist = feasible_histories(n, d)
    bh = brute_h(n, d, max(5, d), hist)
    dh = delta_iterate(n, d, hist)
    return [h for h in bh if bh[h] != dh[h]]


# -- algebraic identities on enumerated data ----------------------------------------

def rectangularity_violations(h: dict, partition: list[list[tuple]]) -> list[tuple]:
    """Pairs with equal images whose classes have different images."""
    bad = []
    for classes in partition:
        image_of: dict = {}
        for cls in classes:
            img = frozenset(h[x] for x in cls)
            for x in cls:
                prev = image_of.setdefault(h[x], (img, x))
                if prev[0] != img:
                    bad.append((prev[1], x))
    return bad


def image_relation(h: dict, partition: list[list[tuple]]) -> list[set]:
    """Per length, the pairs (h(x), h(y)) over indistinguishable x, y."""
    rels = []
    for classes in partition:
        rel = set()
        for cls in classes:
            imgs = {h[x] for x in cls}
            rel.update(itertools.product(imgs, imgs))
        rels.append(rel)
    return rels


def equivalence_violations(rel: set) -> list[str]:
    elems = {x for pair in rel for x in pair}
    bad = []
    if any((x, x) not in rel for x in elems):
        bad.append("reflexivity")
    if any((y, x) not in rel for x, y in rel):
        bad.append("symmetry")
    succ = defaultdict(set)
    for x, y in rel:
        succ[x].add(y)
    if any(z not in succ[x] for x in succ for y in succ[x] for z in succ[y]):
        bad.append("transitivity")
    return bad


def class_image_violations(h: dict, partition: list[list[tuple]]) -> list[tuple]:
    bad = []
    for classes, rel in zip(partition, image_relation(h, partition)):
        succ = defaultdict(set)
        for x, y in rel:
            succ[x].add(y)
        for cls in classes:
            img = {h[x] for x in cls}
            for x in cls:
                if succ[h[x]] != img:
                    bad.append(x)
    return bad


def lift_population(configs: Iterable[KnowledgeConfig]) -> set:
    """Every knowledge value occurring anywhere inside the given configurations."""
    seen = set()
    stack = [v for p in configs for v in p.values]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        for item in v.items:
            if isinstance(item, tuple):
                stack.extend(item)
    return seen


def _subsets(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def lift_violations(num_players: int, values: Iterable) -> dict[str, int]:
    """Identity, renaming and compositionality of lift over a value population."""
    u = universe(num_players)
    bad = {"identity": 0, "renaming": 0, "compositionality": 0}
    for psi in values:
        X = psi.sort
        for J in u.coalitions:
            if J & ~X:
                continue
            if J == X and u.lift(0, J, psi) is not psi:
                bad["identity"] += 1
            seen = None
            for S in _subsets(X):
                if J | S != X:
                    continue
                got = u.lift(S, J, psi)
                if S & ~J == 0 and got is not psi:
                    bad["identity"] += 1
                if seen is None:
                    seen = got
                elif got is not seen:
                    bad["renaming"] += 1
            for S in _subsets(X):
                for T in _subsets(X):
                    if J | S | T != X:
                        continue
                    inner = u.lift(T, J | S, psi)
                    if u.lift(S, J, inner) is not u.lift(S | T, J, psi):
                        bad["compositionality"] += 1
    return bad


# -- information tree ---------------------------------------------------------------

@dataclass
class BoundedInfoTree:
    """Information sets by depth with action-labeled edges and colors."""

    classes: list[list[tuple]]
    edges: list[dict[int, dict[Hashable, set[int]]]]
    colors: list[list[Hashable]]

    def successors(self, t: int, i: int) -> set[int]:
        return set().union(*self.edges[t].get(i, {}).values()) if self.edges[t].get(i) else set()

    def class_of(self, h: tuple) -> tuple[int, int]:
        t = len(h)
        if t >= len(self.classes):
            raise KeyError(h)
        for i, cls in enumerate(self.classes[t]):
            if h in cls:
                return t, i
        raise KeyError(h)


def info_tree(n: NormalizedFip, d: int, max_depth: int = DEFAULT_MAX_DEPTH,
              histories: list[list[tuple]] | None = None) -> BoundedInfoTree:
    hist = histories if histories is not None else feasible_histories(n, d)
    part = brute_indist(n, coalition(0), d, max_depth, hist)
    idx = [class_index(p) for p in part]
    colors = []
    for t, classes in enumerate(part):
        row = []
        for cls in classes:
            cs = {n.state_color[_state_of(n, h)] for h in cls}
            if len(cs) != 1:
                raise AssertionError(f"coloring not constant on an information set at depth {t}")
            row.append(cs.pop())
        colors.append(row)
    edges = []
    for t in range(d):
        row: dict[int, dict] = defaultdict(lambda: defaultdict(set))
        for h in hist[t + 1]:
            row[idx[t][h[:-1]]][n.act[h[-1]]].add(idx[t + 1][h])
        edges.append({i: dict(v) for i, v in row.items()})
    edges.append({})
    return BoundedInfoTree(part, edges, colors)


def node_map(n: NormalizedFip, a: Arena, tree: BoundedInfoTree) -> list[list[int]]:
    """Arena node of every information set; all members must agree."""
    dh = delta_iterate(n, len(tree.classes) - 1, None)
    out = []
    for t, classes in enumerate(tree.classes):
        row = []
        for cls in classes:
            nodes = {a.node_of(dh[h]) for h in cls}
            if len(nodes) != 1:
                raise AssertionError(f"information set at depth {t} spans arena nodes {sorted(nodes)}")
            row.append(nodes.pop())
        out.append(row)
    return out


def zig_zag_violations(n: NormalizedFip, a: Arena, tree: BoundedInfoTree) -> list[str]:
    f = node_map(n, a, tree)
    bad = []
    for t in range(len(tree.classes) - 1):
        for i in range(len(tree.classes[t])):
            v = f[t][i]
            tree_edges = tree.edges[t].get(i, {})
            if a.colors[v] != tree.colors[t][i]:
                bad.append(f"color mismatch at depth {t} set {i}")
            for act, succ in tree_edges.items():
                for j in succ:
                    if f[t + 1][j] not in a.successors(v, act):
                        bad.append(f"zig: depth {t} set {i} --{act}--> set {j} has no arena image")
            for act, targets in a.edges[v].items():
                images = {f[t + 1][j] for j in tree_edges.get(act, ())}
                for w in targets:
                    if w not in images:
                        bad.append(f"zag: node {v} --{act}--> {w} unmatched at depth {t} set {i}")
    return bad


# -- strategies on the source game ----------------------------------------------------

@dataclass
class Verdict:
    ok: bool
    counterexample: tuple | None = None
    reason: str = ""
    checked: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _information_sets(game: FipGame, d: int) -> list[list[tuple]]:
    hists = all_histories(game.moves, d)
    return [partition_by_signature(game, coalition(0), hs) for hs in hists]


def check_information_consistent(game: FipGame, s: Strategy, horizon: int,
                                 parts: list[list[tuple]] | None = None) -> tuple | None:
    """A pair of indistinguishable histories on which ``s`` differs, if any."""
    parts = parts if parts is not None else _information_sets(game, horizon)
    for classes in parts:
        for cls in classes:
            first = s.decide(cls[0])
            for h in cls[1:]:
                if s.decide(h) != first:
                    return (cls[0], h)
    return None


def verify_strategy(game: FipGame, s: Strategy, horizon: int, check_consistency: bool = True) -> Verdict:
    """Exhaustive playout check up to ``horizon`` moves."""
    if check_consistency:
        pair = check_information_consistent(game, s, horizon)
        if pair is not None:
            return Verdict(False, pair, "strategy is not information consistent")
    if game.condition.kind == "reachability":
        w = _losing_reach_play(game, s, horizon)
        if w is not None:
            return Verdict(False, w, f"no target color within {horizon} moves")
        return Verdict(True, reason="every play reaches a target")
    w = _odd_lasso(game, s, horizon)
    if w is not None:
        return Verdict(False, w, "play ends in a cycle whose least priority is odd")
    return Verdict(True, reason=f"no losing lasso of length <= {horizon}")


def _moves_for(game: FipGame, action) -> list[int]:
    return [k for k, c in enumerate(game.moves) if game.act[c] == action]


def _losing_reach_play(game: FipGame, s: Strategy, horizon: int) -> tuple | None:
    targets = game.condition.targets
    sm, cm = s.machine, game.coloring
    moves = game.moves.symbols
    doomed: set = set()

    def search(sq, cq, action, left):
        # returns a losing continuation or None
        if left == 0:
            return ()
        key = (sq, cq, action, left)
        if key in doomed:
            return None
        for k in _moves_for(game, action):
            if cm.out[cq][k] in targets:
                continue
            rest = search(sm.base.table[sq][k], cm.base.table[cq][k], sm.out[sq][k], left - 1)
            if rest is not None:
                return (moves[k],) + rest
        doomed.add(key)
        return None

    return search(sm.base.initial, cm.base.initial, s.first_action, horizon)


def _odd_lasso(game: FipGame, s: Strategy, horizon: int) -> tuple | None:
    prio = game.condition.priorities
    sm, cm = s.machine, game.coloring
    moves = game.moves.symbols
    path: list = []
    colors: list = []
    on_path: dict = {}

    def search(sq, cq, action):
        state = (sq, cq, action)
        if state in on_path:
            loop = colors[on_path[state]:]
            if min(prio[c] for c in loop) % 2 == 1:
                return tuple(path)
            return None
        if len(path) >= horizon:
            return None
        on_path[state] = len(path)
        for k in _moves_for(game, action):
            path.append(moves[k])
            colors.append(cm.out[cq][k])
            found = search(sm.base.table[sq][k], cm.base.table[cq][k], sm.out[sq][k])
            path.pop()
            colors.pop()
            if found is not None:
                del on_path[state]
                return found
        del on_path[state]
        return None

    return search(sm.base.initial, cm.base.initial, s.first_action)


def exists_consistent_strategy(game: FipGame, horizon: int) -> bool:
    """AND-OR search over information sets for a reachability strategy.

    A decision function that depends only on the information set wins iff
    some action at each set sends every live history (no target yet) into
    sets from which the search succeeds within the horizon.
    """
    if game.condition.kind != "reachability":
        raise ValueError("brute strategy search handles reachability only")
    targets = game.condition.targets
    parts = _information_sets(game, horizon)
    idx = [class_index(p) for p in parts]
    hit: dict[tuple, bool] = {(): False}
    cm = game.coloring
    cstate = {(): cm.base.initial}
    for t in range(1, horizon + 1):
        for cls in parts[t]:
            for h in cls:
                q = cstate[h[:-1]]
                k = game.moves.index(h[-1])
                cstate[h] = cm.base.table[q][k]
                hit[h] = hit[h[:-1]] or cm.out[q][k] in targets
    memo: dict = {}

    def wins(t: int, i: int) -> bool:
        key = (t, i)
        if key in memo:
            return memo[key]
        live = [h for h in parts[t][i] if not hit[h]]
        if not live:
            res = True
        elif t == horizon:
            res = False
        else:
            res = False
            for a in game.actions:
                succ = {idx[t + 1][h + (c,)] for h in parts[t][i] for c in game.moves if game.act[c] == a}
                if all(wins(t + 1, j) for j in succ):
                    res = True
                    break
        memo[key] = res
        return res

    return wins(0, 0)


# -- tiny arenas ------------------------------------------------------------------------

def _reachable(succ: list[list[int]], start: int, allowed=None) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in succ[v]:
            if w not in seen and (allowed is None or w in allowed):
                seen.add(w)
                stack.append(w)
    return seen


def _has_cycle_through(succ: list[list[int]], nodes: set[int], through: set[int]) -> bool:
    for v in through & nodes:
        for w in succ[v]:
            if w in nodes and v in _reachable(succ, w, nodes):
                return True
    return False


def brute_solve(a: Arena, condition) -> str:
    """Winner by enumerating positional strategies of player 0."""
    if len(a) > MAX_BRUTE_NODES:
        raise TooLarge(f"{len(a)} nodes; brute force handles at most {MAX_BRUTE_NODES}")
    from .normalize import ESCAPED

    for choice in itertools.product(*(a.available(v) for v in a.nodes)):
        succ = [list(a.edges[v][choice[v]]) for v in a.nodes]
        if condition.kind == "reachability":
            goal = {v for v in a.nodes if a.colors[v] in condition.targets or a.colors[v] == ESCAPED}
            if a.initial in goal:
                return PLAYER_WINS
            free = {v for v in a.nodes if v not in goal}
            region = _reachable(succ, a.initial, free)
            if not _has_cycle_through(succ, region, region):
                return PLAYER_WINS
        else:
            prio = {**condition.priorities, ESCAPED: 0, None: 0}
            region = _reachable(succ, a.initial)
            ok = True
            for p in sorted({prio[a.colors[v]] for v in region}):
                if p % 2 == 0:
                    continue
                sub = {v for v in region if prio[a.colors[v]] >= p}
                if _has_cycle_through(succ, sub, {v for v in sub if prio[a.colors[v]] == p}):
                    ok = False
                    break
            if ok:
                return PLAYER_WINS
    return PLAYER_LOSES


def game_tree_reach(a: Arena, targets) -> str:
    """Minimax over plays of at most ``len(a)`` moves."""
    from .normalize import ESCAPED

    goal = set(targets) | {ESCAPED}
    memo: dict = {}

    def win(v: int, k: int) -> bool:
        if a.colors[v] in goal:
            return True
        if k == 0:
            return False
        key = (v, k)
        if key not in memo:
            memo[key] = any(all(win(w, k - 1) for w in succ) for succ in a.edges[v].values())
        return memo[key]

    return PLAYER_WINS if win(a.initial, len(a)) else PLAYER_LOSES
