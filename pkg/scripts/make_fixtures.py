"""Regenerate the JSON fixtures in ../fixtures.

Games are written as small Python step functions and expanded into the
explicit transition tables of the file format.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def mealy(states, initial, moves, step):
    """``step(state, move) -> (next_state, output)`` expanded to a table."""
    seen = [initial]
    delta, lam = {}, {}
    for s in seen:
        for c in moves:
            t, o = step(s, c)
            if t not in seen:
                seen.append(t)
            delta[f"{s},{c}"] = t
            lam[f"{s},{c}"] = o
    assert set(seen) <= set(states), set(seen) - set(states)
    return {"states": seen, "initial": initial, "delta": delta, "lambda": lam}


def stateless(moves, out):
    return mealy(["s"], "s", moves, lambda s, c: ("s", out(c)))


def game(description, moves, actions, act, observations, comm, coloring, condition):
    return {
        "schema_version": 1,
        "kind": "fip-game",
        "description": description,
        "moves": moves,
        "actions": actions,
        "act": act,
        "observations": observations,
        "comm": comm,
        "coloring": coloring,
        "condition": condition,
    }


def peek():
    moves = ["a", "b", "c"]

    def color(s, c):
        if c == "a":
            return ("odd" if s == "even" else "even"), "idle"
        if c == "b":
            return s, "idle"
        return s, s

    return game(
        "Player 0 sees only whether c occurred; on c it reads the full view of an observer who sees every move.",
        moves, ["x", "y"], {"a": "x", "b": "x", "c": "y"},
        [stateless(moves, lambda c: "c" if c == "c" else "-"), stateless(moves, lambda c: c)],
        {"-": [], "a": [], "b": [], "c": [[0, 1]]},
        mealy(["even", "odd"], "even", moves, color),
        {"kind": "reachability", "targets": ["even"]},
    )


def sync_reach(linked: bool):
    actions = ["wait", "guessA", "guessB"]
    moves = [f"{a}{bit}" for a in actions for bit in "01"]
    act = {m: m[:-1] for m in moves}
    secret_of = {"0": "guessA", "1": "guessB"}

    def p0(s, c):
        a, bit = c[:-1], c[-1]
        if s == "r1":
            return f"r2{bit}", a
        if s.startswith("r2"):
            return "r3" + s[2], a + "*"
        if s.startswith("r3") and a != "wait":
            right = secret_of[s[2]] == a
            return "done", a + (":right" if right else ":wrong")
        return s, a

    def p1(s, c):
        return ("later", c[-1]) if s == "first" else ("later", "-")

    def color(s, c):
        a, bit = c[:-1], c[-1]
        if s == "r1":
            return f"r2{bit}", "idle"
        if s.startswith("r2"):
            return "r3" + s[2], "idle"
        if s.startswith("r3"):
            if a == "wait":
                return s, "idle"
            return ("goal", "goal") if secret_of[s[2]] == a else ("lost", "lost")
        return s, s

    obs0 = mealy(["r1", "r20", "r21", "r30", "r31", "done"], "r1", moves, p0)
    obs1 = mealy(["first", "later"], "first", moves, p1)
    sync_links = [[0, 1]] if linked else []
    comm = {}
    for a in actions:
        comm[a] = []
        comm[a + "*"] = sync_links
    for a in actions[1:]:
        comm[a + ":right"] = []
        comm[a + ":wrong"] = []
    comm.update({"0": [], "1": [], "-": []})
    what = "reads observer 1's view in round 2" if linked else "never communicates"
    return game(
        f"Round 1 fixes a secret bit seen only by observer 1; player 0 {what}; "
        "from round 3 a matching guess reaches the goal and a wrong one loses for good.",
        moves, actions, act, [obs0, obs1], comm,
        mealy(["r1", "r20", "r21", "r30", "r31", "goal", "lost"], "r1", moves, color),
        {"kind": "reachability", "targets": ["goal"]},
    )


def chain():
    moves = ["a", "b", "e", "c", "d"]
    out0 = {"a": "-", "b": "-", "e": "-", "c": "c", "d": "d"}
    out1 = {"a": "a", "b": "-", "e": "-", "c": "c", "d": "d"}

    def color(s, c):
        pa, pe = s.split("/")
        if c == "a":
            return f"{1 - int(pa)}/{pe}", "idle"
        if c == "e":
            return f"{pa}/{1 - int(pe)}", "idle"
        if c == "b":
            return s, "idle"
        if c == "d":
            return s, "a-even" if pa == "0" else "a-odd"
        return s, "e-even" if pe == "0" else "e-odd"

    return game(
        "Links chain 0->1->2 on c and reach only 0->1 on d; observer 1 sees a, observer 2 sees everything.",
        moves, ["x", "y", "z"], {"a": "x", "b": "x", "e": "x", "c": "y", "d": "z"},
        [stateless(moves, out0.__getitem__), stateless(moves, out1.__getitem__), stateless(moves, lambda c: c)],
        {"-": [], "a": [], "b": [], "e": [], "c": [[0, 1], [1, 2]], "d": [[0, 1]]},
        mealy(["0/0", "0/1", "1/0", "1/1"], "0/0", moves, color),
        {"kind": "parity", "convention": "min-even",
         "priorities": {"idle": 3, "a-even": 2, "a-odd": 1, "e-even": 0, "e-odd": 3}},
    )


def hier4():
    moves = ["a", "b", "c", "#"]

    def p0(s, c):
        block, synced = int(s[0]), s[1] == "s"
        if c == "#":
            if block < 3:
                return f"{block + 1}u", "#"
            return s, "#"
        if c == "c":
            return f"{block}s", f"c{block}"
        return s, (f"{c}{block}" if synced else "-")

    def observer(k):
        def step(s, c):
            block = int(s)
            nxt = str(min(block + 1, 3)) if c == "#" else s
            mine = block == k
            return nxt, (c if mine and c != "#" else "-")
        return mealy(["1", "2", "3"], "1", moves, step)

    comm = {"-": [], "#": [], "a": [], "b": []}
    for k in (1, 2, 3):
        comm[f"c{k}"] = [[0, k]]
        comm[f"a{k}"] = []
        comm[f"b{k}"] = []
    comm["c"] = []
    return game(
        "Blocks separated by #; observer k sees the moves of block k (observer 3 of every block from the third "
        "on); player 0 sees #, sees c and then reads the observer of the current block.",
        moves, ["go", "sep"], {"a": "go", "b": "go", "c": "go", "#": "sep"},
        [mealy(["1u", "1s", "2u", "2s", "3u", "3s"], "1u", moves, p0)] + [observer(k) for k in (1, 2, 3)],
        comm,
        stateless(moves, lambda c: "idle"),
        {"kind": "parity", "convention": "min-even", "priorities": {"idle": 0}},
    )


# -- two-tape DFAs transcribed from state diagrams -------------------------------

def twotape(description, moves, states, initial, accepting, edges, sink=None, act=None):
    delta = {}
    for src, pairs, dst in edges:
        for x, y in pairs:
            key = f"{src},{x}|{y}"
            assert key not in delta, key
            delta[key] = dst
    doc = {"schema_version": 1, "kind": "two-tape-dfa", "description": description, "moves": moves,
           "states": states, "initial": initial, "delta": delta, "accepting": accepting}
    if sink:
        doc["sink"] = sink
    if act:
        doc["act"] = act
    return doc


def pairs(xs, ys=None):
    ys = xs if ys is None else ys
    return [(x, y) for x in xs for y in ys]


def diagonal(xs):
    return [(x, x) for x in xs]


def differ(xs):
    return [(x, y) for x in xs for y in xs if x != y]


def fig5c():
    m = ["a", "b", "c"]
    return twotape(
        "Player 0 tells a from b only by reading the observer's view on c. "
        "q4's self-loops on {a,b}x{a,b} are not drawn in the source diagram; they are completed here "
        "so that histories stay related until the next c.",
        m, ["q3", "q4", "x"], "q3", ["q3", "q4"],
        [("q3", diagonal(m), "q3"),
         ("q3", [("a", "b"), ("b", "a")], "q4"),
         ("q3", [("a", "c"), ("b", "c"), ("c", "a"), ("c", "b")], "x"),
         ("q4", pairs(["a", "b"]), "q4"),
         ("q4", [p for p in pairs(m) if "c" in p], "x"),
         ("x", pairs(m), "x")],
        act={"a": "x", "b": "x", "c": "y"},
    )


AB_SEP = [("a", "b"), ("b", "a"), ("a", "#"), ("#", "a"), ("b", "#"), ("#", "b")]
WITH_C = [p for p in pairs(["a", "b", "c", "#"]) if "c" in p]


def fig8():
    m = ["a", "b", "c", "#"]
    return twotape(
        "Blocks separated by a common #: within the current block histories are related while they agree "
        "or until a c occurs.",
        m, ["q1", "q2", "q3", "rej"], "q1", ["q1", "q2", "q3"],
        [("q1", diagonal(["a", "b", "#"]), "q1"),
         ("q1", [("c", "c")], "q2"),
         ("q1", AB_SEP, "q3"),
         ("q1", [("a", "c"), ("b", "c"), ("#", "c"), ("c", "a"), ("c", "b"), ("c", "#")], "rej"),
         ("q2", diagonal(["a", "b", "c"]), "q2"),
         ("q2", [("#", "#")], "q1"),
         ("q2", differ(m), "rej"),
         ("q3", diagonal(["a", "b"]) + AB_SEP, "q3"),
         ("q3", [("#", "#")], "q1"),
         ("q3", WITH_C, "rej"),
         ("rej", pairs(m), "rej")],
    )


def fig9(separated=False):
    """``separated`` drops every pair mixing # with a letter (they fall to the sink)."""
    m = ["a", "b", "c", "#"]
    differ_ab = [("a", "b"), ("b", "a")] if separated else AB_SEP
    edges = []
    for cur, nxt in (("q", "p"), ("p", "r")):
        edges += [
            (f"{cur}1", diagonal(["a", "b"]), f"{cur}1"),
            (f"{cur}1", [("#", "#")], f"{nxt}1"),
            (f"{cur}1", [("c", "c")], f"{cur}2"),
            (f"{cur}1", differ_ab, f"{cur}3"),
            (f"{cur}2", diagonal(["a", "b", "c"]), f"{cur}2"),
            (f"{cur}2", [("#", "#")], f"{nxt}1"),
            (f"{cur}3", diagonal(["a", "b"]) + differ_ab, f"{cur}3"),
            (f"{cur}3", [("#", "#")], f"{nxt}1"),
        ]
    edges += [
        ("r1", diagonal(["a", "b", "#"]), "r1"),
        ("r1", [("c", "c")], "r2"),
        ("r1", differ_ab, "r3"),
        ("r2", diagonal(["a", "b", "c", "#"]), "r2"),
        ("r3", diagonal(["a", "b", "#"]) + differ_ab, "r3"),
    ]
    states = ["q1", "q2", "q3", "p1", "p2", "p3", "r1", "r2", "r3", "sink"]
    description = ("Three copies of the block automaton chained by (#,#); the last copy loops on (#,#). "
                   "Transitions not listed go to the rejecting sink.")
    if separated:
        description += (" Variant in which # on one tape must meet # on the other: the literal diagram "
                        "relates ##a#c to aaa#c and aaa#c to ##b#c but not ##a#c to ##b#c.")
    return twotape(
        description,
        m, states, "q1", states[:-1], edges, sink="sink",
    )


def mutate(doc, description, changes):
    out = json.loads(json.dumps(doc))
    out["description"] = description
    for key, target in changes.items():
        out["delta"][key] = target
    return out


def main():
    OUT.mkdir(exist_ok=True)
    docs = {
        "peek.json": peek(),
        "sync-reach.json": sync_reach(True),
        "nosync-reach.json": sync_reach(False),
        "chain.json": chain(),
        "hier4.json": hier4(),
        "fig5c.json": fig5c(),
        "fig8.json": fig8(),
        "fig9.json": fig9(),
        "fig9-separated.json": fig9(separated=True),
    }
    f5 = docs["fig5c.json"]
    docs["fig5c-no-cc-loop.json"] = mutate(f5, "fig5c with the (c,c) loop of q3 sent to the sink",
                                           {"q3,c|c": "x"})
    docs["fig5c-asymmetric.json"] = mutate(f5, "fig5c with (b,a) from q3 sent to the sink",
                                           {"q3,b|a": "x"})
    docs["fig5c-forgetful.json"] = mutate(f5, "fig5c with (a,a) from q4 sent to the sink",
                                          {"q4,a|a": "x"})
    unclosed = mutate(f5, "fig5c where q4 rejects but (a,a) leads back to q3", {"q4,a|a": "q3"})
    unclosed["accepting"] = ["q3"]
    docs["fig5c-unclosed.json"] = unclosed
    for name, doc in docs.items():
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")
        print("wrote", name)


if __name__ == "__main__":
    main()
