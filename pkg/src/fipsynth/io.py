"""JSON documents for games, two-tape DFAs, strategies and machines."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Hashable

import jsonschema

from .automata import Alphabet, Dfa, MealyMachine, SemiAutomaton, build_semi
from .fip import FipGame, WinningCondition
from .normalize import NormalizedFip
from .strategy import Strategy
from .twotape import TwoTapeDfa, pair_alphabet

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    pass


@lru_cache(maxsize=None)
def schema() -> dict:
    return json.loads(resources.files("fipsynth").joinpath("schema.json").read_text())


def check_schema(doc, kind: str) -> None:
    full = schema()
    sub = {"$defs": full["$defs"], "$ref": f"#/$defs/{kind}"}
    validator = jsonschema.Draft202012Validator(sub)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(map(str, e.absolute_path)) or "<root>"
        raise SchemaError(f"{kind} document invalid at {where}: {e.message}")


def read_json(path: str | Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: not valid JSON ({e.msg} at line {e.lineno}, column {e.colno})") from None


def write_json(path: str | Path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# -- machines ---------------------------------------------------------------------

def _split_key(key: str) -> tuple[str, str]:
    state, letter = key.split(",", 1)
    return state, letter


def _parse_map(raw: dict, parse_letter: Callable[[str], Hashable]) -> dict:
    out = {}
    for key, target in raw.items():
        state, letter = _split_key(key)
        out[state, parse_letter(letter)] = target
    return out


def semi_from_json(doc: dict, alphabet: Alphabet, parse_letter: Callable = str) -> SemiAutomaton:
    if "alphabet" in doc and [parse_letter(c) for c in doc["alphabet"]] != list(alphabet.symbols):
        raise SchemaError("machine alphabet differs from the declared moves")
    delta = _parse_map(doc["delta"], parse_letter)
    unknown = {c for _, c in delta if c not in alphabet}
    if unknown:
        raise SchemaError(f"transition on undeclared letter {sorted(map(str, unknown))[0]!r}")
    try:
        return build_semi(alphabet, doc["states"], doc["initial"], delta, doc.get("sink"))
    except ValueError as e:
        raise SchemaError(str(e)) from None


def mealy_from_json(doc: dict, alphabet: Alphabet, parse_letter: Callable = str) -> MealyMachine:
    semi = semi_from_json(doc, alphabet, parse_letter)
    lam = _parse_map(doc.get("lambda", {}), parse_letter)
    default = doc.get("default_output")
    out = []
    for name in semi.names:
        row = []
        for c in alphabet:
            o = lam.get((name, c), default)
            if o is None:
                raise SchemaError(f"missing output from {name!r} on {c!r}")
            row.append(o)
        out.append(row)
    return MealyMachine(semi, out)


def mealy_to_json(m: MealyMachine, letter: Callable = str, state: Callable = str) -> dict:
    names = [state(n) for n in m.base.names]
    # product states carry tuple labels; keys are "state,letter", so fall back to positions
    if len(set(names)) != len(names) or any("," in q for q in names):
        names = [f"s{q}" for q in range(m.base.num_states)]
    letters = [letter(c) for c in m.alphabet]
    return {
        "states": names,
        "alphabet": letters,
        "initial": names[m.base.initial],
        "delta": {f"{names[q]},{letters[k]}": names[r] for q, row in enumerate(m.base.table) for k, r in enumerate(row)},
        "lambda": {f"{names[q]},{letters[k]}": str(o) for q, row in enumerate(m.out) for k, o in enumerate(row)},
    }


# -- games --------------------------------------------------------------------------

def condition_from_json(doc: dict) -> WinningCondition:
    if doc["kind"] == "reachability":
        return WinningCondition.reachability(doc["targets"])
    return WinningCondition.parity(doc["priorities"])


def condition_to_json(cond: WinningCondition) -> dict:
    if cond.kind == "reachability":
        return {"kind": "reachability", "targets": sorted(map(str, cond.targets))}
    return {"kind": "parity", "convention": "min-even", "priorities": {str(c): p for c, p in cond.priorities.items()}}


def game_from_json(doc: dict) -> FipGame:
    check_schema(doc, "game")
    moves = Alphabet(doc["moves"])
    undeclared = [c for c in doc["act"] if c not in moves]
    if undeclared:
        raise SchemaError(f"act names undeclared move {undeclared[0]!r}")
    obs = [mealy_from_json(m, moves) for m in doc["observations"]]
    coloring = mealy_from_json(doc["coloring"], moves)
    comm = {sigma: [tuple(link) for link in links] for sigma, links in doc["comm"].items()}
    return FipGame(moves, doc["actions"], doc["act"], obs, comm, coloring, condition_from_json(doc["condition"]))


def game_to_json(g: FipGame, description: str | None = None, letter: Callable = str) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "fip-game"}
    if description:
        doc["description"] = description
    doc.update({
        "moves": [letter(c) for c in g.moves],
        "actions": [str(a) for a in g.actions],
        "act": {letter(c): str(g.act[c]) for c in g.moves},
        "observations": [mealy_to_json(m, letter) for m in g.observations],
        "comm": {str(s): sorted([list(l) for l in links]) for s, links in g.comm.items()},
        "coloring": mealy_to_json(g.coloring, letter),
        "condition": condition_to_json(g.condition),
    })
    return doc


def profile_letter(p: tuple) -> str:
    return "|".join(map(str, p))


def normalized_to_json(n: NormalizedFip) -> dict:
    doc = game_to_json(n.base, "observation profiles of the source game; words leaving the feasible "
                              "set reach the absorbing escape state", profile_letter)
    doc["feasibility_accepting"] = [str(q) for q in sorted(n.feasibility.accepting)]
    return doc


# -- two-tape DFAs ---------------------------------------------------------------------

def _pair(s: str) -> tuple[str, str]:
    x, sep, y = s.partition("|")
    if not sep:
        raise SchemaError(f"pair letter {s!r} is not of the form x|y")
    return x, y


def twotape_from_json(doc: dict) -> TwoTapeDfa:
    check_schema(doc, "twotape")
    moves = Alphabet(doc["moves"])
    semi = semi_from_json(doc, pair_alphabet(moves), _pair)
    ids = {n: i for i, n in enumerate(semi.names)}
    unknown = [q for q in doc["accepting"] if q not in ids]
    if unknown:
        raise SchemaError(f"unknown accepting state {unknown[0]!r}")
    return TwoTapeDfa(Dfa(semi, [ids[q] for q in doc["accepting"]]), moves, doc.get("act"))


def twotape_to_json(r: TwoTapeDfa, description: str | None = None) -> dict:
    names = [f"s{q}" for q in range(r.num_states)]
    doc = {"schema_version": SCHEMA_VERSION, "kind": "two-tape-dfa"}
    if description:
        doc["description"] = description
    doc.update({
        "moves": list(map(str, r.moves)),
        "states": names,
        "initial": names[r.dfa.base.initial],
        "delta": {f"{names[q]},{x}|{y}": names[t]
                  for q, row in enumerate(r.dfa.base.table) for (x, y), t in zip(r.dfa.alphabet, row)},
        "accepting": [names[q] for q in sorted(r.dfa.accepting)],
    })
    if r.act is not None:
        doc["act"] = {str(c): str(a) for c, a in r.act.items()}
    return doc


# -- strategies -----------------------------------------------------------------------

def strategy_to_json(s: Strategy) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "strategy",
        "first_action": str(s.first_action),
        "denormalized": s.denormalized,
        "machine": mealy_to_json(s.machine),
    }


def strategy_from_json(doc: dict, moves: Alphabet) -> Strategy:
    check_schema(doc, "strategy")
    return Strategy(mealy_from_json(doc["machine"], moves), doc["first_action"], doc.get("denormalized", False))


def load_game(path) -> FipGame:
    return game_from_json(read_json(path))


def load_twotape(path) -> TwoTapeDfa:
    return twotape_from_json(read_json(path))
