"""Command-line front end.

Exit codes: 0 player wins / check passed, 1 player loses / invalid input
game or relation / failed check, 2 unreadable or schema-invalid file,
3 exploration limit reached.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import arena as arena_mod
from . import oracle
from .automata import UnknownLetter
from .fip import coalition, format_coalition, validate
from .io import (SchemaError, condition_from_json, game_to_json, load_game, load_twotape, normalized_to_json,
                 read_json, strategy_from_json, strategy_to_json, twotape_to_json, write_json)
from .knowledge import render_config
from .normalize import InvalidGame, normalize
from .solve import extract_strategy, solve, strategy_table
from .twotape import fip_to_2dfa, is_indist_relation

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_LIMIT = 0, 1, 2, 3


def _visibility(args) -> str:
    return getattr(args, "strict_visibility", "global")


def _normalized(args):
    game = load_game(args.game)
    if getattr(args, "condition_override", None):
        raw = args.condition_override
        doc = read_json(raw) if Path(raw).exists() else json.loads(raw)
        from .io import check_schema
        check_schema(doc, "condition")
        game.condition = condition_from_json(doc)
    return game, normalize(game, _visibility(args))


def cmd_validate(args) -> int:
    game = load_game(args.game)
    problems = validate(game, _visibility(args))
    if not problems:
        print(f"{args.game}: valid ({game.num_players} players, {len(game.moves)} moves)")
        return EXIT_OK
    for p in problems:
        extra = f" witness={list(p.witness)}" if p.witness else ""
        print(f"{p.kind}: {p.message}{extra}")
    return EXIT_FAIL


def cmd_normalize(args) -> int:
    _, n = _normalized(args)
    doc = normalized_to_json(n)
    if args.out:
        write_json(args.out, doc)
        print(f"{len(n.profiles)} profiles, {n.machine.base.num_states} machine states -> {args.out}")
    else:
        print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_inspect(args) -> int:
    game, n = _normalized(args)
    history = [c for c in args.history.split(",") if c] if args.history else []
    profiles = n.profile_of(history)
    eng = n.knowledge()
    p = eng.run(profiles)
    print("profiles: " + " ".join("(" + ",".join(map(str, q)) + ")" for q in profiles))
    print(render_config(p, lambda q: f"q{q}"))
    return EXIT_OK


def cmd_arena(args) -> int:
    _, n = _normalized(args)
    a = arena_mod.build(n, args.max_nodes)
    if args.dot:
        Path(args.dot).write_text(arena_mod.export_dot(a))
    if args.json:
        write_json(args.json, arena_mod.to_json(a))
    print(json.dumps(a.stats()))
    return EXIT_OK


def cmd_synth(args) -> int:
    game, n = _normalized(args)
    a = arena_mod.build(n, args.max_nodes)
    if args.dot:
        Path(args.dot).write_text(arena_mod.export_dot(a))
    r = solve(a, n.condition)
    print(f"arena: {len(a)} nodes, {a.num_edges()} edges; winning region {len(r.region)} nodes")
    if not r.player_wins:
        print("player-loses")
        return EXIT_FAIL
    s = extract_strategy(n, a, r, max_states=args.max_nodes)
    print(f"player-wins; strategy with {s.machine.base.num_states} states")
    if args.out:
        write_json(args.out, strategy_to_json(s))
    if args.table:
        print(strategy_table(s))
    return EXIT_OK


def cmd_to2dfa(args) -> int:
    game = load_game(args.game)
    r = fip_to_2dfa(game)
    doc = twotape_to_json(r, f"indistinguishability relation of player 0 in {Path(args.game).name}")
    if args.out:
        write_json(args.out, doc)
        print(f"{r.num_states} states -> {args.out}")
    else:
        print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_check2dfa(args) -> int:
    r = load_twotape(args.relation)
    d = is_indist_relation(r)
    if d.ok:
        print("ok: " + d.message)
        return EXIT_OK
    print(f"fails {d.axiom}: {d.message}")
    print("witness: " + json.dumps([list(map(str, w)) for w in d.witness]))
    return EXIT_FAIL


def cmd_oracle(args) -> int:
    game = load_game(args.game)
    n = normalize(game, _visibility(args))
    d = args.depth
    report: dict = {"depth": d, "checks": []}

    def record(name, ok, detail=None):
        entry = {"check": name, "pass": bool(ok)}
        if detail:
            entry["detail"] = detail
        report["checks"].append(entry)

    hist = oracle.feasible_histories(n, d)
    for J in n.knowledge().universe.coalitions:
        try:
            oracle.brute_indist(n, J, d, max(d, oracle.DEFAULT_MAX_DEPTH), hist)
            record(f"indistinguishability routes agree {format_coalition(J)}", True)
        except AssertionError as e:
            record(f"indistinguishability routes agree {format_coalition(J)}", False, str(e))
    hd = min(d, args.knowledge_depth)
    bad = oracle.morphism_mismatches(n, hd)
    record(f"knowledge update equals definition (depth {hd})", not bad, [list(map(str, h)) for h in bad[:3]])
    a = arena_mod.build(n, args.max_nodes)
    tree = oracle.info_tree(n, d, max(d, oracle.DEFAULT_MAX_DEPTH), hist)
    zz = oracle.zig_zag_violations(n, a, tree)
    record("information tree bisimilar to arena", not zz, zz[:3])
    rel = fip_to_2dfa(game)
    pairs_bad = 0
    from .fip import indistinguishable
    from .twotape import relation_accepts
    rd = min(d, args.relation_depth)
    for hs in oracle.all_histories(game.moves, rd):
        for t1 in hs:
            for t2 in hs:
                if relation_accepts(rel, t1, t2) != indistinguishable(game, coalition(0), t1, t2):
                    pairs_bad += 1
    record(f"two-tape relation matches view graphs (length {rd})", pairs_bad == 0)
    if args.verify:
        s = strategy_from_json(read_json(args.verify), game.moves)
        v = oracle.verify_strategy(game, s, args.horizon)
        record(f"strategy verified (horizon {args.horizon})", v.ok,
               None if v.ok else {"reason": v.reason, "play": list(map(str, v.counterexample))})
    report["pass"] = all(c["pass"] for c in report["checks"])
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["pass"] else EXIT_FAIL


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fipsynth", description="Strategy synthesis for FIP games.")
    sub = ap.add_subparsers(dest="command", required=True)

    def game_cmd(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("game")
        p.add_argument("--strict-visibility", choices=["global", "reachable"], default="global",
                       help="check action visibility on all or only on reachable player-0 states")
        p.set_defaults(fn=fn)
        return p

    def limits(p):
        p.add_argument("--max-nodes", type=int, default=None,
                       help="exploration limit (default: $FIPSYNTH_MAX_NODES or 2^20)")

    game_cmd("validate", cmd_validate, "check a game file")
    p = game_cmd("normalize", cmd_normalize, "emit the profile-normalized game")
    p.add_argument("--out")
    p = game_cmd("inspect", cmd_inspect, "print the knowledge configuration after a history")
    p.add_argument("--history", default="", help="comma-separated moves")
    p = game_cmd("arena", cmd_arena, "build the arena")
    p.add_argument("--dot")
    p.add_argument("--json")
    limits(p)
    p = game_cmd("synth", cmd_synth, "synthesize a winning strategy")
    p.add_argument("--out")
    p.add_argument("--dot")
    p.add_argument("--table", action="store_true", help="print the strategy transition table")
    p.add_argument("--condition-override", help="condition block as JSON text or a file path")
    limits(p)
    p = game_cmd("to-2dfa", cmd_to2dfa, "two-tape DFA of player 0's indistinguishability")
    p.add_argument("--out")
    p = sub.add_parser("check-2dfa", help="check that a two-tape DFA is an indistinguishability relation")
    p.add_argument("relation")
    p.set_defaults(fn=cmd_check2dfa)
    p = game_cmd("oracle", cmd_oracle, "cross-check the constructions by brute force")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--knowledge-depth", type=int, default=5)
    p.add_argument("--relation-depth", type=int, default=4)
    p.add_argument("--verify", help="strategy JSON to verify on the game")
    p.add_argument("--horizon", type=int, default=6)
    limits(p)
    return ap


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, SchemaError, UnknownLetter) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except InvalidGame as e:
        for p in e.problems:
            extra = f" witness={list(p.witness)}" if p.witness else ""
            print(f"{p.kind}: {p.message}{extra}")
        return EXIT_FAIL
    except arena_mod.LimitExceeded as e:
        print(f"limit: {e} {json.dumps(e.stats)}")
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
