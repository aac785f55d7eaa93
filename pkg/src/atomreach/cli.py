"""Command-line entry point: ``atomreach <command> <spec file> ...``.

Exit codes: 0 yes/success, 1 no, 2 usage or validation error, 3 width
budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .automata import Configuration, label_str, orbit_count, validate
from .errors import AtomreachError, WidthExceeded
from .logic import DEFAULT_MAX_WIDTH, Theory
from .oracle import FiniteUniverse, cross_check
from .reachability import decision_reachability, prestar_member, reach_decision
from .saturation import saturate
from .specfile import load, nfa_json, nfa_text

YES, NO, USAGE, WIDTH = 0, 1, 2, 3


class UsageError(AtomreachError):
    pass


def split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_items(text: str) -> list[tuple[str, str | None]]:
    """``k(1,2) l m(3)`` -> [("k", "1,2"), ("l", None), ("m", "3")]."""
    items, i, n = [], 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] != "(":
            j += 1
        name = text[i:j]
        if not name:
            raise UsageError(f"expected a name at {text[i:]!r}")
        args = None
        if j < n and text[j] == "(":
            depth, k = 0, j
            while k < n:
                if text[k] == "(":
                    depth += 1
                elif text[k] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                k += 1
            if k >= n:
                raise UsageError(f"unbalanced parentheses in {text!r}")
            args = text[j + 1:k]
            j = k + 1
        items.append((name, args))
        i = j
    return items


def parse_atoms(backend, args: str | None) -> tuple:
    if args is None or not args.strip():
        return ()
    return tuple(backend.parse_atom(a.strip()) for a in split_top(args, ","))


def parse_config(backend, text: str) -> Configuration:
    parts = split_top(text, "|")
    if len(parts) != 2:
        raise UsageError("a configuration looks like 'loc(atoms) | letter(atoms) letter(atoms) ...'")
    head = parse_items(parts[0])
    if len(head) != 1:
        raise UsageError(f"expected one location before '|', got {parts[0]!r}")
    loc, args = head[0]
    stack = tuple((k, parse_atoms(backend, a)) for k, a in parse_items(parts[1]))
    return Configuration(loc, parse_atoms(backend, args), stack)


def _say(flag: bool) -> int:
    print("yes" if flag else "no")
    return YES if flag else NO


def _require_valid(pds, nfa, theory):
    report = validate(pds, nfa, theory)
    if not report.ok:
        raise UsageError(f"validation failed:\n{report}")


def cmd_check(args, spec, theory) -> int:
    bad = False
    for name, nfa in spec.nfa.items():
        owner = spec.nfa_for[name]
        report = validate(spec.pds[owner], nfa, theory)
        if report.ok:
            print(f"nfa {name} for {owner}: valid")
        else:
            bad = True
            print(f"nfa {name} for {owner}: {len(report.violations)} violation(s)")
            for v in report.violations:
                print(f"  {v}")
    print(f"{len(spec.sets)} set(s), {len(spec.pds)} pds, {len(spec.nfa)} nfa")
    return USAGE if bad else YES


def cmd_saturate(args, spec, theory) -> int:
    pds, nfa = spec.get_pds(args.pds), spec.get_nfa(args.nfa)
    _require_valid(pds, nfa, theory)
    result = saturate(theory, pds, nfa)
    b = spec.backend
    if args.json:
        payload = {
            "iterations": result.iterations,
            "added": [{"transition": list(k), "clauses": n} for k, n in result.added_clauses.items()],
            "automaton": nfa_json(b, result.automaton, args.pds),
        }
        body = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [f"iterations: {result.iterations}", f"added clauses: {result.total_added}"]
        for (l, k, l2), n in result.added_clauses.items():
            d = result.automaton.delta[(l, k, l2)]
            before = nfa.transition(l, k, l2).clauses
            if (l, k, l2) in pds.pop:
                before = before | pds.pop[(l, k, l2)].clauses
            lines.append(f"  ({label_str(l)}, {label_str(k)}, {label_str(l2)}): {n}")
            for c in sorted(d.clauses - before):
                lines.append(f"    + {theory.render_clause(c, d.variables)}")
        lines.append("")
        lines.append(nfa_text(theory, args.nfa, args.pds, result.automaton))
        body = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(body)
        print(f"iterations: {result.iterations}")
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(body)
    return YES


def cmd_member(args, spec, theory) -> int:
    pds, nfa = spec.get_pds(args.pds), spec.get_nfa(args.nfa)
    _require_valid(pds, nfa, theory)
    config = parse_config(spec.backend, args.config)
    return _say(prestar_member(theory, pds, nfa, config))


def cmd_reach(args, spec, theory) -> int:
    pds = spec.get_pds(args.pds)
    head = parse_items(args.source)
    if len(head) != 1:
        raise UsageError("--from takes one location such as 'p' or 'p(1,2)'")
    src, src_args = head[0]
    bottom = parse_items(args.bottom)
    if len(bottom) != 1:
        raise UsageError("--bottom takes one letter such as 'k(any)' or 'k(1,2)'")
    letter, letter_args = bottom[0]
    if letter_args is not None and letter_args.strip() == "any":
        atoms = "any"
    else:
        atoms = parse_atoms(spec.backend, letter_args)
    state = None
    if src_args is not None and src_args.strip() != "any":
        state = parse_atoms(spec.backend, src_args)
    return _say(reach_decision(theory, pds, src, (letter, atoms), args.target, state))


def cmd_decide(args, spec, theory) -> int:
    pds = spec.get_pds(args.pds)
    b, c = spec.get_nfa(args.b), spec.get_nfa(args.c)
    _require_valid(pds, b, theory)
    return _say(decision_reachability(theory, pds, b, c))


def cmd_orbits(args, spec, theory) -> int:
    if args.set:
        print(orbit_count(spec.get_set(args.set)))
    else:
        print(len(theory.legal_clauses(args.width)))
    return YES


def cmd_oracle(args, spec, theory) -> int:
    pds, nfa = spec.get_pds(args.pds), spec.get_nfa(args.nfa)
    _require_valid(pds, nfa, theory)
    if args.universe:
        universe = FiniteUniverse.parse(spec.backend, split_top(args.universe, ","))
    else:
        universe = FiniteUniverse.default(spec.backend)
    report = cross_check(theory, universe, pds, nfa, args.stack_bound)
    if args.json:
        print(json.dumps({
            "checked": report.checked,
            "explicit_members": report.explicit_accepted,
            "symbolic_members": report.symbolic_accepted,
            "classical": report.classical,
            "automata_equal": report.automata_equal,
            "transitions_contained": report.transitions_contained,
            "violations": report.violations,
        }, indent=2))
    else:
        print(report.summary())
    return YES if report.ok else NO


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="spec file (.json for the JSON export)")
    common.add_argument("--max-width", type=int, default=DEFAULT_MAX_WIDTH, help="width budget (default %(default)s)")

    parser = argparse.ArgumentParser(prog="atomreach", description="Reachability for pushdown systems over atoms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parse and validate a spec file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("saturate", parents=[common], help="saturate an automaton under a pds")
    p.add_argument("--pds", required=True)
    p.add_argument("--nfa", required=True)
    p.add_argument("--json", action="store_true", help="JSON output")
    p.add_argument("-o", "--output", help="write the result to this file")
    p.set_defaults(run=cmd_saturate)

    p = sub.add_parser("member", parents=[common], help="is a configuration a predecessor of the language?")
    p.add_argument("--pds", required=True)
    p.add_argument("--nfa", required=True)
    p.add_argument("--config", required=True, help="e.g. 'lI | k(2) k(1) k(3)'")
    p.set_defaults(run=cmd_member)

    p = sub.add_parser("reach", parents=[common], help="can (loc, bottom letter) reach a location?")
    p.add_argument("--pds", required=True)
    p.add_argument("--from", dest="source", required=True, help="location, optionally with atoms: 'p' or 'p(1,2)'")
    p.add_argument("--bottom", required=True, help="'k(any)' or 'k(atoms)'")
    p.add_argument("--to", dest="target", required=True)
    p.set_defaults(run=cmd_reach)

    p = sub.add_parser("decide", parents=[common], help="does some configuration of C reach one of B?")
    p.add_argument("--pds", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True)
    p.set_defaults(run=cmd_decide)

    p = sub.add_parser("orbits", parents=[common], help="count orbits of a set or of atom tuples")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--set", help="a declared set, or PDS.letters / PDS.locations / NFA.states")
    g.add_argument("--atoms", action="store_true", help="count orbits of n-tuples of atoms")
    p.add_argument("--width", type=int, default=1)
    p.set_defaults(run=cmd_orbits)

    p = sub.add_parser("oracle", parents=[common], help="cross-check against explicit saturation")
    p.add_argument("--pds", required=True)
    p.add_argument("--nfa", required=True)
    p.add_argument("--universe", help="comma-separated atoms (default depends on the atoms)")
    p.add_argument("--stack-bound", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = load(args.file, args.max_width)
        theory = Theory(spec.backend, args.max_width)
        return args.run(args, spec, theory)
    except WidthExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return WIDTH
    except (AtomreachError, ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
