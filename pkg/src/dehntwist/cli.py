"""Command-line driver.

Exit codes: 0 success, 1 parse error, 2 a required move is not supported,
3 verification failure.  Results go to stdout as ``key: value`` records, one
per line; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .efficiency import (
    NotSupported,
    check_efficient,
    check_pointedly_efficient,
    corpus,
    euler_characteristic,
    make_efficient,
    measure,
)
from .freegroup import Basis, NotAnAutomorphism, format_word, parse_word, serialize_automorphism
from .gog import (
    GogError,
    dehn_twist,
    induced_automorphism,
    nielsen_gog,
    parse_gog,
    parse_pi1_basis,
    serialize_gog,
    stabilise,
    validate,
)
from .presentation import (
    PresentationError,
    abelianisation,
    parse_presentation,
    serialize_presentation,
    tietze_simplify,
)
from .whitehead import ClassTuple, are_equivalent, minimize

EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_VERIFY = 0, 1, 2, 3


class ParseFailure(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise ParseFailure(str(exc)) from exc


def _load_gog(path: str):
    try:
        return parse_gog(_read(path))
    except (GogError, KeyError, ValueError) as exc:
        raise ParseFailure(f"{path}: {exc}") from exc


def parse_class_tuple(text: str) -> ClassTuple:
    """``basis: a b`` followed by ``class: word`` lines."""
    basis, words = None, []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, colon, body = line.partition(":")
        key = key.strip()
        if not colon:
            raise ValueError(f"expected 'key: value' in {line!r}")
        if key == "basis":
            basis = Basis(body.split())
        elif key == "class":
            if basis is None:
                raise ValueError("'basis:' must come before classes")
            words.append(parse_word(basis, body))
        else:
            raise ValueError(f"unknown record {key!r}")
    if basis is None:
        raise ValueError("missing 'basis:' line")
    if not words:
        raise ValueError("no classes given")
    if any(not w for w in words):
        raise ValueError("classes must be nontrivial")
    return ClassTuple.of(words)


def serialize_class_tuple(t: ClassTuple) -> str:
    lines = ["basis: " + " ".join(t.basis.names)]
    lines += ["class: " + format_word(c.core) for c in t.classes]
    return "\n".join(lines) + "\n"


def _load_tuple(path: str) -> ClassTuple:
    try:
        return parse_class_tuple(_read(path))
    except (KeyError, ValueError) as exc:
        raise ParseFailure(f"{path}: {exc}") from exc


def _load_presentation(path: str):
    try:
        return parse_presentation(_read(path))
    except (PresentationError, KeyError, ValueError) as exc:
        raise ParseFailure(f"{path}: {exc}") from exc


def _out(line: str = "") -> None:
    print(line)


def _bool(x: bool) -> str:
    return "true" if x else "false"


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    g, _ = _load_gog(args.file)
    problems = validate(g)
    _out(f"valid: {_bool(not problems)}")
    for p in problems:
        _out(f"problem: {p}")
    return EXIT_OK if not problems else EXIT_VERIFY


def cmd_check_efficient(args) -> int:
    g, d = _load_gog(args.file)
    violations = check_pointedly_efficient(g, d) if args.pointed else check_efficient(g, d)
    _out(f"{'pointedly ' if args.pointed else ''}efficient: {_bool(not violations)}")
    for v in violations:
        _out(f"violation: {v}")
    return EXIT_OK


def cmd_make_efficient(args) -> int:
    g, d = _load_gog(args.file)
    result = make_efficient(g, d, pointed=args.pointed)
    for rec in result.log:
        _out(f"move: {rec}")
    for v in result.outstanding:
        _out(f"violation: {v}")
    for move, loc, reason in result.unsupported:
        print(f"{move} at {loc}: not supported ({reason})", file=sys.stderr)
    _out(f"efficient: {_bool(result.efficient)}")
    text = serialize_gog(result.gog, result.twist)
    if args.output:
        Path(args.output).write_text(text)
    else:
        _out("---")
        sys.stdout.write(text)
    if not result.efficient and result.unsupported:
        return EXIT_UNSUPPORTED
    return EXIT_OK


def cmd_induced(args) -> int:
    if args.nielsen is not None:
        g, d, pb = nielsen_gog(args.nielsen)
    else:
        if not args.file or not args.basis:
            raise ParseFailure("give a graph of groups file and --basis, or --nielsen N")
        g, d = _load_gog(args.file)
        try:
            pb = parse_pi1_basis(g, _read(args.basis))
        except (GogError, KeyError, ValueError) as exc:
            raise ParseFailure(f"{args.basis}: {exc}") from exc
    aut = induced_automorphism(dehn_twist(g, d), pb)
    sys.stdout.write(serialize_automorphism(aut))
    return EXIT_OK


def cmd_whitehead_min(args) -> int:
    t = _load_tuple(args.file)
    m, witness = minimize(t)
    sys.stdout.write(serialize_class_tuple(m))
    _out(f"length: {sum(len(c) for c in m.classes)}")
    _out("---")
    sys.stdout.write(serialize_automorphism(witness))
    return EXIT_OK


def cmd_whitehead_equiv(args) -> int:
    t1, t2 = _load_tuple(args.first), _load_tuple(args.second)
    if t1.basis != t2.basis:
        raise ParseFailure("class tuples are over different bases")
    phi = are_equivalent(t1, t2)
    _out(f"equivalent: {_bool(phi is not None)}")
    if phi is not None:
        _out("---")
        sys.stdout.write(serialize_automorphism(phi))
    return EXIT_OK


def cmd_nielsen(args) -> int:
    from .nielsen import assemble_centraliser, theorem_presentation, verify_all

    n = args.n
    if n < 2:
        raise ParseFailure("--n must be at least 2")
    if args.emit == "report":
        report = verify_all(n)
        for line in report.lines():
            _out(line)
        _out(f"ok: {_bool(report.ok)}")
        return EXIT_OK if report.ok else EXIT_VERIFY
    p = assemble_centraliser(n) if args.source == "assembled" else theorem_presentation(n)
    if args.emit == "presentation":
        sys.stdout.write(serialize_presentation(p))
    else:
        _out(str(abelianisation(p)))
    return EXIT_OK


def cmd_abelianize(args) -> int:
    p = _load_presentation(args.file)
    if args.simplify:
        p = tietze_simplify(p)
    _out(str(abelianisation(p)))
    return EXIT_OK


def cmd_corpus(args) -> int:
    failures = 0
    for k, (g, d) in enumerate(corpus(args.count, args.seed)):
        chi = euler_characteristic(g)
        result = make_efficient(g, d, pointed=args.pointed)
        lemma = (not check_pointedly_efficient(g, d)) == (not check_efficient(stabilise(g), d))
        ok = euler_characteristic(result.gog) == chi and lemma
        failures += not ok
        _out(f"instance {k}: moves {len(result.log)} efficient {_bool(result.efficient)} "
             f"measure {measure(result.gog, result.twist)} ok {_bool(ok)}")
    _out(f"failures: {failures}")
    return EXIT_OK if not failures else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dehntwist", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    parser.add_argument("--abelianize", metavar="FILE", help="abelianise a presentation file and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("validate", help="check a graph of groups file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (
        ("check-efficient", cmd_check_efficient, "list efficiency violations"),
        ("make-efficient", cmd_make_efficient, "apply moves until efficient"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.add_argument("--pointed", action="store_true", help="use the pointed conditions and moves")
        if name == "make-efficient":
            p.add_argument("--output", "-o", help="write the resulting graph of groups here")
        p.set_defaults(func=func)

    p = sub.add_parser("induced", help="automorphism of pi_1 induced by the Dehn twist")
    p.add_argument("file", nargs="?")
    p.add_argument("--basis", help="pi_1 basis file")
    p.add_argument("--nielsen", type=int, metavar="N", help="use the built-in Nielsen example of rank N")
    p.set_defaults(func=cmd_induced)

    p = sub.add_parser("whitehead-min", help="Whitehead-minimise a tuple of conjugacy classes")
    p.add_argument("file")
    p.set_defaults(func=cmd_whitehead_min)

    p = sub.add_parser("whitehead-equiv", help="decide whether two class tuples are equivalent")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_whitehead_equiv)

    p = sub.add_parser("nielsen", help="centraliser of the Nielsen automorphism")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit", choices=("presentation", "abelianisation", "report"), default="report")
    p.add_argument("--source", choices=("theorem", "assembled"), default="assembled")
    p.set_defaults(func=cmd_nielsen)

    p = sub.add_parser("abelianize", help="abelianisation of a presentation file")
    p.add_argument("file")
    p.add_argument("--simplify", action="store_true", help="Tietze-simplify first")
    p.set_defaults(func=cmd_abelianize)

    p = sub.add_parser("corpus", help="run moves on a random corpus and check invariants")
    p.add_argument("--count", type=int, default=60)
    p.add_argument("--pointed", action="store_true")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        if args.abelianize:
            args.file, args.simplify = args.abelianize, False
            return cmd_abelianize(args)
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_PARSE
        return args.func(args)
    except ParseFailure as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotSupported as exc:
        print(f"not supported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (AssertionError, GogError, NotAnAutomorphism) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
