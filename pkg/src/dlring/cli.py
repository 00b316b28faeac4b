"""Command-line front end.

Exit status: 0 when every requested check passes, 1 on usage errors, 2 when
a check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import coverings, dring, fgl, qring
from .series import ONE, ZERO, CoefficientRing, TruncatedSeries, ring_map

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class CommandConfig:
    command: str
    action: str
    format: str = "text"
    seed: int = 0
    trunc: int | None = None
    out: str | None = None
    law: str = "additive"


@dataclass
class Result:
    passed: bool
    text: list[str]
    data: dict


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _nonnegative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return n


def parse_law(selector: str, trunc: int | None = None) -> fgl.FormalGroupLaw:
    """``additive`` or ``lazard:D``; ``trunc`` sets the series truncation."""
    if selector == "additive":
        return fgl.additive_fgl(5 if trunc is None else trunc)
    if selector.startswith("lazard:"):
        try:
            D = int(selector.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad law selector {selector!r}") from None
        if D < 1:
            raise UsageError("lazard degree bound must be positive")
        _, F = fgl.lazard_ring(D)
        if trunc is None:
            return F
        if trunc < 2:
            raise UsageError("truncation must be at least 2")
        return F.extended(trunc)
    raise UsageError(f"unknown law {selector!r}; use 'additive' or 'lazard:D'")


# ---------------------------------------------------------------------------
# commands


def cmd_fgl(args) -> Result:
    if args.input:
        try:
            with open(args.input) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from None
        ring = CoefficientRing.from_json(data["ring"]) if "ring" in data else CoefficientRing()
        law = TruncatedSeries.from_json(data.get("series", data), ring)
        if args.action != "check":
            law = fgl.fgl_validate(law)
    else:
        law = parse_law(args.law, args.trunc)
    if args.action == "check":
        series = law if isinstance(law, TruncatedSeries) else law.series
        violations = fgl.check_law(series)
        text = [f"law: {series.format()}", f"truncation: {series.truncation}"]
        for v in violations:
            text.append(f"{type(v).__name__}: {v}")
        text.append("PASS" if not violations else "FAIL")
        data = {
            "law": series.to_json(),
            "violations": [{"kind": type(v).__name__, "monomial": v.monomial, "coefficient": v.coefficient} for v in violations],
            "passed": not violations,
        }
        return Result(not violations, text, data)
    if args.action == "lubin":
        Ft, h = fgl.lubin_quotient(law)
        additive = fgl.is_additive(Ft)
        text = [
            f"h_t = {h.map.format()}",
            f"F_t = {'additive' if additive else Ft.format()}",
            "kernel {0, t}: PASS",
            "F_t validation: PASS",
            "PASS",
        ]
        data = {"h_t": h.map.to_json(), "F_t": Ft.series.to_json(), "F_t_additive": additive, "passed": True}
        return Result(True, text, data)
    iq = fgl.iterated_quotient(law)
    text = [
        f"h_ts = {iq.hts.format()}",
        f"F_ts = {iq.Fts.format()}",
        "closed form x F(x,t) F(x,s) F(x,F(s,t)): PASS",
        "kernel {0, t, s, F(s,t)}: PASS",
        f"symmetry F_ts = F_st (truncation {iq.checks['symmetry_truncation']}): PASS",
        "PASS",
    ]
    data = {"h_ts": iq.hts.map.to_json(), "F_ts": iq.Fts.series.to_json(), "checks": iq.checks, "passed": True}
    return Result(True, text, data)


def cmd_lazard(args) -> Result:
    D = args.max
    got = fgl.lazard_dimensions(D)
    want = fgl.thom_dimensions(D)
    ok = got == want
    text = ["degree rank expected"]
    text += [f"{d} {got[d]} {want[d]}" for d in range(D + 1)]
    text.append("PASS" if ok else "FAIL")
    data = {"dimensions": {str(d): got[d] for d in range(D + 1)}, "expected": {str(d): want[d] for d in range(D + 1)}, "passed": ok}
    return Result(ok, text, data)


def cmd_dl(args) -> Result:
    if args.action == "adem":
        if not args.indices:
            raise UsageError("dl adem needs at least one index")
        p = qring.QPolynomial.monomial(*args.indices)
        nf = qring.normal_form(p, strategy=args.strategy)
        return Result(True, [nf.format()], {"input": list(args.indices), "normal_form": nf.to_json()})
    if args.action == "derive":
        return _derive(args)
    if args.action == "priddy":
        N = max(args.max_n + 2 * args.max_k, args.trunc or 0)
        table = qring.priddy_table(N)
        text, rows = [], []
        for k in range(args.max_k + 1):
            for n in range(args.max_n + 1):
                c = table.q(n, k)
                text.append(f"q_{n}(b_{k}) = {table.ring.format(c)}")
                rows.append({"n": n, "k": k, "value": table.ring.monomial_strings(c)})
        return Result(True, text, {"truncation": N, "table": rows})
    return _basis_change(args)


def _derive(args) -> Result:
    law = parse_law(args.law, args.trunc)
    bound = dring.derive_bound(args.max)
    derived = dring.derive_generalized_adem(law, bound)
    pairs = [(m, n) for m in range(args.max + 1) for n in range(args.max + 1 - m) if not qring.is_admissible_pair(m, n)]
    ring = law.ring
    target = CoefficientRing()
    kill = {n: ZERO for n, _ in ring.generators}
    mismatches = []
    for lhs in pairs:
        if lhs not in derived.rules:
            mismatches.append({"lhs": list(lhs), "reason": "unsolved"})
            continue
        got = {}
        for ops, c in derived.rules[lhs].items():
            c0 = ring_map(c, ring, target, kill) if ring.generators else c
            if c0:
                got[ops] = c0
        want = {m.indices: ONE for m in qring.adem_expand(*lhs).terms}
        if got != want:
            mismatches.append({"lhs": list(lhs), "derived": sorted(got), "closed_form": sorted(want)})
    ok = not mismatches
    text = [derived.format_rule(lhs) for lhs in pairs if lhs in derived.rules]
    label = "closed form" if not ring.generators else "closed form after killing a_ij"
    text.append(f"{len(pairs) - len(mismatches)}/{len(pairs)} rules match {label}")
    text.append("PASS" if ok else "FAIL")
    data = {
        "bound": bound,
        "rules": [r for r in derived.to_json() if tuple(r["lhs"]) in set(pairs)],
        "unsolved": [list(c) for c in derived.unsolved],
        "mismatches": mismatches,
        "passed": ok,
    }
    return Result(ok, text, data)


def _basis_change(args) -> Result:
    M = args.max
    bc = dring.BasisChange(M)
    A = dring.basis_change(bc, args.direction, M)
    other = dring.basis_change(bc, "q-to-d" if args.direction == "d-to-q" else "d-to-q", M)
    ring = bc.ring
    ident = [[ONE if i == j else ZERO for j in range(M + 1)] for i in range(M + 1)]
    round_trip = dring.matmul(ring, A, other) == ident
    reduced = dring.reduce_matrix(bc, A) == ident
    low = A[0][0] == ONE and A[1][1] == ONE and A[1][0] == ZERO
    ok = round_trip and reduced and low
    src, dst = ("q", "d") if args.direction == "d-to-q" else ("d", "q")
    text = []
    for n in range(M + 1):
        terms = []
        for k in range(n + 1):
            c = A[n][k]
            if c == ONE:
                terms.append(f"{dst}_{k}")
            elif c:
                terms.append(f"({ring.format(c)}) {dst}_{k}")
        text.append(f"{src}_{n} = " + " + ".join(terms))
    text.append(f"round trip: {'PASS' if round_trip else 'FAIL'}")
    text.append(f"reduction to identity: {'PASS' if reduced else 'FAIL'}")
    text.append("PASS" if ok else "FAIL")
    data = {
        "direction": args.direction,
        "matrix": [[ring.monomial_strings(c) for c in row] for row in A],
        "round_trip": round_trip,
        "reduces_to_identity": reduced,
        "passed": ok,
    }
    return Result(ok, text, data)


def cmd_dring(args) -> Result:
    if args.model == "nstar":
        ts = dring.nstar_total_square(args.dmax, args.trunc)
    else:
        law = parse_law(args.law)
        ts = dring.bo_dring(law, args.k, args.trunc)
    report = dring.dring_validate(ts)
    text = [report.format(), "PASS" if report.passed else "FAIL"]
    return Result(report.passed, text, report.to_json())


def cmd_cover(args) -> Result:
    report = coverings.selftest(args.trials, args.max_size, args.seed)
    return Result(report.passed, report.format().splitlines(), report.to_json())


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--trunc", type=_positive, default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS)
    return p


GLOBAL_DEFAULTS = {"format": "text", "seed": 0, "trunc": None, "out": None}


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="dlring", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fgl", help="formal group law checks")
    fs = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("check", "lubin", "iterate"):
        q = fs.add_parser(name, parents=[common])
        q.add_argument("--law", default="additive")
        q.add_argument("--input", help="law as series JSON")
        q.set_defaults(func=cmd_fgl)

    p = sub.add_parser("lazard", help="Lazard ring tables")
    ls = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = ls.add_parser("dims", parents=[common])
    q.add_argument("--max", type=_positive, default=6)
    q.set_defaults(func=cmd_lazard)

    p = sub.add_parser("dl", help="Dyer-Lashof calculus")
    ds = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = ds.add_parser("adem", parents=[common])
    q.add_argument("indices", type=_nonnegative, nargs="*")
    q.add_argument("--strategy", choices=("leftmost", "rightmost"), default="leftmost")
    q.set_defaults(func=cmd_dl)
    q = ds.add_parser("derive", parents=[common])
    q.add_argument("--law", default="additive")
    q.add_argument("--max", type=_positive, default=10, help="bound on m + n")
    q.set_defaults(func=cmd_dl)
    q = ds.add_parser("priddy", parents=[common])
    q.add_argument("--max-n", type=_nonnegative, default=3)
    q.add_argument("--max-k", type=_nonnegative, default=2)
    q.set_defaults(func=cmd_dl)
    q = ds.add_parser("basis-change", parents=[common])
    q.add_argument("--max", type=_positive, default=10)
    q.add_argument("--direction", choices=("d-to-q", "q-to-d"), default="d-to-q")
    q.set_defaults(func=cmd_dl)

    p = sub.add_parser("dring", help="total-square axiom checks")
    rs = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = rs.add_parser("validate", parents=[common])
    q.add_argument("--model", choices=("nstar", "bo"), default="nstar")
    q.add_argument("--dmax", type=_positive, default=4)
    q.add_argument("--law", default="additive")
    q.add_argument("--k", type=_nonnegative, default=2)
    q.set_defaults(func=cmd_dring)

    p = sub.add_parser("cover", help="covering calculus")
    cs = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = cs.add_parser("selftest", parents=[common])
    q.add_argument("--trials", type=_nonnegative, default=100)
    q.add_argument("--max-size", type=_nonnegative, default=12)
    q.set_defaults(func=cmd_cover)
    return parser


def config_from_args(args) -> CommandConfig:
    return CommandConfig(args.command, args.action, args.format, args.seed, args.trunc, args.out, getattr(args, "law", "additive"))


def render(result: Result, config: CommandConfig) -> str:
    header = f"# dlring {config.command} {config.action} seed={config.seed}"
    if config.format == "json":
        payload = {"command": f"{config.command} {config.action}", "seed": config.seed, **result.data}
        payload["passed"] = result.passed
        return json.dumps(payload, indent=2) + "\n"
    return "\n".join([header] + result.text) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"dlring: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (fgl.InvalidFormalGroupLaw, fgl.LawViolation) as exc:
        print(f"dlring: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (fgl.UnderdeterminedStep, fgl.InconsistentStep, fgl.ClosedFormMismatch, fgl.KernelMismatch, fgl.SymmetryMismatch) as exc:
        print(f"dlring: check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    config = config_from_args(args)
    text = render(result, config)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if result.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
