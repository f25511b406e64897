"""Command-line front end: ``ebequiv {derive,verify,transform,oracle}``.

Exit codes: 0 verified, 2 refuted, 3 assumption-blocked, 4 degenerate chart,
1 usage or parse error.  ``--format structured`` prints one JSON document.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import sympy as sp

from . import derivation as dv
from .errors import (AssumptionMissing, ChartBoundary, DegenerateChart, EbError, ParseError,
                     SingularJacobian)
from .expr import DEFAULT, AssumptionSet, collect, is_zero, normalize, total_derivative
from .textio import parse, parse_assignments, split_top_level, to_text
from .transform import EbEquation, PointTransformation, match_eb_form, transform_pde

EXIT = {"verified": 0, "refuted": 2, "assumption-blocked": 3, "degenerate": 4, "usage": 1}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Report:
    command: str
    verdict: str
    body: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)

    def structured(self) -> str:
        doc = {"command": self.command, "verdict": self.verdict, **self.body}
        return json.dumps(doc, indent=2, sort_keys=True, default=str)

    def pretty(self) -> str:
        return "\n".join(self.lines + [f"verdict: {self.verdict}"])


def _txt(e) -> str | None:
    return None if e is None else to_text(e)


def _assumptions(items) -> AssumptionSet:
    a = DEFAULT
    for item in items or ():
        if item.endswith("!=0"):
            a = a.with_nonzero(parse(item[:-3]))
        else:
            a = a.with_positive(parse(item))
    return a


def _sets(items) -> dict:
    out = {}
    for item in items or ():
        out.update(parse_assignments(item))
    return out


def _step_dict(step: dv.Step) -> dict:
    return {
        "name": step.name,
        "constraint": _txt(step.constraint),
        "reference": _txt(step.reference),
        "factor": _txt(step.factor),
        "solved": step.solved,
        "checks": dict(step.checks),
        "notes": {k: (_txt(v) if isinstance(v, sp.Basic) else v) for k, v in step.notes.items()},
        "blocked": step.blocked,
        "verdict": step.verdict,
    }


def _worst(verdicts) -> str:
    verdicts = list(verdicts)
    if "refuted" in verdicts:
        return "refuted"
    if "assumption-blocked" in verdicts:
        return "assumption-blocked"
    return "verified"


# -- derive ---------------------------------------------------------------------------------

CHART_STEPS = {"gamma1": (4, 0), "wy_condition": (1, 0), "gamma2": (0, 1), "gamma3": (0, 0),
               "delta1": ((0, 1), (2,)), "fS_condition": ((0, 1), (1,))}


def _chart(text: str) -> PointTransformation:
    vals = {"J": sp.S.Zero, "L": sp.S.One}
    for item in split_top_level(text):
        name, _, value = item.partition("=")
        name = name.strip()
        if name not in ("R", "S", "L", "J"):
            raise ParseError(f"chart entries are R, S, L, J; got {name!r}")
        vals[name] = parse(value)
    if "R" not in vals or "S" not in vals:
        raise ParseError("chart needs R and S")
    return PointTransformation(vals["R"], vals["S"], vals["L"], vals["J"])


def cmd_derive(args) -> Report:
    a = _assumptions(args.assume)
    if args.chart:
        if args.step not in CHART_STEPS:
            raise UsageError(f"--chart needs --step in {sorted(CHART_STEPS)}")
        T = _chart(args.chart)
        pde = transform_pde(EbEquation(flavor=args.flavor), T, a)
        key = CHART_STEPS[args.step]
        if isinstance(key[0], tuple):
            value = collect(pde.coeff(key[0]), "f", a).get(key[1], sp.S.Zero)
        else:
            value = pde.coeff(key)
        body = {"step": args.step, "chart": {k: _txt(getattr(T, k)) for k in "RSLJ"},
                "coefficient": _txt(value)}
        return Report("derive", "verified", body, [f"{args.step} = {to_text(value)}"])

    trace = dv.derive_classic(a)
    steps = list(trace.steps)
    if args.flavor == "generalized":
        steps += dv.verify_theorem2_generalized(a).steps
    if args.step:
        steps = [s for s in steps if s.name == args.step]
        if not steps:
            raise UsageError(f"no step named {args.step!r}")
    lines = []
    for s in steps:
        lines.append(f"[{s.verdict}] {s.name}: solved by {s.solved or '-'}")
        lines.append(f"    constraint: {_txt(s.constraint)}")
        if s.reference is not None:
            lines.append(f"    reference:  {_txt(s.reference)}")
            lines.append(f"    factor:     {_txt(s.factor)}")
        for k, v in s.checks.items():
            lines.append(f"    check {k}: {v}")
        if s.blocked:
            lines.append(f"    blocked: {s.blocked}")
    body = {"flavor": args.flavor, "steps": [_step_dict(s) for s in steps]}
    return Report("derive", _worst(s.verdict for s in steps), body, lines)


# -- verify / oracle --------------------------------------------------------------------------

def _witness_body(w) -> dict:
    return {"scenes": w.scenes, "max_discrepancy": w.max_discrepancy,
            "corrupted_F": w.corrupted_F, "perturbed": w.perturbed,
            "skipped": [list(s) for s in w.skipped], "passed": w.passed}


def _witness_lines(w) -> list:
    lines = [f"numeric: {w.scenes} scenes, max relative discrepancy {w.max_discrepancy:.3e}",
             f"negative control, F*(1+z): {w.corrupted_F:.3e}"]
    lines += [f"negative control, {k} * 11/10: {v:.3e}" for k, v in w.perturbed.items()]
    if w.skipped:
        lines.append(f"skipped scenes: {len(w.skipped)}")
    return lines


def _verify_theorem1(sets, a) -> tuple[dict, list, str]:
    ks = {k: v for k, v in sets.items() if k.startswith("k")}
    if is_zero(ks.get("k7", 0)):
        p = dv.EquivParams.group().with_(**{**ks, "k7": 0, "k11": 0})
        img = dv.assemble_theorem1(p, assumptions=a)
        ok = img.F is not None and img.y_free(a)
        body = {"F": _txt(img.F), "M": _txt(img.M), "mu": _txt(img.mu), "y_free": ok}
        return body, [f"F = {_txt(img.F)}", f"M = {_txt(img.M)}", f"mu = {_txt(img.mu)}",
                      f"F, M free of y: {ok}"], "verified" if ok else "refuted"
    p = dv.EquivParams.symbolic().with_(**ks)
    img = dv.eb_image(EbEquation(), dv.moebius_pair_transformation(p), a)
    dF = normalize(total_derivative(img.F, "y"), a) if img.F is not None else None
    dM = normalize(total_derivative(img.M, "y"), a) if img.M is not None else None
    y_free = img.F is not None and dF == 0 and dM == 0
    body = {"F": _txt(img.F), "M": _txt(img.M), "dF_dy": _txt(dF), "dM_dy": _txt(dM),
            "y_free": y_free}
    lines = [f"k7 = {to_text(p[7])}: F = {_txt(img.F)}", f"M = {_txt(img.M)}",
             f"witness dM/dy = {_txt(dM)}"]
    return body, lines, "verified" if y_free else "refuted"


def _verify_theorem2(a) -> tuple[dict, list, str]:
    trace = dv.verify_theorem2_generalized(a)
    lines = [f"[{s.verdict}] {s.name}" for s in trace.steps]
    body = {"steps": [_step_dict(s) for s in trace.steps]}
    return body, lines, _worst(s.verdict for s in trace.steps)


def _verify_theorem3(a) -> tuple[dict, list, str]:
    from . import symmetry as sy
    gen = sy.check_infinitesimal_symmetry(sy.ge_generator(), assumptions=a)
    j3 = sy.verify_J3_solution(assumptions=a)
    mu = sy.image_preserves_coefficients(assumptions=a)
    ok = gen and j3 and mu is not None
    body = {"generator_symmetry": gen, "J3_solution": j3, "mu": _txt(mu)}
    lines = [f"pr v (Delta) = 0 mod Delta: {gen}", f"J3 residual zero: {j3}",
             f"finite image keeps f, m with mu = {_txt(mu)}"]
    return body, lines, "verified" if ok else "refuted"


def cmd_verify(args) -> Report:
    from .oracle import theorem_witness
    a = _assumptions(args.assume)
    sets = {k: v for k, v in _sets(args.set).items()}
    run = {1: lambda: _verify_theorem1(sets, a), 2: lambda: _verify_theorem2(a),
           3: lambda: _verify_theorem3(a)}[args.theorem]
    body, lines, verdict = run()
    body = {"theorem": args.theorem, "symbolic": body}
    if verdict == "verified" and args.scenes > 0:
        numeric_sets = {k: v for k, v in sets.items() if not v.free_symbols}
        w = theorem_witness(args.theorem, args.scenes, args.seed, numeric_sets)
        body["numeric"] = _witness_body(w)
        lines += _witness_lines(w)
        verdict = "verified" if w.passed else "refuted"
    return Report("verify", verdict, body, [f"theorem {args.theorem}"] + lines)


def cmd_oracle(args) -> Report:
    from .oracle import theorem_witness
    sets = {k: v for k, v in _sets(args.set).items() if not v.free_symbols}
    w = theorem_witness(args.theorem, max(args.scenes, 1), args.seed, sets)
    body = {"theorem": args.theorem, **_witness_body(w)}
    return Report("oracle", "verified" if w.passed else "refuted", body,
                  [f"theorem {args.theorem}"] + _witness_lines(w))


# -- transform ------------------------------------------------------------------------------------

def cmd_transform(args) -> Report:
    a = _assumptions(args.assume)
    values = {}
    if args.params:
        with open(args.params, encoding="utf-8") as fh:
            values.update(parse_assignments(fh.read()))
    values.update(_sets(args.set))
    f_ = values.pop("f", "f")
    m_ = values.pop("m", "m")
    eq = EbEquation(f_, m_, args.flavor)
    unknown = [k for k in values if not (k.startswith("k") and k[1:].isdigit())]
    if unknown:
        raise UsageError(f"unknown parameters {unknown}")
    base = dv.EquivParams.symbolic() if "k7" in values else dv.EquivParams.group()
    p = base.with_(**values)
    if is_zero(p.x_map.det(), a) or is_zero(p[1], a):
        raise DegenerateChart("k1 = 0 or k2 - k3 k4 = 0: the transformation is not invertible")
    if is_zero(p[7], a):
        T = dv.theorem1_transformation(p)
        J = T.J
    else:
        J = dv.compute_J(p, k7_zero=False)
        T = dv.moebius_pair_transformation(p, J)
    pde = transform_pde(eq, T, a)
    match = match_eb_form(pde, assumptions=a)
    F, M, mu = match if match else (None, None, None)
    body = {"parameters": {k: _txt(v) for k, v in p.as_dict().items()},
            "J": _txt(J), "F": _txt(F), "M": _txt(M), "mu": _txt(mu),
            "pde": {str(k): _txt(v) for k, v in pde.coeffs.items()},
            "inhomogeneous": _txt(pde.inhom)}
    lines = [f"J = {_txt(J)}", f"F = {_txt(F)}", f"M = {_txt(M)}", f"mu = {_txt(mu)}",
             "transformed equation:"]
    lines += [f"  w_{''.join(v * n for v, n in zip('yz', k))}: {_txt(c)}"
              for k, c in pde.coeffs.items()]
    return Report("transform", "verified" if match else "refuted", body, lines)


# -- entry point ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("pretty", "structured"), default="pretty")
    common.add_argument("--assume", action="append", metavar="EXPR",
                        help="register EXPR > 0 (or EXPR != 0 with a trailing '!=0')")
    common.add_argument("--set", action="append", metavar="NAME=VALUE")
    common.add_argument("--flavor", choices=("classic", "generalized"), default="classic")

    parser = _Parser(prog="ebequiv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    d = sub.add_parser("derive", parents=[common])
    d.add_argument("--step")
    d.add_argument("--chart", help='e.g. "R=y*z,S=z,L=1"')
    for name in ("verify", "oracle"):
        v = sub.add_parser(name, parents=[common])
        v.add_argument("--theorem", type=int, choices=(1, 2, 3), required=True)
        v.add_argument("--scenes", type=int, default=20)
        v.add_argument("--seed", type=int, default=0)
    t = sub.add_parser("transform", parents=[common])
    t.add_argument("--params", metavar="FILE", help="lines 'name = value', '#' comments")
    return parser


COMMANDS = {"derive": cmd_derive, "verify": cmd_verify, "transform": cmd_transform,
            "oracle": cmd_oracle}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["usage"]
    try:
        report = COMMANDS[args.command](args)
    except (UsageError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["usage"]
    except (DegenerateChart, SingularJacobian, ChartBoundary) as exc:
        report = Report(args.command, "degenerate", {"error": str(exc)},
                        [f"degenerate chart: {exc}"])
    except AssumptionMissing as exc:
        report = Report(args.command, "assumption-blocked", {"error": str(exc)}, [str(exc)])
    except EbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["usage"]
    print(report.structured() if args.format == "structured" else report.pretty())
    return EXIT[report.verdict]

if __name__ == "__main__":
    sys.exit(main())
