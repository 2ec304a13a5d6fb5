#!/usr/bin/env python3
"""Command-line entry point: verifications, coefficient tables, L-values and settings."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from klingen.common import dump_json, format_table, notice, set_quiet, write_csv, write_json
from klingen.config import DEFAULT_SETTINGS, SettingsStore
from klingen.evaluator import TruncationParams, UpperHalfPoint, klingen_context
from klingen.foundations import is_fundamental_discriminant
from klingen.harness import (
    DEFAULT_POINTS,
    PROGRESS,
    VerificationReport,
    load_form,
    timed,
    verify_cor13,
    verify_cor14,
    verify_para_properties,
    verify_phi_limit,
    verify_pointwise,
    verify_representative_independence,
)
from klingen.lfunctions import dirichlet_L_exact, dirichlet_L_numeric, rankin_naive, sym2_L
from klingen.qseries import write_coefficients
from klingen.quadforms import HalfIntMatrix, lambda_set, theta_array, theta_window_constant
from klingen.symplectic import coset_reps

TRUNCATION_FLAGS = {
    "coset_height": "coset height M (|c|, |d| <= M)",
    "cd_bound": "bound C on the (c, d) pairs of the T_r sum",
    "fourier_cutoff": "Fourier cutoff of the Klingen expansion",
    "qexp_order": "q-expansion order used for cusp-form evaluation",
    "grid": "DFT grid size for A_f extraction",
    "rankin_cutoff": "terms of the Rankin-Selberg sums",
    "sym2_cutoff": "terms of the symmetric square sum",
    "workers": "threads for the (c, d) blocks",
}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add_common(parser: argparse.ArgumentParser) -> None:
    for name, text in TRUNCATION_FLAGS.items():
        parser.add_argument(_flag(name), type=int, help=text)
    parser.add_argument("--cutoff", type=int, help="shorthand for --rankin-cutoff on L-value commands")
    parser.add_argument("--tolerance", type=float, help="override the stored tolerance for this claim")
    parser.add_argument("--coeff-file", type=Path, help="eigenform coefficient file")
    parser.add_argument("--json", type=Path, help="write the machine-readable result here")
    parser.add_argument("--csv", type=Path, help="write a coefficient table here")
    parser.add_argument("--seed", type=int, help="accepted and ignored; every run is deterministic")
    parser.add_argument("--quiet", action="store_true", help="suppress progress notices")


def resolve_params(args: argparse.Namespace, store: Optional[SettingsStore] = None) -> TruncationParams:
    store = store or SettingsStore()
    overrides: Dict[str, object] = {
        "coset_height": args.coset_height,
        "cd_bound": args.cd_bound,
        "fourier_cutoff": args.fourier_cutoff,
        "qexp_order": args.qexp_order,
        "grid_size": args.grid,
        "rankin_cutoff": args.rankin_cutoff if args.rankin_cutoff is not None else args.cutoff,
        "sym2_cutoff": args.sym2_cutoff,
        "workers": args.workers,
    }
    return store.truncation(overrides)


def _tolerance(args: argparse.Namespace, claim: str) -> float:
    if args.tolerance is not None:
        return args.tolerance
    return SettingsStore().tolerance(claim)


def _emit(args: argparse.Namespace, report: VerificationReport) -> int:
    print(report.summary())
    if args.json:
        write_json(args.json, report.to_dict())
        notice(PROGRESS, f"report written to {args.json}")
    return 0 if report.passed else 1


def cmd_verify_pointwise(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    if args.tau1 or args.tau2:
        points = [(UpperHalfPoint.parse(args.tau1 or "0,1.2"), UpperHalfPoint.parse(args.tau2 or "0,1.2"))]
    else:
        points = list(DEFAULT_POINTS)
    f = load_form(args.weight, params, coeff_file=args.coeff_file, for_klingen=True)[1]
    report = timed(lambda: verify_pointwise(args.weight, points, params, _tolerance(args, "pointwise"), f))
    return _emit(args, report)


def cmd_verify_cor13(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    f = load_form(args.weight, params, coeff_file=args.coeff_file, for_klingen=True)[1]
    report = timed(lambda: verify_cor13(args.weight, params, _tolerance(args, "cor13"), f))
    return _emit(args, report)


def cmd_verify_cor14(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    if args.n1 is None or args.n2 is None:
        raise ValueError("verify cor14 needs --n1 and --n2")
    if math.gcd(args.n1, args.n2) != 1:
        raise ValueError(f"verify cor14 needs coprime n1, n2, got gcd({args.n1}, {args.n2}) = {math.gcd(args.n1, args.n2)}")
    f = load_form(args.weight, params, coeff_file=args.coeff_file, for_klingen=True)[1]
    report = timed(lambda: verify_cor14(args.weight, args.n1, args.n2, params, _tolerance(args, "cor14"), f))
    return _emit(args, report)


def cmd_verify_para(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    f = load_form(args.weight, params, level=args.level, coeff_file=args.coeff_file)[1]
    report = timed(lambda: verify_para_properties(args.weight, args.level, params, _tolerance(args, "para"), f))
    return _emit(args, report)


def cmd_verify_reps(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    f = load_form(args.weight, params, level=args.level, coeff_file=args.coeff_file)[1]
    t1 = UpperHalfPoint.parse(args.tau1 or "0.3,1.1")
    t2 = UpperHalfPoint.parse(args.tau2 or "0,1.5")
    tolerance = args.tolerance if args.tolerance is not None else 1e-12
    report = timed(lambda: verify_representative_independence(args.weight, t1, t2, params, tolerance, f, args.level))
    return _emit(args, report)


def cmd_verify_phi(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    f = load_form(args.weight, params, coeff_file=args.coeff_file, for_klingen=True)[1]
    tau = UpperHalfPoint.parse(args.tau1 or "0,1")
    report = timed(lambda: verify_phi_limit(args.weight, tau, params, f=f))
    return _emit(args, report)


def cmd_coeff_klingen(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    if args.n1 is None or args.n2 is None:
        raise ValueError("coeff klingen needs --n1 and --n2")
    f = load_form(args.weight, params, coeff_file=args.coeff_file, for_klingen=True)[1]
    coefficients = klingen_context(f, params.rankin_cutoff, params.sym2_cutoff)
    rows: List[List[object]] = []
    for T in lambda_set(args.n1, args.n2):
        A = coefficients(T)
        rows.append([T.n1, T.b, T.n2, T.det2, repr(A.value.real), f"{A.bound:.3e}"])
    header = ["n1", "b", "n2", "det2T", "A", "bound"]
    print(format_table(header, rows))
    if args.csv:
        write_csv(args.csv, header, rows)
    if args.json:
        write_json(args.json, {"schema": 1, "weight": args.weight, "coefficients": [dict(zip(header, row)) for row in rows]})
    return 0


def cmd_coeff_eigenform(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    order = args.order if args.order is not None else params.qexp_order
    overrides = TruncationParams(qexp_order=order + 1, rankin_cutoff=1, sym2_cutoff=1)
    spec, f = load_form(args.weight, overrides, level=args.level, coeff_file=args.coeff_file)
    f = f.truncate(order + 1)
    notice(PROGRESS, f"eigenform {spec.describe()}")
    rows = [[n, str(f[n])] for n in range(1, min(order, f.order - 1) + 1)]
    shown = rows if args.out or args.csv else rows[: min(len(rows), 20)]
    print(format_table(["n", "a(n)"], shown))
    if args.out:
        write_coefficients(args.out, f, comment=spec.describe())
        notice(PROGRESS, f"coefficients written to {args.out}")
    if args.csv:
        write_csv(args.csv, ["n", "a(n)"], rows)
    return 0


def cmd_coeff_theta(args: argparse.Namespace) -> int:
    T = HalfIntMatrix(args.n1, args.b, args.n2)
    order = args.order if args.order is not None else 50
    values = theta_array(T, order)
    rows = [[n, int(values[n])] for n in range(order)]
    print(format_table(["n", "r_T(n)"], rows))
    if args.csv:
        write_csv(args.csv, ["n", "r_T(n)"], rows)
    return 0


def cmd_lvalue_dirichlet(args: argparse.Namespace) -> int:
    cutoff = args.cutoff if args.cutoff is not None else 100000
    result: Dict[str, object] = {"discriminant": args.discriminant, "s": args.s, "cutoff": cutoff}
    if args.s > 1:
        numeric = dirichlet_L_numeric(args.discriminant, args.s, cutoff)
        result["numeric"] = numeric.value.real
        result["tail_bound"] = numeric.tail_bound
    if args.discriminant < 0 and is_fundamental_discriminant(args.discriminant) and float(args.s).is_integer() and int(args.s) % 2 == 1:
        exact = dirichlet_L_exact(args.discriminant, int(args.s))
        result["exact"] = str(exact)
        result["exact_value"] = float(exact)
    if len(result) == 3:
        raise ValueError(f"L(s, chi_{args.discriminant}) at s = {args.s} needs s > 1 or an exact odd-character value")
    print(dump_json(result), end="")
    if args.json:
        write_json(args.json, result)
    return 0


def cmd_lvalue_rankin(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    T = HalfIntMatrix(args.n1, args.b, args.n2)
    f = load_form(args.weight, params, coeff_file=args.coeff_file, for_klingen=True)[1]
    cutoff = params.rankin_cutoff
    b = theta_array(T, args.v * args.v * cutoff + 1)
    s = args.s if args.s is not None else args.weight - 1
    value = rankin_naive(f.float_coefficients(), b.astype(float), s, args.v, args.weight, cutoff, theta_window_constant(T))
    result = {"T": list(T.as_tuple()), "v": args.v, "s": s, "value": value.value.real, "tail_bound": value.tail_bound, "cutoff": cutoff}
    print(dump_json(result), end="")
    if args.json:
        write_json(args.json, result)
    return 0


def cmd_lvalue_sym2(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    cutoff = params.sym2_cutoff
    sizing = TruncationParams(qexp_order=cutoff + 1, rankin_cutoff=1, sym2_cutoff=cutoff)
    f = load_form(args.weight, sizing, coeff_file=args.coeff_file)[1]
    s = args.s if args.s is not None else 2 * args.weight - 2
    value = sym2_L(f.coeffs, args.weight, s, cutoff)
    result = {"weight": args.weight, "s": s, "value": value.value.real, "tail_bound": value.tail_bound, "cutoff": cutoff}
    print(dump_json(result), end="")
    if args.json:
        write_json(args.json, result)
    return 0


def cmd_cosets(args: argparse.Namespace) -> int:
    params = resolve_params(args)
    reps = coset_reps(args.level, params.coset_height)
    rows = [list(r.matrix.as_tuple()) for r in reps]
    notice(PROGRESS, f"{len(reps)} representatives of Gamma_inf \\ Gamma_0({args.level}) with height {params.coset_height}")
    if args.csv:
        write_csv(args.csv, ["a", "b", "c", "d"], rows)
        return 0
    for row in rows:
        print(" ".join(str(entry) for entry in row))
    return 0


def cmd_config_show(args: argparse.Namespace) -> int:
    store = SettingsStore()
    print(f"settings file: {store.settings_file}")
    print(dump_json(store.load()), end="")
    return 0


def cmd_config_set(args: argparse.Namespace) -> int:
    store = SettingsStore()
    data = store.set_value(args.key, args.value)
    print(f"{args.key} = {data[args.key]} ({store.settings_file})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klingen", description="Klingen Eisenstein pullback verification")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    _add_common(common)

    verify = subparsers.add_parser("verify", help="Run a verification claim")
    verify_sub = verify.add_subparsers(dest="claim", required=True)
    claims = (
        ("pointwise", "Klingen expansion against the pullback sum", cmd_verify_pointwise),
        ("cor13", "Weighted L-value identity for A_f(1,1)", cmd_verify_cor13),
        ("cor14", "Coprime (n1, n2) coefficient identity", cmd_verify_cor14),
        ("para", "Paramodular sums: N = 1 coincidence and invariance", cmd_verify_para),
        ("reps", "Coset representative independence", cmd_verify_reps),
        ("phi", "Phi-operator limit towards f", cmd_verify_phi),
    )
    for name, text, func in claims:
        sub = verify_sub.add_parser(name, help=text, parents=[common])
        sub.add_argument("--weight", type=int, default=12, help="weight k (default 12)")
        sub.add_argument("--level", type=int, default=1, help="level N (default 1)")
        sub.add_argument("--n1", type=int)
        sub.add_argument("--n2", type=int)
        sub.add_argument("--tau1", help="first point as x,y")
        sub.add_argument("--tau2", help="second point as x,y")
        sub.set_defaults(func=func)

    coeff = subparsers.add_parser("coeff", help="Print coefficient tables")
    coeff_sub = coeff.add_subparsers(dest="table", required=True)
    parser_klingen = coeff_sub.add_parser("klingen", help="A(T, f) over Lambda(n1, n2)", parents=[common])
    parser_klingen.add_argument("--weight", type=int, default=12)
    parser_klingen.add_argument("--n1", type=int, required=True)
    parser_klingen.add_argument("--n2", type=int, required=True)
    parser_klingen.set_defaults(func=cmd_coeff_klingen)

    parser_eigen = coeff_sub.add_parser("eigenform", help="Eigenform q-expansion coefficients", parents=[common])
    parser_eigen.add_argument("--weight", type=int, default=12)
    parser_eigen.add_argument("--level", type=int, default=1)
    parser_eigen.add_argument("--order", type=int, help="number of coefficients")
    parser_eigen.add_argument("--out", type=Path, help="write a coefficient file")
    parser_eigen.set_defaults(func=cmd_coeff_eigenform)

    parser_theta = coeff_sub.add_parser("theta", help="Representation numbers of T", parents=[common])
    parser_theta.add_argument("--n1", type=int, required=True)
    parser_theta.add_argument("--b", type=int, default=0)
    parser_theta.add_argument("--n2", type=int, required=True)
    parser_theta.add_argument("--order", type=int)
    parser_theta.set_defaults(func=cmd_coeff_theta)

    lvalue = subparsers.add_parser("lvalue", help="Evaluate L-values")
    lvalue_sub = lvalue.add_subparsers(dest="kind", required=True)
    parser_dirichlet = lvalue_sub.add_parser("dirichlet", help="L(s, chi_D)", parents=[common])
    parser_dirichlet.add_argument("--discriminant", type=int, required=True)
    parser_dirichlet.add_argument("--s", type=float, required=True)
    parser_dirichlet.set_defaults(func=cmd_lvalue_dirichlet)

    parser_rankin = lvalue_sub.add_parser("rankin", help="sum a(n) r_T(v^2 n) n^-s", parents=[common])
    parser_rankin.add_argument("--weight", type=int, default=12)
    parser_rankin.add_argument("--n1", type=int, required=True)
    parser_rankin.add_argument("--b", type=int, default=0)
    parser_rankin.add_argument("--n2", type=int, required=True)
    parser_rankin.add_argument("--v", type=int, default=1)
    parser_rankin.add_argument("--s", type=float)
    parser_rankin.set_defaults(func=cmd_lvalue_rankin)

    parser_sym2 = lvalue_sub.add_parser("sym2", help="L(s, Sym^2 f)", parents=[common])
    parser_sym2.add_argument("--weight", type=int, default=12)
    parser_sym2.add_argument("--s", type=float)
    parser_sym2.set_defaults(func=cmd_lvalue_sym2)

    parser_cosets = subparsers.add_parser("cosets", help="List Gamma_inf \\ Gamma_0(N) representatives", parents=[common])
    parser_cosets.add_argument("--level", type=int, default=1)
    parser_cosets.set_defaults(func=cmd_cosets)

    config = subparsers.add_parser("config", help="Show or change stored settings")
    config_sub = config.add_subparsers(dest="action", required=True)
    parser_show = config_sub.add_parser("show", help="Print resolved settings")
    parser_show.set_defaults(func=cmd_config_show, quiet=False)
    parser_set = config_sub.add_parser("set", help="Persist one setting")
    parser_set.add_argument("--key", required=True, choices=sorted(DEFAULT_SETTINGS))
    parser_set.add_argument("--value", required=True)
    parser_set.set_defaults(func=cmd_config_set, quiet=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_quiet(bool(getattr(args, "quiet", False)))
    try:
        return int(args.func(args))
    except (ValueError, RuntimeError) as exc:
        raise SystemExit(str(exc)) from exc


if __name__ == "__main__":
    sys.exit(main())
