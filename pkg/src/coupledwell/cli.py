"""Command-line front end.

Subcommands mirror the library: spectrum, critical, metric, verify,
scan, oracle.  Output goes to stdout (or --out) as JSON or CSV and is
byte-identical across runs for identical arguments; diagnostics go to
stderr.  Exit codes: 0 success, 2 validation error, 3 lost root /
coupling at or above critical, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .errors import (
    BracketError,
    DegenerateMatchError,
    MetricConstraintError,
    ModelDomainError,
    NormalizationSingularError,
    NumericalFailureError,
    RootLostError,
)
from .metric import (
    MetricWeights,
    biorthogonality_matrix,
    build_theta_metric,
    inverse_identity_defect,
    mode_hamiltonian,
    mode_spin,
    quasi_hermiticity_defect,
    spin_operator,
)
from .model import CouplingPair, RepBasis
from .oracle import (
    GridSpec,
    build_hamiltonian,
    compare_spectrum,
    discrete_theta,
    eigenpairs,
)
from .secular import (
    DEFAULT_CRITICAL_TOL,
    DEFAULT_RESIDUAL_TOL,
    critical_coupling,
    perturbative_eps,
    spectrum,
)
from .wavefunctions import doublet_family, matching_residual, parity_overlap

_SPECTRUM_COLUMNS = ("n", "s", "t", "eps", "E", "residual", "branch")


def _level_record(level) -> dict:
    return {
        "n": level.n,
        "s": level.s,
        "t": level.t,
        "eps": level.eps,
        "E": level.E,
        "residual": level.residual,
        "branch": level.branch.value,
        "sublabel": level.sublabel,
    }


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _cmd_spectrum(args) -> int:
    coupling = CouplingPair(args.Y, args.Z)
    result = spectrum(coupling, args.levels - 1, args.tol)
    records = [_level_record(l) for l in result.levels]
    if args.format == "json":
        _emit(args, _json_text(records))
    else:
        rows = [[r[c] for c in _SPECTRUM_COLUMNS] for r in records]
        _emit(args, _csv_text(_SPECTRUM_COLUMNS, rows))
    if result.non_diagonalizable:
        print(
            "warning: YZ = 0 with a nonzero coupling is a Jordan block; "
            "doubled levels are algebraic multiplicities, not independent states",
            file=sys.stderr,
        )
    if result.truncated_at is not None:
        print(
            f"error: root lost at level n={result.truncated_at}: coupling at or above "
            f"the critical value for that pair; emitted levels 0..{result.truncated_at - 1}",
            file=sys.stderr,
        )
        return 3
    return 0


def _cmd_critical(args) -> int:
    result = critical_coupling(args.pair, args.tol)
    payload = {
        "pair_index": result.pair_index,
        "c_crit": result.c_crit,
        "bracket_width": result.bracket_width,
        "evaluations": result.evaluations,
    }
    if args.format == "json":
        _emit(args, _json_text(payload))
    else:
        _emit(args, _csv_text(list(payload), [list(payload.values())]))
    return 0


def _cmd_metric(args) -> int:
    coupling = CouplingPair(args.Y, args.Z)
    states = doublet_family(coupling, args.levels, args.tol)
    weights = (
        MetricWeights.from_file(args.weights, args.levels)
        if args.weights
        else MetricWeights.unit(args.levels)
    )
    rep = build_theta_metric(
        states, weights, rep=RepBasis.MODE, unsafe=args.unsafe
    )
    eigenvalues = np.linalg.eigvalsh(rep.matrix)
    if args.format == "json":
        payload = {
            "Y": coupling.Y,
            "Z": coupling.Z,
            "n_levels": args.levels,
            "order": [list(pair) for pair in rep.meta["order"]],
            "theta": rep.matrix.tolist(),
            "eigenvalues": eigenvalues.tolist(),
            "signature": list(rep.meta["signature"]),
            "channel_kernels": [k.tolist() for k in rep.meta["channel_kernels"]],
        }
        _emit(args, _json_text(payload))
    else:
        header = [f"state_{n}_{'p' if sigma > 0 else 'm'}" for n, sigma in rep.meta["order"]]
        _emit(args, _csv_text(header, rep.matrix.tolist()))
    return 0


def _cmd_scan(args) -> int:
    if args.steps < 1:
        raise ModelDomainError(f"steps must be >= 1, got {args.steps}")
    if args.c_min < 0 or args.c_max < args.c_min:
        raise ModelDomainError("need 0 <= c-min <= c-max")
    cs = np.linspace(args.c_min, args.c_max, args.steps)
    entries = []
    for c in cs:
        result = spectrum(CouplingPair(float(c), float(c)), args.levels - 1, args.tol)
        entries.append(
            {
                "c": float(c),
                "all_real": result.truncated_at is None,
                "truncated_at": result.truncated_at,
                "levels": [_level_record(l) for l in result.levels],
            }
        )
    if args.format == "json":
        _emit(args, _json_text(entries))
    else:
        header = ("c", "all_real") + _SPECTRUM_COLUMNS
        rows = []
        for e in entries:
            for r in e["levels"]:
                rows.append([e["c"], e["all_real"]] + [r[c] for c in _SPECTRUM_COLUMNS])
        _emit(args, _csv_text(header, rows))
    return 0


def _cmd_oracle(args) -> int:
    coupling = CouplingPair(args.Y, args.Z)
    if coupling.product < 0:
        raise ModelDomainError(
            "oracle comparison covers YZ >= 0 (degenerate doublet structure)"
        )
    analytic = spectrum(coupling, args.levels - 1, args.tol)
    if analytic.truncated_at is not None:
        print(
            f"error: analytic root lost at n={analytic.truncated_at}; "
            "coupling at or above critical",
            file=sys.stderr,
        )
        return 3
    # one record per level n (decoupled doubling collapses)
    per_level = {l.n: l for l in analytic.levels}
    levels = [per_level[n] for n in sorted(per_level)]
    grid = GridSpec(args.grid)
    n_request = min(2 * args.levels + 2, 2 * (args.grid - 1))
    values, _ = eigenpairs(build_hamiltonian(coupling, grid), n_request)
    coarse_values = None
    if args.order:
        coarse_grid = GridSpec(args.grid // 2)
        coarse_values, _ = eigenpairs(
            build_hamiltonian(coupling, coarse_grid),
            min(n_request, 2 * (coarse_grid.M - 1)),
        )
    report = compare_spectrum(levels, values, args.levels, coarse_values)
    report["grid_M"] = args.grid
    report["Y"] = coupling.Y
    report["Z"] = coupling.Z
    if args.format == "json":
        _emit(args, _json_text(report))
    else:
        header = [
            "n",
            "E_analytic",
            "E_numeric",
            "im_numeric",
            "multiplicity",
            "abs_err",
            "rel_err",
        ]
        if "richardson_orders" in report:
            header.append("order")
        rows = []
        for i, row in enumerate(report["levels"]):
            out = [row[c] for c in header if c != "order"]
            if "richardson_orders" in report:
                out.append(report["richardson_orders"][i])
            rows.append(out)
        _emit(args, _csv_text(header, rows))
    return 0


def _verify_checks(args) -> list[dict]:
    coupling = CouplingPair(args.Y, args.Z)
    if coupling.product <= 0:
        raise ModelDomainError(
            "verify exercises the coupled degenerate branch and needs YZ > 0"
        )
    checks = []

    def check(name, value, bound, larger_is_pass=False):
        ok = value > bound if larger_is_pass else value <= bound
        checks.append(
            {
                "name": name,
                "value": float(value),
                "bound": float(bound),
                "comparison": ">" if larger_is_pass else "<=",
                "passed": bool(ok),
            }
        )

    states = doublet_family(coupling, args.levels, args.tol)
    levels = [states[2 * n].level for n in range(args.levels)]
    c = coupling.root_product

    check(
        "secular residual max",
        max(l.residual for l in levels),
        args.tol,
    )
    check(
        "wavenumber constraint |2st - sqrt(YZ)| max",
        max(abs(2 * l.s * l.t - c) for l in levels),
        1e-10,
    )
    if args.levels >= 3 and c <= 1.5:
        # monotone convergence of the small-coupling series at the top level
        top = levels[-1]
        err2 = abs(top.eps - perturbative_eps(top.n, coupling, order=2))
        err1 = abs(top.eps - perturbative_eps(top.n, coupling, order=1))
        check("perturbation order-2/order-1 error ratio", err2 / err1, 1.0)
    check(
        "matching residual max",
        max(matching_residual(s) for s in states),
        1e-12,
    )
    ratio = np.sqrt(coupling.Z / coupling.Y)
    check(
        "coefficient ratio |A/B - sigma sqrt(Z/Y)| max",
        max(abs(s.A / s.B - s.sigma * ratio) for s in states),
        1e-10,
    )
    check(
        "parity overlap alternation min (-1)^n p_n",
        min((-1) ** s.level.n * parity_overlap(s) for s in states),
        0.0,
        larger_is_pass=True,
    )

    pairing = biorthogonality_matrix(states)
    diag = np.diag(pairing)
    off = pairing - np.diag(diag)
    check("biorthogonal diagonal min", float(np.min(diag)), 0.0, larger_is_pass=True)
    check(
        "biorthogonal off-diagonal / max diagonal",
        float(np.max(np.abs(off)) / np.max(diag)),
        1e-9,
    )

    theta = build_theta_metric(states, MetricWeights.unit(args.levels))
    check(
        "metric Hermiticity defect",
        float(np.max(np.abs(theta.matrix - theta.matrix.conj().T))),
        0.0,
    )
    check(
        "metric minimal eigenvalue",
        float(np.min(np.linalg.eigvalsh(theta.matrix))),
        0.0,
        larger_is_pass=True,
    )
    check(
        "quasi-Hermiticity defect (Hamiltonian)",
        quasi_hermiticity_defect(mode_hamiltonian(states), theta),
        1e-8,
    )
    check(
        "quasi-Hermiticity defect (spin observable)",
        quasi_hermiticity_defect(mode_spin(states), theta),
        1e-8,
    )
    check(
        "inverse metric identity defect",
        inverse_identity_defect(theta, states, MetricWeights.unit(args.levels)),
        1e-8,
    )

    grid = GridSpec(args.grid)
    h_rep = build_hamiltonian(coupling, grid)
    swap = discrete_theta(grid)
    check(
        "discrete swap-reflect pseudo-Hermiticity defect",
        float(
            np.max(
                np.abs(
                    swap.matrix @ h_rep.matrix @ swap.matrix
                    - h_rep.matrix.conj().T
                )
            )
        ),
        0.0,
    )
    omega_full = np.kron(spin_operator(coupling).matrix, np.eye(grid.n_interior))
    check(
        "discrete commutator [H, spin] max",
        float(np.max(np.abs(h_rep.matrix @ omega_full - omega_full @ h_rep.matrix))),
        1e-15 * float(np.max(np.abs(h_rep.matrix))),
    )
    n_eig = min(4, 2 * args.levels)
    eig_values, _ = eigenpairs(h_rep, n_eig)
    check("oracle lowest eigenvalues |Im| max", float(np.max(np.abs(eig_values.imag))), 1e-6)
    k = min(2, args.levels)
    report = compare_spectrum(levels, eig_values, k)
    check(
        "oracle vs analytic relative error",
        max(r["rel_err"] for r in report["levels"]),
        5e-3 * (512.0 / args.grid) ** 2,
    )
    return checks


def _cmd_verify(args) -> int:
    checks = _verify_checks(args)
    all_passed = all(c["passed"] for c in checks)
    if args.format == "json":
        _emit(args, _json_text({"checks": checks, "all_passed": all_passed}))
    else:
        lines = []
        for c in checks:
            lines.append(
                f"{'PASS' if c['passed'] else 'FAIL'}  "
                f"{c['name']:<46} {c['value']:.6e} {c['comparison']} {c['bound']:.6e}"
            )
        lines.append(f"{'OK' if all_passed else 'FAILED'}: "
                     f"{sum(c['passed'] for c in checks)}/{len(checks)} checks passed")
        _emit(args, "\n".join(lines) + "\n")
    return 0 if all_passed else 4


def _add_common(parser, levels_default):
    parser.add_argument("--Y", type=float, required=True, help="upper-right coupling amplitude")
    parser.add_argument("--Z", type=float, required=True, help="lower-left coupling amplitude")
    parser.add_argument(
        "--levels",
        type=int,
        default=levels_default,
        help=f"number of levels, n = 0..levels-1 (default {levels_default})",
    )
    parser.add_argument(
        "--tol",
        type=float,
        default=DEFAULT_RESIDUAL_TOL,
        help="secular residual tolerance (default 1e-12)",
    )


def _add_output(parser, formats=("json", "csv")):
    parser.add_argument(
        "--format", choices=formats, default=formats[0], help=f"output format (default {formats[0]})"
    )
    parser.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coupledwell",
        description=(
            "Exactly solvable two-channel square well with imaginary "
            "antisymmetric coupling: spectra, states, metrics, and a "
            "finite-difference cross-check."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="solve levels and print them")
    _add_common(p, 5)
    _add_output(p)
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("critical", help="critical coupling of a root pair")
    p.add_argument("--pair", type=int, default=0, help="pair index k for roots (2k, 2k+1)")
    p.add_argument(
        "--tol",
        type=float,
        default=DEFAULT_CRITICAL_TOL,
        help="bracket width on sqrt(YZ) (default 1e-3)",
    )
    _add_output(p)
    p.set_defaults(handler=_cmd_critical)

    p = sub.add_parser("metric", help="mode-basis metric matrix and spectrum")
    _add_common(p, 6)
    p.add_argument("--weights", default=None, help="weight file: lines 'n S_plus S_minus'")
    p.add_argument(
        "--unsafe",
        action="store_true",
        help="admit non-positive weights (indefinite pseudo-metrics)",
    )
    _add_output(p)
    p.set_defaults(handler=_cmd_metric)

    p = sub.add_parser("verify", help="run the invariant battery and report pass/fail")
    _add_common(p, 6)
    p.add_argument("--grid", type=int, default=128, help="oracle mesh intervals (default 128)")
    _add_output(p, formats=("table", "json"))
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("scan", help="spectra over a grid of couplings Y = Z = c")
    p.add_argument("--c-min", dest="c_min", type=float, required=True)
    p.add_argument("--c-max", dest="c_max", type=float, required=True)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--tol", type=float, default=DEFAULT_RESIDUAL_TOL)
    _add_output(p)
    p.set_defaults(handler=_cmd_scan)

    p = sub.add_parser("oracle", help="finite-difference comparison report")
    _add_common(p, 4)
    p.add_argument("--grid", type=int, default=512, help="mesh intervals (default 512)")
    p.add_argument(
        "--order",
        action="store_true",
        help="also run half resolution and report Richardson convergence orders",
    )
    _add_output(p)
    p.set_defaults(handler=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.handler(args)
    except (ModelDomainError, MetricConstraintError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RootLostError, BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NumericalFailureError, DegenerateMatchError, NormalizationSingularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
