"""Command-line front end.

Subcommands: estimate, verify, tables, concentration, sample.  Estimator
output is JSON-Lines (one record per line, schema_version 1); tables emit
CSV.  Exit codes: 0 pass, 1 usage or precondition error, 2 statistical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import closedforms, functionals, mc
from .ensembles import (
    EnsembleSpec,
    sample_diag_dirichlet,
    sample_mixing_state,
)
from .errors import RandcohError
from .randkit import RngStream, SeedSpec

SCHEMA_VERSION = 1
_LN2 = math.log(2.0)
_MIN_KS_SAMPLES = 1000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the CLI contract reserves
    # 2 for statistical failures, so funnel every parse error through here
    def error(self, message):
        raise UsageError(message)


def _sig12(value):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _sig12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sig12(v) for v in value]
    return value


def _emit(record: dict, out_path: str | None) -> None:
    line = json.dumps(_sig12(record), separators=(", ", ": "))
    print(line)
    if out_path:
        with open(out_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def _record(command: str, parameters: dict, results: dict, seed: int, wall_time_ms: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "results": results,
        "seed": seed,
        "wall_time_ms": wall_time_ms,
    }


def _scale_entropies(entry: dict, bits: bool) -> dict:
    if not bits:
        return entry
    scaled = dict(entry)
    for key in ("mean", "stderr", "closed_form"):
        if key in scaled:
            scaled[key] = scaled[key] / _LN2
    return scaled


def _comparison_entry(report: mc.ComparisonReport) -> dict:
    return {
        "mean": report.mc_mean,
        "stderr": report.mc_stderr,
        "closed_form": report.closed_form,
        "z": report.z_score if math.isfinite(report.z_score) else None,
        "verdict": "pass" if report.passed else "fail",
    }


def cmd_estimate(args) -> int:
    spec = EnsembleSpec(args.m, args.n, args.k)
    quantity = args.quantity.replace("-", "_")
    config = mc.EstimatorConfig(
        spec=spec,
        quantity=quantity,
        samples=args.samples,
        master_seed=args.seed,
        workers=args.workers,
    )
    report = mc.run_comparison(config)
    entry = _scale_entropies(_comparison_entry(report), args.bits)
    parameters = {
        "quantity": args.quantity,
        "m": args.m,
        "n": args.n,
        "k": args.k,
        "samples": args.samples,
        "workers": args.workers,
        "units": "bits" if args.bits else "nats",
    }
    record = _record("estimate", parameters, {quantity: entry}, args.seed, report.wall_time_ms)
    _emit(record, args.out)
    return 0 if report.passed else 2


def cmd_verify(args) -> int:
    spec = EnsembleSpec(args.m, args.n, args.k)
    parameters = {"m": args.m, "n": args.n, "k": args.k, "samples": args.samples, "workers": args.workers}
    all_pass = True

    for quantity in ("coherence", "entropy", "diag_entropy", "subentropy"):
        config = mc.EstimatorConfig(
            spec=spec, quantity=quantity, samples=args.samples,
            master_seed=args.seed, workers=args.workers,
        )
        report = mc.run_comparison(config)
        all_pass &= report.passed
        record = _record("verify", parameters, {quantity: _comparison_entry(report)},
                         args.seed, report.wall_time_ms)
        _emit(record, args.out)

    # distributional checks need a sample floor to mean anything
    ks_samples = max(args.samples, _MIN_KS_SAMPLES)

    t0 = time.perf_counter()
    stats = mc.gamma_marginal_test(spec.m, spec.env_dim, ks_samples, args.seed)
    threshold = mc.ks_critical_value(ks_samples)
    ok = bool((stats < threshold).all())
    all_pass &= ok
    _emit(_record("verify", parameters, {"wishart_diagonal_gamma_ks": {
        "statistics": [float(s) for s in stats],
        "threshold": threshold,
        "samples": ks_samples,
        "verdict": "pass" if ok else "fail",
    }}, args.seed, (time.perf_counter() - t0) * 1000.0), args.out)

    t0 = time.perf_counter()
    d = mc.dirichlet_consistency_test(spec, ks_samples, args.seed)
    threshold = mc.ks_critical_value(ks_samples, n2=ks_samples)
    ok = d < threshold
    all_pass &= ok
    _emit(_record("verify", parameters, {"diagonal_dirichlet_consistency_ks": {
        "statistic": d,
        "threshold": threshold,
        "samples": ks_samples,
        "verdict": "pass" if ok else "fail",
    }}, args.seed, (time.perf_counter() - t0) * 1000.0), args.out)

    t0 = time.perf_counter()
    if spec.m == 2:
        xs = np.linspace(0.01, 0.99, 50)
        diffs = [abs(closedforms.eigen_density_m2(spec.env_dim, float(x))
                     - closedforms.derivative_principle_density_m2(spec.env_dim, float(x)))
                 for x in xs]
        max_diff = max(diffs)
        ok = max_diff < 1e-10
        all_pass &= ok
        entry = {"max_abs_diff": max_diff, "grid_points": 50, "verdict": "pass" if ok else "fail"}
    else:
        entry = {"verdict": "skip", "reason": "m != 2"}
    _emit(_record("verify", parameters, {"derivative_principle_m2": entry},
                  args.seed, (time.perf_counter() - t0) * 1000.0), args.out)

    return 0 if all_pass else 2


def cmd_tables(args) -> int:
    m_list = _parse_int_list(args.m_list, "--m-list")
    n_list = _parse_int_list(args.n_list, "--n-list")
    print("m,n,avg_entropy,avg_diag_entropy,avg_coherence,avg_subentropy,max_subentropy,rel_err_S,rel_err_Q")
    for m in m_list:
        for n in n_list:
            if m > n:
                continue
            s_bar = closedforms.avg_entropy_page(m, n)
            q_bar = closedforms.avg_subentropy(m, n)
            q_max = closedforms.max_subentropy(m)
            cells = [
                str(m),
                str(n),
                f"{s_bar:.12g}",
                f"{closedforms.avg_diag_entropy(m, n):.12g}",
                f"{closedforms.avg_coherence(m, n):.12g}",
                f"{q_bar:.12g}",
                f"{q_max:.12g}",
            ]
            if m >= 2:
                cells.append(f"{(math.log(m) - s_bar) / math.log(m):.12g}")
                cells.append(f"{(q_max - q_bar) / q_max:.12g}")
            else:
                cells.extend(["", ""])
            print(",".join(cells))
    return 0


def cmd_concentration(args) -> int:
    spec = EnsembleSpec(args.m, args.n, args.k)
    t0 = time.perf_counter()
    fraction, bound = mc.empirical_concentration(
        spec, args.epsilon, args.samples, args.seed, workers=args.workers
    )
    passed = fraction <= bound
    results = {
        "concentration": {
            "epsilon": args.epsilon,
            "empirical_fraction": fraction,
            "bound": bound,
            "bound_vacuous": bound >= 1.0,
            "verdict": "pass" if passed else "fail",
        }
    }
    parameters = {"m": args.m, "n": args.n, "k": args.k, "epsilon": args.epsilon,
                  "samples": args.samples, "workers": args.workers}
    _emit(_record("concentration", parameters, results, args.seed,
                  (time.perf_counter() - t0) * 1000.0), args.out)
    return 0 if passed else 2


def _complex_matrix_json(matrix: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def cmd_sample(args) -> int:
    spec = EnsembleSpec(args.m, args.n, args.k)
    stream = RngStream(SeedSpec(args.seed, 0))
    for _ in range(args.count):
        if args.what == "diag":
            payload = [float(x) for x in sample_diag_dirichlet(stream, spec)]
        else:
            state = sample_mixing_state(stream, spec)
            if args.what == "state":
                payload = _complex_matrix_json(state.matrix)
            else:
                payload = [float(x) for x in state.spectrum]
        print(json.dumps(_sig12(payload), separators=(", ", ": ")))
    return 0


def _parse_int_list(raw: str, flag: str) -> list[int]:
    items = [s for s in raw.split(",") if s.strip()]
    if not items:
        raise UsageError(f"{flag} must contain at least one integer")
    try:
        return [int(s) for s in items]
    except ValueError as exc:
        raise UsageError(f"{flag} must be a comma-separated integer list: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="randcoh", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, samples=True):
        p.add_argument("--m", type=int, required=True, help="system dimension")
        p.add_argument("--n", type=int, required=True, help="environment dimension (m <= n)")
        p.add_argument("--k", type=int, default=1, help="mixing order (default 1)")
        p.add_argument("--seed", type=int, required=True, help="64-bit master seed")
        if samples:
            p.add_argument("--samples", type=int, required=True, help="Monte Carlo sample count")
            p.add_argument("--workers", type=int, default=mc.default_workers(),
                           help="parallel workers (default: available parallelism)")
        p.add_argument("--out", type=str, default=None, help="also append JSONL records to this file")

    p_est = sub.add_parser("estimate", help="one MC estimate vs its closed form")
    p_est.add_argument("--quantity", required=True,
                       choices=["entropy", "diag-entropy", "coherence", "subentropy"])
    add_common(p_est)
    p_est.add_argument("--bits", action="store_true",
                       help="display entropies in bits (stored closed forms stay in nats)")
    p_est.set_defaults(func=cmd_estimate)

    p_ver = sub.add_parser("verify", help="full MC + distributional check suite")
    add_common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_tab = sub.add_parser("tables", help="closed-form tables as CSV")
    p_tab.add_argument("--m-list", required=True, help="comma-separated m values")
    p_tab.add_argument("--n-list", required=True, help="comma-separated n values")
    p_tab.set_defaults(func=cmd_tables)

    p_con = sub.add_parser("concentration", help="empirical tail fraction vs the theoretical bound")
    p_con.add_argument("--epsilon", type=float, required=True, help="deviation threshold (> 0)")
    add_common(p_con)
    p_con.set_defaults(func=cmd_concentration)

    p_sam = sub.add_parser("sample", help="dump sampled states or diagnostics as JSONL")
    p_sam.add_argument("--count", type=int, required=True, help="number of draws")
    p_sam.add_argument("--what", choices=["state", "diag", "spectrum"], default="state")
    add_common(p_sam, samples=False)
    p_sam.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RandcohError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
