"""Command-line interface.

Subcommands: ``compute`` (one estimate, JSON), ``test`` (permutation test,
JSON; or the Type II experiment grid, CSV), ``sweep`` (bandwidth sweep,
CSV), ``synth`` (write a synthetic dataset to CSV), ``bench`` (timing
grid, CSV).  Report commands render a figure next to their CSV unless
``--no-plot`` is given.

Exit codes: 0 on success, 2 for parse/validation errors, 3 for numerical
contract violations.  Failures print one JSON line with an ``error``
field to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .circular import circular_discrepancy, wrap
from .dataset import (
    BlobSpec,
    SampleSet,
    load_csv,
    save_csv,
    synth_blobs,
    synth_hypercube,
    synth_ring,
    two_sample,
)
from .errors import FastmmdError, NumericalContractError, ValidationError
from .estimators import METHODS, SAMPLED_METHODS, EstimatorConfig, compute_estimate
from .fourier import per_frequency_amplitudes
from .hypothesis import bandwidth_sweep, two_sample_test, type2_experiment
from .kernel import ShiftInvariantKernel, sample_spectral
from . import plots

SCHEMA = 1
_GENERATORS = ("blobs", "ring", "hypercube")

# Refuse the quadratic estimator beyond this many samples unless --force.
_EXACT_LIMIT = 10**5


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NumericalContractError as exc:
        _fail(str(exc))
        return 3
    except FastmmdError as exc:
        _fail(str(exc))
        return 2


def _fail(message: str) -> None:
    print(json.dumps({"schema": SCHEMA, "error": message}), file=sys.stderr)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastmmd",
        description="Kernel two-sample testing with exact and linear-time MMD estimators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="CSV dataset (see dataset docs for the format)")
    data.add_argument(
        "--label-column",
        default="label",
        help="label column name, or 0-based index if integer (default: label)",
    )
    data.add_argument(
        "--synth", choices=_GENERATORS, help="generate data instead of reading a file"
    )
    data.add_argument("--n-per-class", type=int, default=1000)
    data.add_argument("--dim", type=int, default=2, help="dimension (hypercube only)")
    data.add_argument("--epsilon", type=float, default=4.0, help="blob eigenvalue ratio")
    data.add_argument("--grid-spacing", type=float, default=5.0)
    data.add_argument(
        "--data-seed", type=int, default=None, help="generator seed (default: --seed)"
    )

    kern = argparse.ArgumentParser(add_help=False)
    kern.add_argument("--kernel", choices=("gaussian", "laplacian"), default="gaussian")
    kern.add_argument("--sigma", type=float, default=1.0)
    kern.add_argument("--k0", type=float, default=1.0)

    est = argparse.ArgumentParser(add_help=False)
    est.add_argument("--method", choices=METHODS, default="fourier")
    est.add_argument("--estimate", choices=("biased", "unbiased"), default=None)
    est.add_argument("--basis", type=int, default=128, help="frequency count L")
    est.add_argument("--block-size", type=int, default=None)
    est.add_argument("--threads", type=int, default=None,
                     help="worker cap (default: FASTMMD_THREADS or 1)")
    est.add_argument("--seed", type=int, default=0)

    p_compute = sub.add_parser(
        "compute", parents=[data, kern, est], help="one squared-MMD estimate as JSON"
    )
    p_compute.add_argument("--output", help="write JSON here instead of stdout")
    p_compute.add_argument("--emit-bank", help="dump the frequency bank as CSV")
    p_compute.add_argument(
        "--emit-amplitudes", help="dump per-frequency amplitudes as CSV (fourier)"
    )
    p_compute.add_argument(
        "--emit-circle", help="dump wrapped angles per frequency as CSV (circular)"
    )
    p_compute.set_defaults(handler=_cmd_compute, default_estimate="biased")

    p_test = sub.add_parser(
        "test", parents=[data, kern, est], help="permutation two-sample test"
    )
    p_test.add_argument("--alpha", type=float, default=0.05)
    p_test.add_argument("--shuffles", type=int, default=1000)
    p_test.add_argument("--output", help="write JSON or grid CSV here")
    p_test.add_argument(
        "--type2-grid", action="store_true",
        help="run the blob Type II experiment grid instead of a single test",
    )
    p_test.add_argument("--epsilons", type=_float_list, default=[1.2, 2.0, 3.0])
    p_test.add_argument("--basis-grid", type=_int_list, default=[16, 256])
    p_test.add_argument("--trials", type=int, default=100)
    p_test.add_argument("--no-plot", action="store_true")
    p_test.set_defaults(handler=_cmd_test, default_estimate="unbiased")

    p_sweep = sub.add_parser(
        "sweep", parents=[data, kern, est], help="MMD across a bandwidth grid"
    )
    p_sweep.add_argument("--sigma-min", type=float, default=0.1)
    p_sweep.add_argument("--sigma-max", type=float, default=100.0)
    p_sweep.add_argument("--steps-per-decade", type=int, default=5)
    p_sweep.add_argument("--repeats", type=int, default=10)
    p_sweep.add_argument("--output", required=True, help="CSV output path")
    p_sweep.add_argument("--no-plot", action="store_true")
    p_sweep.set_defaults(handler=_cmd_sweep, default_estimate="unbiased")

    p_synth = sub.add_parser("synth", parents=[data], help="write synthetic data to CSV")
    p_synth.add_argument("--output", required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(handler=_cmd_synth)

    p_bench = sub.add_parser(
        "bench", parents=[data, kern, est], help="timing grid over N and d"
    )
    p_bench.add_argument("--methods", type=lambda t: t.split(","),
                         default=["exact", "fourier", "fastfood"])
    p_bench.add_argument("--sizes", type=_int_list, default=[1000, 10000])
    p_bench.add_argument("--dims", type=_int_list, default=[16])
    p_bench.add_argument("--output", required=True, help="CSV output path")
    p_bench.add_argument("--force", action="store_true",
                         help="allow exact MMD beyond 1e5 samples")
    p_bench.add_argument("--no-plot", action="store_true")
    p_bench.set_defaults(handler=_cmd_bench, default_estimate="biased")

    return parser


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return args.threads
    return int(os.environ.get("FASTMMD_THREADS", "1"))


def _label_column(args: argparse.Namespace) -> str | int:
    raw = args.label_column
    return int(raw) if isinstance(raw, str) and raw.lstrip("-").isdigit() else raw


def _data_seed(args: argparse.Namespace) -> int:
    if args.data_seed is not None:
        return args.data_seed
    return getattr(args, "seed", 0)


def _synth_data(args: argparse.Namespace, generator: str, seed: int) -> SampleSet:
    if generator == "blobs":
        spec = BlobSpec(args.grid_spacing, args.epsilon, args.n_per_class)
        return two_sample(
            synth_blobs(spec, "P", seed), synth_blobs(spec, "Q", seed + 1)
        )
    if generator == "ring":
        return synth_ring(args.n_per_class, seed)
    return synth_hypercube(args.n_per_class, args.dim, seed)


def _load_data(args: argparse.Namespace) -> SampleSet:
    if args.input and args.synth:
        raise ValidationError("give either --input or --synth, not both")
    if args.input:
        return load_csv(args.input, _label_column(args))
    if args.synth:
        return _synth_data(args, args.synth, _data_seed(args))
    raise ValidationError("no data: provide --input or --synth")


def _estimator_config(args: argparse.Namespace) -> EstimatorConfig:
    kind = args.estimate or args.default_estimate
    return EstimatorConfig(
        method=args.method,
        kind=kind,
        basis_count=args.basis,
        block_size=args.block_size,
        threads=_threads(args),
    )


def _kernel(args: argparse.Namespace) -> ShiftInvariantKernel:
    return ShiftInvariantKernel(args.kernel, args.sigma, args.k0)


def _write_json(doc: dict, output: str | None) -> None:
    text = json.dumps(doc)
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _write_csv(path: str | Path, fieldnames: list[str], rows: list[dict]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def _figure_path(output: str | Path) -> Path:
    return Path(output).with_suffix(".png")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_compute(args: argparse.Namespace) -> int:
    s = _load_data(args)
    kern = _kernel(args)
    config = _estimator_config(args)
    start = time.perf_counter()
    est = compute_estimate(s, kern, config, args.seed)
    wall_ms = (time.perf_counter() - start) * 1000.0
    doc = {
        "schema": SCHEMA,
        "method": config.method,
        "estimate": est.kind,
        "value_sq": est.value_sq,
        "value": est.value,
        "L": est.basis_count,
        "seed": args.seed,
        "n1": s.n1,
        "n2": s.n2,
        "d": s.d,
        "wall_time_ms": wall_ms,
    }
    _emit_diagnostics(args, s, kern, config)
    _write_json(doc, args.output)
    return 0


def _emit_diagnostics(
    args: argparse.Namespace,
    s: SampleSet,
    kern: ShiftInvariantKernel,
    config: EstimatorConfig,
) -> None:
    wants_bank = args.emit_bank or args.emit_amplitudes or args.emit_circle
    if not wants_bank:
        return
    if config.method not in ("fourier", "circular"):
        raise ValidationError(
            "--emit-bank/--emit-amplitudes/--emit-circle need a sampled "
            f"spectral method (fourier or circular), not {config.method!r}"
        )
    bank = sample_spectral(kern, config.basis_count, s.d, args.seed)
    if args.emit_bank:
        rows = [
            {"k": i, **{f"w{j}": bank.omegas[i, j] for j in range(bank.d)}}
            for i in range(bank.basis_count)
        ]
        fields = ["k"] + [f"w{j}" for j in range(bank.d)]
        _write_csv(args.emit_bank, fields, rows)
    if args.emit_amplitudes:
        amps = per_frequency_amplitudes(s, bank, threads=config.threads)
        rows = [
            {
                "k": i,
                "a1": amps["a1"][i],
                "theta1": amps["theta1"][i],
                "a2": amps["a2"][i],
                "theta2": amps["theta2"][i],
                "amp_sq": amps["amp_sq"][i],
            }
            for i in range(bank.basis_count)
        ]
        _write_csv(
            args.emit_amplitudes,
            ["k", "a1", "theta1", "a2", "theta2", "amp_sq"],
            rows,
        )
    if args.emit_circle:
        rows = []
        for i, omega in enumerate(bank.omegas):
            c1, c2 = wrap(omega, s)
            result = circular_discrepancy(c1, c2)
            for group, circ in ((1, c1), (2, c2)):
                for angle, weight in zip(circ.angles, circ.weights):
                    rows.append(
                        {
                            "k": i,
                            "group": group,
                            "angle": angle,
                            "weight": weight if group == 1 else -weight,
                            "eta": result.eta,
                            "decision_angle": result.decision_angle,
                        }
                    )
        _write_csv(
            args.emit_circle,
            ["k", "group", "angle", "weight", "eta", "decision_angle"],
            rows,
        )


def _cmd_test(args: argparse.Namespace) -> int:
    if args.type2_grid:
        return _cmd_type2(args)
    s = _load_data(args)
    kern = _kernel(args)
    config = _estimator_config(args)
    start = time.perf_counter()
    result = two_sample_test(s, kern, config, args.alpha, args.shuffles, args.seed)
    wall_ms = (time.perf_counter() - start) * 1000.0
    doc = {
        "schema": SCHEMA,
        "statistic": result.statistic,
        "threshold": result.threshold,
        "p_value": result.p_value,
        "reject": result.reject,
        "alpha": result.alpha,
        "shuffles": result.shuffles,
        "method": result.method,
        "estimate": result.kind,
        "L": result.basis_count,
        "seed": result.seed,
        "n1": s.n1,
        "n2": s.n2,
        "d": s.d,
        "wall_time_ms": wall_ms,
    }
    _write_json(doc, args.output)
    return 0


def _cmd_type2(args: argparse.Namespace) -> int:
    if not args.output:
        raise ValidationError("--type2-grid needs --output for the CSV table")
    config = _estimator_config(args)
    spec = BlobSpec(args.grid_spacing, 1.0, args.n_per_class)
    cells = type2_experiment(
        spec,
        args.epsilons,
        args.basis_grid,
        args.trials,
        args.alpha,
        args.shuffles,
        args.seed,
        config=config,
        sigma=args.sigma,
        k0=args.k0,
    )
    rows = [
        {
            "epsilon": c.epsilon,
            "L": c.basis_count,
            "trials": c.trials,
            "alpha": c.alpha,
            "shuffles": c.shuffles,
            "reject_rate": c.reject_rate,
            "type2_error": c.type2_error,
        }
        for c in cells
    ]
    _write_csv(
        args.output,
        ["epsilon", "L", "trials", "alpha", "shuffles", "reject_rate", "type2_error"],
        rows,
    )
    figure = None
    if not args.no_plot:
        figure = str(plots.plot_type2(cells, _figure_path(args.output)))
    print(json.dumps({"schema": SCHEMA, "output": str(args.output), "figure": figure}))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    s = _load_data(args)
    config = _estimator_config(args)
    result = bandwidth_sweep(
        s,
        args.kernel,
        args.sigma_min,
        args.sigma_max,
        args.steps_per_decade,
        config,
        args.repeats,
        args.seed,
        k0=args.k0,
    )
    rows = [
        {
            "sigma": float(sig),
            "mean_value_sq": float(mean),
            "std_value_sq": float(std),
            "repeats": args.repeats,
            "method": config.method,
            "estimate": config.kind,
            "L": config.basis_count if config.method in SAMPLED_METHODS else 0,
        }
        for sig, mean, std in zip(result.sigmas, result.means, result.stds)
    ]
    _write_csv(
        args.output,
        ["sigma", "mean_value_sq", "std_value_sq", "repeats", "method", "estimate", "L"],
        rows,
    )
    figure = None
    if not args.no_plot:
        figure = str(
            plots.plot_sweep(
                result.sigmas,
                result.means,
                result.stds,
                _figure_path(args.output),
                label=f"{config.method} ({config.kind})",
            )
        )
    print(
        json.dumps(
            {
                "schema": SCHEMA,
                "argmax_sigma": result.argmax_sigma,
                "output": str(args.output),
                "figure": figure,
            }
        )
    )
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    if not args.synth:
        raise ValidationError("synth needs --synth {blobs,ring,hypercube}")
    seed = args.data_seed if args.data_seed is not None else args.seed
    s = _synth_data(args, args.synth, seed)
    save_csv(s, args.output)
    print(
        json.dumps(
            {"schema": SCHEMA, "output": str(args.output), "n": s.n, "d": s.d}
        )
    )
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    if args.input:
        raise ValidationError("bench generates its own data; use --synth flags")
    generator = args.synth or "hypercube"
    kind = args.estimate or args.default_estimate
    rows = []
    for method in args.methods:
        if method not in METHODS:
            raise ValidationError(f"unknown method {method!r}")
        for n in args.sizes:
            if method == "exact" and n > _EXACT_LIMIT and not args.force:
                raise ValidationError(
                    f"exact MMD with N={n} exceeds the {_EXACT_LIMIT} sample "
                    "guard; pass --force to override"
                )
            for d in args.dims:
                gen_args = argparse.Namespace(**vars(args))
                gen_args.n_per_class = max(1, n // 2)
                gen_args.dim = d
                data = _synth_data(gen_args, generator, _data_seed(args))
                kern = _kernel(args)
                config = EstimatorConfig(
                    method=method,
                    kind="unbiased" if method in ("linear", "btest") else
                    ("biased" if method == "circular" else kind),
                    basis_count=args.basis,
                    block_size=args.block_size,
                    threads=_threads(args),
                )
                est = compute_estimate(data, kern, config, args.seed)  # warm-up
                timings = []
                for _ in range(3):
                    start = time.perf_counter()
                    est = compute_estimate(data, kern, config, args.seed)
                    timings.append((time.perf_counter() - start) * 1000.0)
                rows.append(
                    {
                        "method": method,
                        "N": data.n,
                        "d": data.d,
                        "L": est.basis_count,
                        "wall_time_ms": float(np.median(timings)),
                        "value_sq": est.value_sq,
                    }
                )
    _write_csv(
        args.output, ["method", "N", "d", "L", "wall_time_ms", "value_sq"], rows
    )
    figure = None
    if not args.no_plot:
        figure = str(plots.plot_bench(rows, _figure_path(args.output)))
    print(json.dumps({"schema": SCHEMA, "output": str(args.output), "figure": figure}))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
