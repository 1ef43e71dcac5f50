"""Command-line entry points.

Subcommands: ``ece`` (binned calibration error of a score file), ``gap``
(train/test ECE difference of two files), ``bounds`` (evaluate any named
closed-form bound), ``synthetic`` (scaling-law experiment), ``recalibrate``
(histogram recalibration with its bound), and ``cmi`` (supersample
mask-information experiment over an n-grid).

Every run writes one run-record JSON (and any CSV data files) under the
output directory (flag ``--out``, else $CALBOUNDS_OUT, else ./runs). Exit
codes: 0 success, 1 internal error, 2 usage or precondition error. Printed
floats carry 6 significant digits; data files keep full precision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .binning import UMB, UWB, uwb_scheme, umb_scheme
from .bounds import (
    binning_bias_bound,
    gen_ece_bound,
    gen_tce_bound,
    high_prob_bound,
    metric_entropy_bound,
    metric_entropy_bound_parametric,
    recalib_holdout_bound,
    recalib_reuse_bound,
    stat_bias_bound,
    total_bias_bound,
)
from .data import RunRecord, load_scores
from .experiments import run_recalibration, run_synthetic_experiment, scored_synthetic_dataset
from .metrics import cube_root_bins, ece, ece_gap, optimal_bins
from .mi import CmiExperimentConfig, run_cmi_experiment
from .models import SyntheticModel, TrainerConfig


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("CALBOUNDS_OUT", "runs")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _scheme_for(args, dataset):
    if args.bins == "auto":
        n = len(dataset)
        lipschitz = args.lipschitz
        if lipschitz is None:
            raise ValueError("--bins auto requires --lipschitz")
        B = optimal_bins(n, lipschitz, args.method)
    else:
        B = int(args.bins)
    if args.method == UWB:
        return uwb_scheme(B)
    return umb_scheme(dataset.scores, B)


def _cmd_ece(args) -> int:
    dataset = load_scores(args.input, format=args.input_format)
    scheme = _scheme_for(args, dataset)
    value = ece(dataset, scheme)
    print(f"ece {_fmt(value.value)} bins {scheme.B} method {scheme.method}")
    record = RunRecord(
        {
            "subcommand": "ece",
            "input": str(args.input),
            "bins": args.bins,
            "method": args.method,
            "lipschitz": args.lipschitz,
        }
    )
    record.add(
        "ece", value.value, B=scheme.B, method=scheme.method, n_e=value.n_e,
        edges=scheme.edges,
    )
    record.save(_out_dir(args))
    return 0


def _cmd_gap(args) -> int:
    d_train = load_scores(args.train, format=args.input_format)
    d_test = load_scores(args.test, format=args.input_format)
    if args.bins == "auto":
        raise ValueError("gap requires an explicit --bins count")
    B = int(args.bins)
    scheme = uwb_scheme(B) if args.method == UWB else umb_scheme(d_train.scores, B)
    gap = ece_gap(d_train, d_test, scheme)
    print(
        f"ece_gap {_fmt(gap.value)} test {_fmt(gap.components[0])} "
        f"train {_fmt(gap.components[1])} bins {scheme.B} method {scheme.method}"
    )
    record = RunRecord(
        {"subcommand": "gap", "train": str(args.train), "test": str(args.test),
         "bins": B, "method": args.method}
    )
    record.add("ece_gap", gap.value, components=list(gap.components), B=scheme.B)
    record.save(_out_dir(args))
    return 0


_BOUND_NAMES = (
    "stat-bias",
    "binning-bias",
    "total-bias",
    "high-prob",
    "gen-ece",
    "gen-tce",
    "metric-entropy",
    "metric-entropy-parametric",
    "recalib-reuse",
    "recalib-holdout",
)


def _evaluate_bound(args):
    name = args.name
    variant = args.variant

    def need(attr, flag):
        value = getattr(args, attr)
        if value is None:
            raise ValueError(f"bound {name} requires {flag}")
        return value

    if name == "stat-bias":
        return stat_bias_bound(need("bins", "--bins"), need("n", "--n"), variant)
    if name == "binning-bias":
        return binning_bias_bound(
            need("bins", "--bins"), need("n", "--n"), need("lipschitz", "--lipschitz"), variant
        )
    if name == "total-bias":
        return total_bias_bound(
            need("bins", "--bins"), need("n", "--n"), need("lipschitz", "--lipschitz"), variant
        )
    if name == "high-prob":
        return high_prob_bound(need("bins", "--bins"), need("n", "--n"), need("delta", "--delta"))
    if name == "gen-ece":
        return gen_ece_bound(need("ecmi", "--ecmi"), need("bins", "--bins"), need("n", "--n"))
    if name == "gen-tce":
        return gen_tce_bound(
            need("ecmi", "--ecmi"),
            args.fcmi,
            need("bins", "--bins"),
            need("n", "--n"),
            need("lipschitz", "--lipschitz"),
            variant,
        )
    if name == "metric-entropy":
        return metric_entropy_bound(
            need("bins", "--bins"),
            need("n", "--n"),
            need("lipschitz", "--lipschitz"),
            need("delta", "--delta"),
            need("log_n", "--log-n"),
        )
    if name == "metric-entropy-parametric":
        return metric_entropy_bound_parametric(
            need("bins", "--bins"),
            need("n", "--n"),
            need("lipschitz", "--lipschitz"),
            need("dim", "--dim"),
            need("l0", "--l0"),
        )
    if name == "recalib-reuse":
        return recalib_reuse_bound(
            need("i1", "--i1"), need("i2", "--i2"), need("bins", "--bins"), need("n", "--n")
        )
    if name == "recalib-holdout":
        return recalib_holdout_bound(need("bins", "--bins"), need("n_re", "--n-re"))
    raise ValueError(f"unknown bound name: {name}")


def _cmd_bounds(args) -> int:
    report = _evaluate_bound(args)
    print(json.dumps(report.to_dict(), sort_keys=True))
    record = RunRecord({"subcommand": "bounds", "name": args.name})
    record.add(report.name, report.value, **report.inputs, variant=report.variant)
    record.save(_out_dir(args))
    return 0


def _parse_grid(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _cmd_synthetic(args) -> int:
    if args.b_rule.startswith("fixed:"):
        b_rule = ("fixed", int(args.b_rule.split(":", 1)[1]))
    elif args.b_rule in ("optimal", "cube_root"):
        b_rule = args.b_rule
    else:
        raise ValueError(f"unknown bin rule: {args.b_rule}")
    n_grid = _parse_grid(args.n_grid)
    result = run_synthetic_experiment(
        args.beta0, args.beta1, n_grid, args.reps, b_rule, args.seed, n_mc=args.n_mc
    )
    out = _out_dir(args)
    _write_csv(
        out / "synthetic_gaps.csv",
        ["n", "rep", "B", "ece", "tce", "tce_gap", "bound"],
        ([r["n"], r["rep"], r["B"], r["ece"], r["tce"], r["tce_gap"], r["bound"]] for r in result.rows),
    )
    print(
        f"slope {_fmt(result.slope)} tce {_fmt(result.tce.value)} "
        f"lipschitz {_fmt(result.lipschitz)}"
    )
    record = RunRecord(
        {
            "subcommand": "synthetic",
            "beta0": args.beta0,
            "beta1": args.beta1,
            "n_grid": n_grid,
            "reps": args.reps,
            "b_rule": args.b_rule,
            "seed": args.seed,
            "n_mc": args.n_mc,
        }
    )
    record.add("loglog_slope", result.slope, n_grid=n_grid, reps=args.reps)
    record.add(
        "tce_mc", result.tce.value, std_error=result.tce.std_error, n_mc=args.n_mc,
        beta0=args.beta0, beta1=args.beta1,
    )
    record.add("lipschitz", result.lipschitz, grid=1000)
    record.save(out)
    return 0


def _cmd_recalibrate(args) -> int:
    if args.input:
        pool = load_scores(args.input, format=args.input_format)
    else:
        model = SyntheticModel(args.beta0, args.beta1)
        pool = scored_synthetic_dataset(model, args.n_total, args.seed, 7)
    result = run_recalibration(
        pool,
        variant=args.variant,
        B=args.bins,
        eval_split=args.eval_split,
        seed=args.seed,
        n_re=args.n_re,
        i_delta1=args.i1,
        i_delta2=args.i2,
    )
    print(
        f"variant {result.variant} bins {result.B} tce_recal {_fmt(result.tce_recalibrated)} "
        f"ece_raw {_fmt(result.ece_raw)} bound {_fmt(result.bound)}"
    )
    record = RunRecord(
        {
            "subcommand": "recalibrate",
            "variant": args.variant,
            "bins": args.bins,
            "eval_split": args.eval_split,
            "n_re": args.n_re,
            "seed": args.seed,
            "input": str(args.input) if args.input else None,
            "beta0": args.beta0,
            "beta1": args.beta1,
            "n_total": args.n_total,
            "test_disjoint_from_fit": True,
        }
    )
    record.add(
        "tce_recalibrated", result.tce_recalibrated,
        B=result.B, n_fit=result.n_fit, n_test=result.n_test, variant=result.variant,
    )
    record.add("ece_raw", result.ece_raw, B=result.B, n_test=result.n_test)
    record.add(
        "bound", result.bound, B=result.B,
        n_re=args.n_re if args.variant == "holdout" else result.n_fit,
        i_delta1=args.i1, i_delta2=args.i2, variant=args.variant,
    )
    record.save(_out_dir(args))
    return 0


def _cmd_cmi(args) -> int:
    trainer = TrainerConfig(args.lr, args.epochs, args.seed)
    n_grid = _parse_grid(args.n_grid)
    out = _out_dir(args)
    summary_rows = []
    for n in n_grid:
        B = args.bins if args.bins is not None else cube_root_bins(n)
        cfg = CmiExperimentConfig(
            n=n,
            B=B,
            trainer=trainer,
            seed=args.seed,
            n_supersamples=args.n_supersamples,
            n_masks=args.n_masks,
            k=args.k,
            method=args.method,
            exhaustive=args.exhaustive,
        )
        result = run_cmi_experiment(cfg)
        bound = gen_ece_bound(result.ecmi_est.clamped, B, n).value
        summary_rows.append([n, B, result.mean_gap, result.ecmi_est.value, bound])
        _write_csv(
            out / f"cmi_cells_n{n}.csv",
            ["supersample_idx", "mask_idx", "statistic_name", "value"],
            (
                [c["supersample_idx"], c["mask_idx"], c["statistic_name"], c["value"]]
                for c in result.cells
            ),
        )
        print(
            f"n {n} bins {B} mean_gap {_fmt(result.mean_gap)} "
            f"ecmi {_fmt(result.ecmi_est.value)} bound {_fmt(bound)}"
        )
    _write_csv(out / "cmi_summary.csv", ["n", "B", "mean_gap", "ecmi_est", "bound"], summary_rows)
    record = RunRecord(
        {
            "subcommand": "cmi",
            "n_grid": n_grid,
            "bins": args.bins,
            "n_supersamples": args.n_supersamples,
            "n_masks": args.n_masks,
            "k": args.k,
            "method": args.method,
            "exhaustive": args.exhaustive,
            "lr": args.lr,
            "epochs": args.epochs,
            "seed": args.seed,
        }
    )
    for n, B, mean_gap, ecmi_value, bound in summary_rows:
        record.add("mean_gap", mean_gap, n=n, B=B)
        record.add("ecmi_est", ecmi_value, n=n, B=B, k=args.k)
        record.add("gen_ece_bound", bound, n=n, B=B, ecmi=max(ecmi_value, 0.0))
    record.save(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="calbounds",
        description="Binned calibration error, bias bounds, recalibration, and CMI experiments.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--out", default=None, help="output directory (default $CALBOUNDS_OUT or ./runs)")
        p.add_argument("--seed", type=int, default=0)

    p_ece = sub.add_parser("ece", help="binned calibration error of a score file")
    p_ece.add_argument("input", help="CSV or JSON score file")
    p_ece.add_argument("--bins", default="auto", help="bin count, or 'auto' for the optimal rule")
    p_ece.add_argument("--method", choices=[UWB, UMB], default=UWB)
    p_ece.add_argument("--lipschitz", type=float, default=None, help="L for the auto bin rule")
    p_ece.add_argument("--input-format", choices=["csv", "json"], default=None)
    add_common(p_ece)
    p_ece.set_defaults(func=_cmd_ece)

    p_gap = sub.add_parser("gap", help="ECE gap between a train and a test score file")
    p_gap.add_argument("train")
    p_gap.add_argument("test")
    p_gap.add_argument("--bins", required=True)
    p_gap.add_argument("--method", choices=[UWB, UMB], default=UWB)
    p_gap.add_argument("--input-format", choices=["csv", "json"], default=None)
    add_common(p_gap)
    p_gap.set_defaults(func=_cmd_gap)

    p_bounds = sub.add_parser("bounds", help="evaluate a named closed-form bound")
    p_bounds.add_argument("name", choices=_BOUND_NAMES)
    p_bounds.add_argument("--bins", type=int, default=None)
    p_bounds.add_argument("--n", type=int, default=None)
    p_bounds.add_argument("--n-re", dest="n_re", type=int, default=None)
    p_bounds.add_argument("--lipschitz", type=float, default=None)
    p_bounds.add_argument("--delta", type=float, default=None)
    p_bounds.add_argument("--ecmi", type=float, default=None)
    p_bounds.add_argument("--fcmi", type=float, default=None)
    p_bounds.add_argument("--i1", type=float, default=None)
    p_bounds.add_argument("--i2", type=float, default=None)
    p_bounds.add_argument("--log-n", dest="log_n", type=float, default=None,
                          help="log covering number at radius delta/B")
    p_bounds.add_argument("--dim", type=int, default=None, help="parametric class dimension")
    p_bounds.add_argument("--l0", type=float, default=None, help="parametric class Lipschitz constant")
    p_bounds.add_argument("--variant", choices=[UWB, UMB], default=UWB)
    add_common(p_bounds)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_syn = sub.add_parser("synthetic", help="TCE-gap scaling experiment on the synthetic family")
    p_syn.add_argument("--beta0", type=float, default=0.5)
    p_syn.add_argument("--beta1", type=float, default=-1.5)
    p_syn.add_argument("--n-grid", default="1000,3162,10000,31623,100000",
                       help="comma-separated test-set sizes")
    p_syn.add_argument("--reps", type=int, default=20)
    p_syn.add_argument("--b-rule", default="optimal", help="optimal | cube_root | fixed:K")
    p_syn.add_argument("--n-mc", type=int, default=10**6, help="Monte-Carlo draws for the TCE oracle")
    add_common(p_syn)
    p_syn.set_defaults(func=_cmd_synthetic)

    p_rec = sub.add_parser("recalibrate", help="histogram recalibration with its bound")
    p_rec.add_argument("--input", default=None, help="score file; omit to use the synthetic family")
    p_rec.add_argument("--input-format", choices=["csv", "json"], default=None)
    p_rec.add_argument("--beta0", type=float, default=0.5)
    p_rec.add_argument("--beta1", type=float, default=-1.5)
    p_rec.add_argument("--n-total", type=int, default=8000)
    p_rec.add_argument("--variant", choices=["holdout", "reuse"], required=True)
    p_rec.add_argument("--bins", type=int, required=True)
    p_rec.add_argument("--n-re", dest="n_re", type=int, default=None)
    p_rec.add_argument("--eval-split", type=float, default=0.5)
    p_rec.add_argument("--i1", type=float, default=0.0)
    p_rec.add_argument("--i2", type=float, default=0.0)
    add_common(p_rec)
    p_rec.set_defaults(func=_cmd_recalibrate)

    p_cmi = sub.add_parser("cmi", help="supersample mask-information experiment")
    p_cmi.add_argument("--n-grid", default="100,500,2000")
    p_cmi.add_argument("--bins", type=int, default=None, help="bin count (default: cube-root rule)")
    p_cmi.add_argument("--n-supersamples", type=int, default=5)
    p_cmi.add_argument("--n-masks", type=int, default=10)
    p_cmi.add_argument("--k", type=int, default=3)
    p_cmi.add_argument("--method", choices=[UWB, UMB], default=UMB)
    p_cmi.add_argument("--exhaustive", action="store_true",
                       help="enumerate all 2^n masks (n <= 12) and use the plug-in estimator")
    p_cmi.add_argument("--lr", type=float, default=0.5)
    p_cmi.add_argument("--epochs", type=int, default=300)
    add_common(p_cmi)
    p_cmi.set_defaults(func=_cmd_cmi)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 2
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # internal failure
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
