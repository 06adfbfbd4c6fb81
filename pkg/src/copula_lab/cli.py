"""Command-line interface.

Subcommands: families, sample, curve, sweep, verify, rank.
Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 IO error.
COPULA_LAB_THREADS caps the worker count (default: machine parallelism).
"""

from __future__ import annotations

import argparse
import sys

from . import experiments
from .models import (
    ALL_FAMILIES,
    CopulaLabError,
    ConfigError,
    CopulaModel,
    DEFAULT_DELTA,
    DEFAULT_NU,
    _GRID_SPECS,
    _THETA_DOMAIN,
    default_theta_grid,
)
from .sampling import sample
from .verification import GridSpec


def parse_theta_spec(spec: str) -> list[float]:
    """Either a comma list '0.5,1,2' or a range 'lo:hi:step' (inclusive)."""
    spec = spec.strip()
    try:
        if ":" in spec:
            lo_s, hi_s, step_s = spec.split(":")
            lo, hi, step = float(lo_s), float(hi_s), float(step_s)
            if step <= 0 or hi < lo:
                raise ValueError
            n = int(round((hi - lo) / step)) + 1
            vals = [lo + k * step for k in range(n)]
            return [v for v in vals if v <= hi + 1e-9]
        return [float(tok) for tok in spec.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad theta spec {spec!r}; use 'a,b,c' or 'lo:hi:step'") from exc


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


_CONFIG_KEYS = ("family", "theta", "delta", "nu", "dim", "samples", "reps",
                "seed", "out", "grid_res", "tol", "order", "mode", "top",
                "data", "mi_family", "no_plot")


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Apply --config file values wherever the flag was left at its default."""
    if not getattr(args, "config", None):
        return args
    file_vals = _load_config_file(args.config)
    unknown = set(file_vals) - set(_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, raw in file_vals.items():
        if not hasattr(args, key):
            continue
        if args._explicit and key in args._explicit:
            continue  # flags override the file
        current = getattr(args, key)
        if key in ("delta", "nu", "tol"):
            setattr(args, key, float(raw))
        elif key in ("dim", "reps", "seed", "grid_res", "order", "top"):
            setattr(args, key, int(raw))
        elif key == "no_plot":
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        else:
            setattr(args, key, raw)
    return args


class _TrackingParser(argparse.ArgumentParser):
    """Records which destinations were set explicitly on the command line."""

    def parse_args(self, argv=None, namespace=None):
        ns = super().parse_args(argv, namespace)
        explicit = set()
        argv = sys.argv[1:] if argv is None else list(argv)
        for action in self._iter_all_actions():
            for opt in action.option_strings:
                if any(a == opt or a.startswith(opt + "=") for a in argv):
                    explicit.add(action.dest)
        ns._explicit = explicit
        return ns

    def _iter_all_actions(self):
        seen = []
        stack = [self]
        while stack:
            parser = stack.pop()
            for action in parser._actions:
                if isinstance(action, argparse._SubParsersAction):
                    stack.extend(action.choices.values())
                else:
                    seen.append(action)
        return seen


def build_parser() -> _TrackingParser:
    parser = _TrackingParser(prog="copula-lab", description=__doc__,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_family=True):
        if needs_family:
            p.add_argument("--family", required=True, choices=ALL_FAMILIES)
        p.add_argument("--theta", default=None,
                       help="comma list or lo:hi:step (default: family grid)")
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--dim", type=int, default=2)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--config", default=None,
                       help="key = value file mirroring the flags")

    p_fam = sub.add_parser("families", help="list the family catalog")
    p_fam.add_argument("--config", default=None)

    p_sample = sub.add_parser("sample", help="draw copula samples to CSV")
    add_common(p_sample)
    p_sample.add_argument("--samples", type=int, default=1000)

    p_curve = sub.add_parser("curve", help="entropy-vs-parameter curve")
    add_common(p_curve)
    p_curve.add_argument("--samples", type=int, default=1000)
    p_curve.add_argument("--reps", type=int, default=50)
    p_curve.add_argument("--no-plot", action="store_true", dest="no_plot")

    p_sweep = sub.add_parser("sweep", help="monotone fraction vs sample size")
    add_common(p_sweep)
    p_sweep.add_argument("--samples", default="500,1000,2000,5000,10000",
                         help="comma list of sample sizes")
    p_sweep.add_argument("--reps", type=int, default=50)
    p_sweep.add_argument("--no-plot", action="store_true", dest="no_plot")

    p_verify = sub.add_parser("verify", help="sufficient-condition battery")
    add_common(p_verify)
    p_verify.add_argument("--grid-res", type=int, default=50, dest="grid_res")
    p_verify.add_argument("--tol", type=float, default=None)
    p_verify.add_argument("--order", type=int, default=6)
    p_verify.add_argument("--mode", choices=("auto", "tp2", "rr2"), default="auto")

    p_rank = sub.add_parser("rank", help="rank column pairs by |Spearman|")
    p_rank.add_argument("--data", required=True, help="numeric CSV dataset")
    p_rank.add_argument("--top", type=int, default=10)
    p_rank.add_argument("--mi-family", default=None, dest="mi_family",
                        choices=ALL_FAMILIES)
    p_rank.add_argument("--seed", type=int, default=0)
    p_rank.add_argument("--out", default=None)
    p_rank.add_argument("--config", default=None)
    return parser


def _cmd_families(_args) -> int:
    print(f"{'family':<13} {'theta domain':<16} {'extras':<12} default grid")
    for fam in ALL_FAMILIES:
        dom = _THETA_DOMAIN[fam]
        dom_s = "-" if dom is None else f"{dom[0]:g}..{dom[1]:g}"
        extras = []
        if fam in DEFAULT_DELTA:
            extras.append("delta>=1")
        if fam == "student_t":
            extras.append("nu>2")
        if fam.startswith("mv_") or fam == "independence":
            extras.append("d>=2")
        spec = _GRID_SPECS.get(fam)
        grid_s = "-" if spec is None else f"{spec[0]:g}..{spec[1]:g} step {spec[2]:g}"
        print(f"{fam:<13} {dom_s:<16} {','.join(extras) or '-':<12} {grid_s}")
    return 0


def _theta_list(args, family: str) -> list[float]:
    if args.theta is None:
        return [float(t) for t in default_theta_grid(family)]
    return parse_theta_spec(args.theta)


def _cmd_sample(args) -> int:
    if args.family == "independence":
        theta = 0.0
    elif args.theta is None:
        raise ConfigError("sample requires --theta for parameterized families")
    else:
        theta = parse_theta_spec(args.theta)[0]
    delta = args.delta if args.delta is not None else DEFAULT_DELTA.get(args.family)
    nu = args.nu if args.nu is not None else (
        DEFAULT_NU if args.family == "student_t" else None)
    m = CopulaModel(family=args.family, theta=theta, delta=delta, nu=nu,
                    dim=args.dim)
    s = sample(m, int(args.samples), args.seed)
    if args.out:
        header = [f"u{i + 1}" for i in range(s.cols)]
        experiments._write_csv(args.out, header, s.values.tolist())
        print(f"wrote {s.rows} samples to {args.out}")
    else:
        for row in s.values[:20]:
            print(",".join(f"{x:.6f}" for x in row))
        if s.rows > 20:
            print(f"... ({s.rows} rows total; use --out to save)")
    return 0


def _cmd_curve(args) -> int:
    grid = _theta_list(args, args.family) if args.theta else None
    config = experiments.ExperimentConfig(
        family=args.family, theta_grid=grid, delta=args.delta, nu=args.nu,
        dim=args.dim, samples_m=int(args.samples), repetitions_r=args.reps,
        seed=args.seed, output_path=args.out,
        render_figure=not args.no_plot)
    report = experiments.run_entropy_curve(config)
    print(f"{args.family}: monotone_fraction={report.monotone_fraction:.4f} "
          f"rank_correlation={report.rank_correlation:.4f}"
          + (" (single point)" if report.single_point else ""))
    if args.out:
        print(f"wrote {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    grid = _theta_list(args, args.family) if args.theta else None
    try:
        sizes = [int(tok) for tok in str(args.samples).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --samples list {args.samples!r}") from exc
    config = experiments.ExperimentConfig(
        family=args.family, theta_grid=grid, delta=args.delta, nu=args.nu,
        dim=args.dim, samples_m=max(sizes[0], 10), repetitions_r=args.reps,
        seed=args.seed, output_path=args.out,
        render_figure=not args.no_plot)
    report = experiments.run_size_sweep(config, sizes)
    for size, frac in zip(report.sample_sizes, report.mean_monotone_fraction):
        print(f"size={size:<8d} mean_monotone_fraction={frac:.4f}")
    if args.out:
        print(f"wrote {args.out}")
    return 0


def _cmd_verify(args) -> int:
    thetas = _theta_list(args, args.family)
    grid = GridSpec(resolution=args.grid_res)
    summary = experiments.run_verify(
        args.family, thetas, delta=args.delta, nu=args.nu, dim=args.dim,
        grid=grid, max_order=args.order, mode=args.mode, seed=args.seed,
        output_path=args.out)
    for rep in summary.reports:
        if args.tol is not None:
            rep.passed = rep.worst_violation <= args.tol
            rep.tolerance = args.tol
        print(rep)
    for name, ok in summary.conditions.items():
        print(f"condition {name}: {'satisfied' if ok else 'NOT satisfied'}")
    return 0 if summary.passed else 1


def _cmd_rank(args) -> int:
    pairs = experiments.rank_pairs(args.data, args.top, mi_family=args.mi_family,
                                   seed=args.seed, output_path=args.out)
    print(f"{'rank':<5} {'col_i':<12} {'col_j':<12} {'|spearman|':<12} mi")
    for rp in pairs:
        mi_s = "" if rp.mi_estimate is None else f"{rp.mi_estimate:.4f}"
        print(f"{rp.rank:<5d} {rp.col_i:<12} {rp.col_j:<12} "
              f"{rp.abs_spearman:<12.4f} {mi_s}")
    return 0


_COMMANDS = {
    "families": _cmd_families,
    "sample": _cmd_sample,
    "curve": _cmd_curve,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "rank": _cmd_rank,
}


def _merge_negative_values(argv):
    """Join '--theta -1:1:0.5' into '--theta=-1:1:0.5' so argparse accepts it."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--theta", "--delta", "--nu") and i + 1 < len(argv) \
                and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1 \
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_merge_negative_values(argv))
    try:
        args = _merge_config(args)
        return _COMMANDS[args.command](args)
    except (ConfigError, CopulaLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
