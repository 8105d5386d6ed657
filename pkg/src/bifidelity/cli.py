"""Command-line surface.

Subcommands wire the pipeline together:

    generate   built-in model pairs -> paired snapshot files + manifest
    decompose  low-fidelity snapshots -> decomposition file
    samples    decomposition file -> required high-fidelity sample ids
    lift       decomposition + high-fidelity skeleton -> estimated ensemble
    bound      low-fidelity + sub-sampled high-fidelity columns -> report CSV
    efficacy   full pair -> table of bound/true-error ratios

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
All diagnostics go to stderr; results and file paths go to stdout.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .bound import (
    GramianPair,
    default_tau_grid,
    efficacy_study,
    minimize_bound,
    minimize_bound_two_tau,
    tau_grid,
    write_bound_report,
)
from .errors import DataError, NumericalError, SampleMismatch
from .interp import build_id
from .lifting import evaluate_all, lift, required_samples
from .linalg import singular_values
from .models import (
    BeamConfig,
    DiffusionConfig,
    beam_pair,
    diffusion_pair,
    draw_beam_samples,
    draw_diffusion_samples,
)
from .snapio import read_id, read_snapshots, write_id, write_snapshots
from .snapshots import SnapshotMatrix

__all__ = ["cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated knobs shared by the bound/efficacy commands."""

    rank: int | None
    tol: float | None
    tau_min: float
    tau_max: float
    tau_count: int
    tau_scale: str
    n_sub: int | None
    trials: int
    seed: int

    def __post_init__(self):
        if (self.rank is None) == (self.tol is None):
            raise _UsageError("exactly one of --rank or --tol is required")
        if self.tau_count < 1:
            raise _UsageError("--tau-count must be positive")
        if not self.tau_min <= self.tau_max:
            raise _UsageError("--tau-min must not exceed --tau-max")
        if self.trials < 1:
            raise _UsageError("--trials must be positive")

    def grid(self, default: bool):
        if default:
            return default_tau_grid()
        return tau_grid(self.tau_min, self.tau_max, self.tau_count, self.tau_scale)


def _add_tau_flags(p):
    p.add_argument("--tau-min", type=float, default=None, help="grid lower bound")
    p.add_argument("--tau-max", type=float, default=None, help="grid upper bound")
    p.add_argument("--tau-count", type=int, default=None, help="grid point count")
    p.add_argument("--tau-scale", choices=("log", "linear"), default="log")


def _run_config(args) -> tuple[RunConfig, bool]:
    explicit = any(
        getattr(args, name, None) is not None
        for name in ("tau_min", "tau_max", "tau_count")
    )
    cfg = RunConfig(
        rank=getattr(args, "rank", None),
        tol=getattr(args, "tol", None),
        tau_min=args.tau_min if args.tau_min is not None else 1e-6,
        tau_max=args.tau_max if args.tau_max is not None else 1e6,
        tau_count=args.tau_count if args.tau_count is not None else 201,
        tau_scale=args.tau_scale,
        n_sub=getattr(args, "n", None),
        trials=getattr(args, "trials", None) or 1,
        seed=getattr(args, "seed", None) or 0,
    )
    return cfg, not explicit


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bifidelity", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("generate", help="run a built-in model pair")
    p.add_argument("model", choices=("beam", "diffusion"))
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path prefix (default: model name)")
    p.add_argument("--format", choices=("bfsm", "csv"), default="bfsm")
    p.add_argument("--grid", type=int, default=128, help="beam output points")
    p.add_argument("--mesh-low", type=int, default=16)
    p.add_argument("--mesh-high", type=int, default=256)
    p.add_argument("--d-params", type=int, default=5)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("decompose", help="build the interpolative decomposition")
    p.add_argument("--low", required=True, help="low-fidelity snapshot file")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out-id", required=True, help="output decomposition file")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("samples", help="list required high-fidelity sample ids")
    p.add_argument("--id", dest="id_path", required=True)
    p.set_defaults(func=_cmd_samples)

    p = sub.add_parser("lift", help="apply the rule to high-fidelity skeleton columns")
    p.add_argument("--id", dest="id_path", required=True)
    p.add_argument("--high-skeleton", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("bfsm", "csv"), default="bfsm")
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("bound", help="estimate the lifting error from sub-sampled columns")
    p.add_argument("--low", required=True)
    p.add_argument("--high-sub", required=True,
                   help="snapshot file holding only the sub-sampled high-fidelity columns")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    _add_tau_flags(p)
    p.add_argument("--two-tau", action="store_true",
                   help="minimize the two bound terms over independent tau values")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="report CSV path")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("efficacy", help="bound/true-error ratios over repeated sub-samples")
    p.add_argument("--high", required=True)
    p.add_argument("--low", required=True)
    p.add_argument("--rank", type=int, default=10)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    _add_tau_flags(p)
    p.add_argument("--out", default=None, help="optional ratio CSV path")
    p.set_defaults(func=_cmd_efficacy)

    return parser


# --------------------------------------------------------------------------
# command implementations
# --------------------------------------------------------------------------

def _cmd_generate(args) -> int:
    prefix = args.out or args.model
    if args.model == "beam":
        cfg = BeamConfig(n_grid=args.grid)
        samples = draw_beam_samples(args.samples, seed=args.seed, cfg=cfg)
        high, low = beam_pair(samples, cfg)
        config_doc = {"n_grid": cfg.n_grid}
    else:
        cfg = DiffusionConfig(
            mesh_low=args.mesh_low, mesh_high=args.mesh_high, d_params=args.d_params
        )
        samples = draw_diffusion_samples(args.samples, seed=args.seed, cfg=cfg)
        high, low = diffusion_pair(samples, cfg)
        config_doc = {
            "mesh_low": cfg.mesh_low,
            "mesh_high": cfg.mesh_high,
            "d_params": cfg.d_params,
        }
    suffix = "bfsm" if args.format == "bfsm" else "csv"
    high_path = f"{prefix}.high.{suffix}"
    low_path = f"{prefix}.low.{suffix}"
    provenance = {
        "model": args.model,
        "seed": args.seed,
        "samples": args.samples,
        "config": config_doc,
    }
    write_snapshots(high, high_path, fmt=args.format, provenance=provenance)
    write_snapshots(low, low_path, fmt=args.format, provenance=provenance)
    manifest = {
        "model": args.model,
        "seed": args.seed,
        "config": config_doc,
        "sample_ids": list(high.sample_ids),
        # basenames: the files sit next to the manifest, and relative names
        # keep reruns bitwise identical regardless of the working directory
        "files": {"high": Path(high_path).name, "low": Path(low_path).name},
    }
    manifest_path = f"{prefix}.manifest.json"
    Path(manifest_path).write_text(
        json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )
    print(high_path)
    print(low_path)
    print(manifest_path)
    return 0


def _check_mode_flags(args) -> None:
    if (args.rank is None) == (args.tol is None):
        raise _UsageError("exactly one of --rank or --tol is required")


def _decompose_from_args(low, args):
    if args.rank is not None:
        return build_id(low, rank=args.rank)
    return build_id(low, tol=args.tol)


def _cmd_decompose(args) -> int:
    _check_mode_flags(args)
    low = read_snapshots(args.low)
    decomposition = _decompose_from_args(low, args)
    write_id(decomposition, args.out_id, sample_ids=low.sample_ids)
    print(f"rank: {decomposition.rank}")
    print(f"selected columns: {list(decomposition.selected)}")
    print(f"required sample ids: "
          f"{list(required_samples(decomposition, low.sample_ids))}")
    print(f"residual norm: {decomposition.residual_norm!r}")
    print(f"coefficient norm: {decomposition.coeff_norm()!r}")
    print(args.out_id)
    return 0


def _cmd_samples(args) -> int:
    decomposition, ids = read_id(args.id_path)
    if ids is None:
        raise DataError(f"{args.id_path} carries no sample ids")
    for sid in required_samples(decomposition, ids):
        print(sid)
    return 0


def _cmd_lift(args) -> int:
    decomposition, ids = read_id(args.id_path)
    skeleton = read_snapshots(args.high_skeleton)
    if ids is not None:
        needed = required_samples(decomposition, ids)
        if tuple(skeleton.sample_ids) != needed:
            raise SampleMismatch(
                f"high-fidelity skeleton ids {list(skeleton.sample_ids)} do not "
                f"match the required ids {list(needed)}"
            )
    model = lift(decomposition, skeleton.data, sample_ids=skeleton.sample_ids)
    estimate = SnapshotMatrix(
        data=evaluate_all(model),
        sample_ids=ids if ids is not None
        else tuple(f"col-{j:06d}" for j in range(decomposition.n_samples)),
    )
    write_snapshots(estimate, args.out, fmt=args.format,
                    provenance={"kind": "bifidelity-estimate"})
    print(args.out)
    return 0


def _cmd_bound(args) -> int:
    _check_mode_flags(args)
    cfg, use_default = _run_config(args)
    low = read_snapshots(args.low)
    high_sub = read_snapshots(args.high_sub)

    positions = {}
    for pos, sid in enumerate(low.sample_ids):
        positions[sid] = pos
    try:
        idx = [positions[sid] for sid in high_sub.sample_ids]
    except KeyError as exc:
        raise SampleMismatch(
            f"sub-sampled column id {exc.args[0]!r} not present in {args.low}"
        ) from exc

    decomposition = _decompose_from_args(low, args)
    pair = GramianPair.from_columns(
        high_sub.data, low.data[:, idx], n_total=low.n_samples
    )
    sigma = singular_values(low.data)
    minimize = minimize_bound_two_tau if args.two_tau else minimize_bound
    report = minimize(
        pair, sigma, decomposition.coeff_norm(), decomposition.residual_norm,
        cfg.grid(use_default), workers=args.workers,
        subsample_indices=idx,
    )
    print(f"n_sub: {pair.n_sub} of {pair.n_total}")
    print(f"rank: {decomposition.rank}")
    print(f"best_rho: {report.best_rho!r}")
    print(f"best_tau: {report.best_tau!r}")
    if report.best_tau2 is not None:
        print(f"best_tau2: {report.best_tau2!r}")
    print(f"best_k: {report.best_k}")
    print(f"b1: {report.b1!r}")
    print(f"b2: {report.b2!r}")
    if args.out:
        write_bound_report(report, args.out)
        print(args.out)
    return 0


def _cmd_efficacy(args) -> int:
    cfg, use_default = _run_config(args)
    high = read_snapshots(args.high)
    low = read_snapshots(args.low)
    result = efficacy_study(
        high, low, rank=args.rank, n_sub=args.n, trials=args.trials,
        seed=args.seed, grid=cfg.grid(use_default),
    )
    for t, ratio in enumerate(result.ratios):
        print(f"trial {t}: {float(ratio)!r}")
    print(f"mean: {result.mean!r}")
    print(f"true_error: {result.true_error!r}")
    if args.out:
        lines = ["trial,ratio"]
        lines.extend(f"{t},{float(r)!r}" for t, r in enumerate(result.ratios))
        lines.append(f"mean,{result.mean!r}")
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(args.out)
    return 0


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version paths
        return 0 if exc.code in (0, None) else 1
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
