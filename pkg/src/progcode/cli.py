"""Batch experiment runner.

Subcommands:
  sweep          run an SNR sweep, write CSV + JSON summary + manifest
  verify-lemmas  run the exact property suites
  constants      print the codec constants with their derivations
  trial          run one trial and dump its full record as JSON

Every sweep writes a manifest that echoes the complete configuration;
re-running from the manifest reproduces the CSV byte for byte, regardless
of the worker count (override with --workers or PROGCODE_WORKERS).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .codec import (
    EncoderParams,
    alpha_series,
    codeword_gap_edges,
    codeword_range,
    second_moment,
)
from .sim import SimConfig, SweepPoint, run_sweep, run_trial, trial_rng

CSV_HEADER = (
    "snr_db,trials,mse_mean,mse_ci95,sdr_db,event_a_rate,"
    "opta_sdr_db,achievable_mse_bound,baseline_sdr_db,ell"
)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2


@dataclass
class RunManifest:
    """Everything needed to reproduce a sweep, plus bookkeeping."""

    config: dict
    code_version: str
    started: str
    finished: str
    outputs: dict

    def save(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2) + "\n", encoding="utf-8")

    @staticmethod
    def load_config(path: Path) -> SimConfig:
        data = json.loads(path.read_text(encoding="utf-8"))
        cfg = data["config"]
        return SimConfig(
            n_uses=cfg["n_uses"],
            depth=cfg["depth"],
            snr_grid_db=tuple(cfg["snr_grid_db"]),
            trials_per_point=cfg["trials_per_point"],
            master_seed=cfg["master_seed"],
            workers=cfg.get("workers", 1),
        )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def emit_csv(points: list[SweepPoint], path: Path) -> None:
    """Write sweep results as UTF-8 CSV, one row per point, ascending snr_db."""
    if not points:
        raise ValueError("no sweep points to write")
    lines = [CSV_HEADER]
    for p in sorted(points, key=lambda q: q.snr_db):
        lines.append(
            ",".join(
                (
                    _fmt(p.snr_db),
                    str(p.trials),
                    _fmt(p.mse_mean),
                    _fmt(p.mse_ci95),
                    _fmt(p.sdr_db),
                    _fmt(p.event_a_rate),
                    _fmt(10.0 * math.log10(p.opta_sdr)),
                    _fmt(p.achievable_mse_bound),
                    _fmt(p.baseline_sdr_db),
                    "" if p.ell is None else str(p.ell),
                )
            )
        )
    try:
        path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def _point_summary(p: SweepPoint) -> dict:
    d = asdict(p)
    d["mse_mean_exact"] = str(p.mse_mean_exact)
    return d


def _parse_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("grid must be start:stop:step or a comma list")
        start, stop, step = (float(v) for v in parts)
        if step <= 0:
            raise argparse.ArgumentTypeError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise argparse.ArgumentTypeError("empty grid")
        return tuple(start + i * step for i in range(count))
    return tuple(float(v) for v in text.split(","))


def _resolve_workers(flag_value: int | None, manifest_value: int | None = None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("PROGCODE_WORKERS")
    if env:
        return int(env)
    if manifest_value is not None:
        return manifest_value
    return 1


def _cmd_sweep(args) -> int:
    if args.manifest:
        config = RunManifest.load_config(Path(args.manifest))
        config = SimConfig(
            n_uses=config.n_uses,
            depth=config.depth,
            snr_grid_db=config.snr_grid_db,
            trials_per_point=config.trials_per_point,
            master_seed=config.master_seed,
            workers=_resolve_workers(args.workers, config.workers),
        )
    else:
        missing = [name for name in ("n", "snr_db", "trials", "seed") if getattr(args, name) is None]
        if missing:
            print(f"sweep: missing required options: {', '.join('--' + m.replace('_', '-') for m in missing)}", file=sys.stderr)
            return EXIT_USAGE
        config = SimConfig(
            n_uses=args.n,
            depth=args.k,
            snr_grid_db=args.snr_db,
            trials_per_point=args.trials,
            master_seed=args.seed,
            workers=_resolve_workers(args.workers),
        )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    summary_path = out_dir / "summary.json"
    manifest_path = out_dir / "manifest.json"

    started = datetime.now(timezone.utc).isoformat()
    points = run_sweep(config)
    finished = datetime.now(timezone.utc).isoformat()

    emit_csv(points, csv_path)
    summary = {
        "config": asdict(config),
        "points": [_point_summary(p) for p in points],
        "error_bound_violations": sum(p.error_bound_violations for p in points),
        "digit_guarantee_violations": sum(p.digit_guarantee_violations for p in points),
    }
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    RunManifest(
        config=asdict(config),
        code_version=__version__,
        started=started,
        finished=finished,
        outputs={"csv": str(csv_path), "summary": str(summary_path)},
    ).save(manifest_path)

    print(f"wrote {csv_path} ({len(points)} points, {config.trials_per_point} trials each)")
    violations = summary["error_bound_violations"] + summary["digit_guarantee_violations"]
    if violations:
        print(
            f"INVARIANT VIOLATION: {summary['error_bound_violations']} error-bound and "
            f"{summary['digit_guarantee_violations']} digit-guarantee failures on "
            "below-threshold trials (expected exactly zero)",
            file=sys.stderr,
        )
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_verify_lemmas(args) -> int:
    from .verify import VerificationError, run_all

    try:
        results = run_all(depth=args.depth, samples=args.samples, seed=args.seed)
    except VerificationError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    for name, cases in results:
        print(f"ok: {name} ({cases} cases)")
    return EXIT_OK


def _cmd_constants(args) -> int:
    params = EncoderParams.create(n_uses=1, depth=args.k)
    moment = second_moment(args.k)
    alpha = alpha_series(args.k)
    lo, hi = codeword_range(params)
    gneg, gpos = codeword_gap_edges(params)
    print(f"depth (truncation)    K = {args.k}")
    print(f"second moment     E[Xu^2] = {float(moment):.12g}   (digit-variance series over k <= {args.k})")
    print(f"series component    alpha = {float(alpha):.12g}   (second moment / 36)")
    print(f"power normalizer    gamma = {float(params.gamma):.12g}   (1/sqrt(second moment), floor at 2^-64)")
    print(f"calibration  gamma^2*E[.] = {float(params.gamma**2 * moment):.17g}")
    print(f"codeword range      |Xu| <= {float(hi):.12g}   (closed form 33/2 - 6e = {33 / 2 - 6 * math.e:.12g})")
    print(f"central gap     ({float(gneg):.12g}, {float(gpos):.12g})   (extreme codewords adjacent to zero; +/-(6e - 65/4))")
    return EXIT_OK


def _cmd_trial(args) -> int:
    params = EncoderParams.create(args.n, args.k)
    sigma = 10.0 ** (-args.snr_db / 20.0)
    record = run_trial(sigma, params, trial_rng(args.seed, 0, args.trial_index))
    payload = {
        "snr_db": args.snr_db,
        "sigma": sigma,
        "n_uses": args.n,
        "depth": args.k,
        "seed": args.seed,
        "trial_index": args.trial_index,
        "u": str(record.u),
        "u_float": float(record.u),
        "z": [str(v) for v in record.z],
        "z_float": [float(v) for v in record.z],
        "u_hat": str(record.u_hat),
        "u_hat_float": float(record.u_hat),
        "sq_err": str(record.sq_err),
        "sq_err_float": float(record.sq_err),
        "ell": record.ell,
        "event_a": record.event_a,
        "error_bound_ok": record.error_bound_ok,
        "digit_guarantee_ok": record.digit_guarantee_ok,
    }
    if args.dump:
        print(json.dumps(payload, indent=2))
    else:
        print(
            f"u={payload['u_float']:+.6g}  u_hat={payload['u_hat_float']:+.6g}  "
            f"sq_err={payload['sq_err_float']:.3e}  ell={record.ell}  event_a={record.event_a}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="progcode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"progcode {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run an SNR sweep and write CSV/JSON results")
    sweep.add_argument("--n", type=int, help="channel uses per source symbol")
    sweep.add_argument("--k", type=int, default=16, help="expansion truncation depth (default 16)")
    sweep.add_argument("--snr-db", type=_parse_grid, help="SNR grid: start:stop:step or comma list, in dB")
    sweep.add_argument("--trials", type=int, help="trials per grid point")
    sweep.add_argument("--seed", type=int, help="master seed")
    sweep.add_argument("--workers", type=int, default=None, help="worker processes (default: PROGCODE_WORKERS or 1)")
    sweep.add_argument("--out", default="results", help="output directory (default: results)")
    sweep.add_argument("--manifest", help="rerun the configuration stored in an existing manifest")
    sweep.set_defaults(func=_cmd_sweep)

    verify = sub.add_parser("verify-lemmas", help="run the exact property suites")
    verify.add_argument("--depth", type=int, default=50, help="max index for the telescoping identity")
    verify.add_argument("--samples", type=int, default=10_000, help="fuzz cases per suite")
    verify.add_argument("--seed", type=int, default=20240811)
    verify.set_defaults(func=_cmd_verify_lemmas)

    constants = sub.add_parser("constants", help="print codec constants and their derivations")
    constants.add_argument("--k", type=int, default=16, help="series/truncation depth (default 16)")
    constants.set_defaults(func=_cmd_constants)

    trial = sub.add_parser("trial", help="run a single trial")
    trial.add_argument("--n", type=int, required=True)
    trial.add_argument("--k", type=int, default=16)
    trial.add_argument("--snr-db", type=float, required=True)
    trial.add_argument("--seed", type=int, required=True)
    trial.add_argument("--trial-index", type=int, default=0)
    trial.add_argument("--dump", action="store_true", help="print the full record as JSON")
    trial.set_defaults(func=_cmd_trial)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
