"""Command-line entry point.

Subcommands: ``kernel-table``, ``fourier``, ``fejer``, ``converge``,
``adversarial``, ``tensor-sim``.  Exit status is 0 on success and 2 when a
tolerance-gated run misses its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    ExperimentConfig,
    adversarial_csv,
    adversarial_search,
    emit,
    report_json,
    run_convergence,
)
from .funcspace import evaluate, function_from_spec
from .index_core import RectIndex, Schedule, enumerate_net
from .kernels import dirichlet, fejer
from .summation import fejer_mean_weights, fourier_table
from .tensor_net import fejer_net, product_grid_values, theorem4_harness

EXIT_TOLERANCE = 2

log = logging.getLogger("fejer_torus")


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_function(path: str):
    p = Path(path)
    spec = json.loads(p.read_text())
    return function_from_spec(spec.get("function", spec), p.parent)


def parse_schedule(text: str) -> Schedule:
    """``cube``, ``pringsheim``, ``regular:LAMBDA``, ``dregular:1,2/3:LAMBDA`` or a JSON record."""
    text = text.strip()
    if text.startswith("{"):
        return Schedule.from_dict(json.loads(text))
    kind, _, rest = text.partition(":")
    if kind == "regular":
        return Schedule.regular(float(rest or 1.0))
    if kind == "dregular":
        blocks, _, lam = rest.partition(":")
        parsed = [[int(c) for c in b.split(",")] for b in blocks.split("/")]
        return Schedule.dregular(parsed, float(lam or 1.0))
    return Schedule(kind)


def _read_points(path: str) -> np.ndarray:
    rows = [
        [float(v) for v in row]
        for row in csv.reader(Path(path).read_text().splitlines())
        if row and not row[0].lstrip().startswith("#")
    ]
    try:
        return np.array(rows, dtype=float)
    except ValueError:
        raise SystemExit(f"{path}: ragged point rows")


def cmd_kernel_table(args) -> int:
    kern = dirichlet if args.kind == "dirichlet" else fejer
    t = np.arange(args.grid) / args.grid
    vals = kern(args.l, t)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for ti, v in zip(t, vals):
        w.writerow([repr(float(ti)), repr(float(v))])
    _write(buf.getvalue(), args.out)
    return 0


def cmd_fourier(args) -> int:
    f = _load_function(args.function)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"n_{j}" for j in range(1, args.p + 1)] + ["re", "im"])
    table = fourier_table(f, RectIndex.cube(args.p, args.degree))
    for n, c in sorted(table.coeffs.items(), key=lambda kv: kv[0].dense(args.p)):
        w.writerow(list(n.dense(args.p)) + [repr(c.real), repr(c.imag)])
    _write(buf.getvalue(), args.out)
    return 0


def cmd_fejer(args) -> int:
    f = _load_function(args.function)
    schedule = parse_schedule(args.schedule)
    d = max(args.p, f.max_coord)
    if args.points:
        pts = _read_points(args.points)
        if pts.shape[1] < d:
            pts = np.hstack([pts, np.zeros((len(pts), d - pts.shape[1]))])
    else:
        pts = np.random.default_rng(args.seed).random((args.npoints, d))
    target = np.asarray(evaluate(f, pts))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["p"] + [f"N_{j}" for j in range(1, args.p + 1)]
        + [f"x_{j}" for j in range(1, pts.shape[1] + 1)]
        + ["re_sigma", "im_sigma", "abs_err"]
    )
    for rect in enumerate_net(schedule, args.p, args.nmax, args.seed):
        sigma = np.asarray(fejer_mean_weights(f, rect, pts))
        for x, s, t in zip(pts, sigma, target):
            w.writerow(
                [rect.p, *rect.degrees, *[repr(float(v)) for v in x],
                 repr(float(s.real)), repr(float(s.imag)), repr(float(abs(s - t)))]
            )
    _write(buf.getvalue(), args.out)
    return 0


def cmd_converge(args) -> int:
    cfg_path = Path(args.config)
    raw = json.loads(cfg_path.read_text())
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = ExperimentConfig.from_dict(raw, base_dir=cfg_path.parent)
    report = run_convergence(cfg)
    out = args.out or cfg.output
    if out:
        emit(report, out, args.format)
    else:
        sys.stdout.write(report_json(report))
    log.info("%d steps, converged=%s", len(report.steps), report.converged)
    return 0 if report.converged else EXIT_TOLERANCE


def cmd_adversarial(args) -> int:
    f = _load_function(args.function)
    d = max(args.p, f.max_coord)
    if args.points:
        pts = _read_points(args.points)
    else:
        pts = np.random.default_rng(args.seed).random((args.npoints, d))
    report = adversarial_search(f, args.p, args.nmax, pts, budget=args.budget)
    text = report_json(report) if args.format == "json" else adversarial_csv(report)
    _write(text, args.out)
    return 0


def cmd_tensor_sim(args) -> int:
    cfg_path = Path(args.config)
    cfg = json.loads(cfg_path.read_text())
    nets = [fejer_net(int(fac["factor"]["grid"]), fac["net"]["degrees"]) for fac in cfg["factors"]]
    for fac in cfg["factors"]:
        if fac["net"].get("kind", "fejer") != "fejer":
            raise SystemExit(f"unsupported net kind {fac['net']['kind']!r}")
    f = function_from_spec(cfg["function"], cfg_path.parent)
    if f.max_coord > len(nets):
        raise SystemExit(f"function uses {f.max_coord} coordinates, only {len(nets)} factors")

    def sample(*coords):
        pts = np.stack([c.ravel() for c in coords], axis=1)
        return np.asarray(evaluate(f, pts)).reshape(coords[0].shape)

    values = product_grid_values(sample, nets)
    tol = args.tolerance if args.tolerance is not None else float(cfg.get("tolerance", 1e-6))
    report = theorem4_harness(nets, values, tolerance=tol)
    _write(report.to_jsonl(), args.out)
    return 0 if report.converged else EXIT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fejer-torus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel-table", help="tabulate a Dirichlet or Fejér kernel")
    p.add_argument("--kind", choices=["dirichlet", "fejer"], required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_kernel_table)

    p = sub.add_parser("fourier", help="Fourier coefficients in a cube box")
    p.add_argument("--function", required=True, help="JSON function record")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("fejer", help="Fejér means along a schedule path")
    p.add_argument("--function", required=True)
    p.add_argument("--schedule", default="cube")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--nmax", type=int, default=16)
    p.add_argument("--points", help="CSV of points, one per row")
    p.add_argument("--npoints", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fejer)

    p = sub.add_parser("converge", help="run a convergence experiment from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("adversarial", help="exhaustive worst-rectangle scan")
    p.add_argument("--function", required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--nmax", type=int, default=32)
    p.add_argument("--points")
    p.add_argument("--npoints", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_adversarial)

    p = sub.add_parser("tensor-sim", help="product operator-net convergence harness")
    p.add_argument("--config", required=True)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tensor_sim)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
