"""Seeded convergence studies of Fejér means on truncations of the torus.

"Almost everywhere" is measured by error quantiles over random sample
points: for each dimension ``p`` the net path from :func:`enumerate_net` is
walked, and ``|sigma - f|`` is recorded at every step.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from . import __version__
from .funcspace import (
    Function,
    QuadratureError,
    evaluate,
    function_from_spec,
    orlicz_functional,
)
from .index_core import Schedule, enumerate_net
from .summation import fejer_mean_table, fejer_mean_weights

log = logging.getLogger(__name__)

ORLICZ_TAGS = (0, 1, 2, 3)


@dataclass
class ExperimentConfig:
    function: dict
    schedule: dict = field(default_factory=lambda: {"kind": "cube"})
    p_max: int = 1
    n_max: int = 16
    points: int | list[list[float]] = 50
    seed: int = 0
    tolerance: float = 1e-2
    verdict_on: str = "err_max"
    output: str | None = None
    base_dir: str | None = None

    def __post_init__(self):
        if self.p_max < 1 or self.n_max < 1:
            raise ValueError("p_max and n_max must be positive")
        if isinstance(self.points, int) and self.points < 1:
            raise ValueError("need at least one sample point")
        if self.verdict_on not in ("err_max", "err_median"):
            raise ValueError(f"verdict_on must be err_max or err_median, got {self.verdict_on!r}")
        Schedule.from_dict(self.schedule)

    @classmethod
    def from_dict(cls, d: Mapping, base_dir: str | Path | None = None) -> "ExperimentConfig":
        known = {k: d[k] for k in d if k in cls.__dataclass_fields__ and k != "base_dir"}
        if "function" not in known:
            raise ValueError("config needs a 'function' record")
        return cls(**known, base_dir=None if base_dir is None else str(base_dir))

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=path.parent)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        d.pop("output")
        return d

    def build_function(self) -> Function:
        return function_from_spec(self.function, self.base_dir)

    def sample_points(self, dim: int) -> np.ndarray:
        if isinstance(self.points, int):
            rng = np.random.default_rng(self.seed)
            return rng.random((self.points, dim))
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("explicit points must be a list of coordinate lists")
        if pts.shape[1] < dim:
            pts = np.hstack([pts, np.zeros((len(pts), dim - pts.shape[1]))])
        return pts


@dataclass
class StepRecord:
    step: int
    p: int
    degrees: list[int]
    err_max: float
    err_median: float


@dataclass
class ConvergenceReport:
    steps: list[StepRecord]
    converged: bool
    tolerance: float
    verdict_on: str = "err_max"
    orlicz: dict[str, float] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    version: str = __version__

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConvergenceReport":
        d = dict(d)
        d["steps"] = [StepRecord(**s) for s in d["steps"]]
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    def metadata(self) -> dict:
        d = self.to_dict()
        d.pop("steps")
        return d


def _orlicz_tags(f: Function) -> dict[str, float]:
    tags = {}
    for d in ORLICZ_TAGS:
        try:
            tags[str(d)] = orlicz_functional(f, d)
        except QuadratureError as exc:
            log.warning("Orlicz functional d=%d not computed: %s", d, exc)
    return tags


def convergence_trace(cfg: ExperimentConfig, f: Function | None = None):
    """Yield ``(p, rect, sigma, target)`` for every step of the experiment."""
    f = cfg.build_function() if f is None else f
    schedule = Schedule.from_dict(cfg.schedule)
    pts = cfg.sample_points(max(cfg.p_max, f.max_coord))
    target = np.asarray(evaluate(f, pts))
    for p in range(1, cfg.p_max + 1):
        for rect in enumerate_net(schedule, p, cfg.n_max, cfg.seed):
            yield p, rect, np.asarray(fejer_mean_weights(f, rect, pts)), target


def run_convergence(cfg: ExperimentConfig, f: Function | None = None) -> ConvergenceReport:
    """Walk the net for ``p = 1..p_max`` and record error quantiles per step."""
    f = cfg.build_function() if f is None else f
    steps = []
    for i, (p, rect, sigma, target) in enumerate(convergence_trace(cfg, f)):
        err = np.abs(sigma - target)
        steps.append(
            StepRecord(
                step=i,
                p=p,
                degrees=list(rect.degrees),
                err_max=float(err.max()),
                err_median=float(np.median(err)),
            )
        )
    final = getattr(steps[-1], cfg.verdict_on) if steps else float("inf")
    return ConvergenceReport(
        steps=steps,
        converged=bool(final <= cfg.tolerance),
        tolerance=cfg.tolerance,
        verdict_on=cfg.verdict_on,
        orlicz=_orlicz_tags(f),
        config=cfg.echo(),
    )


@dataclass
class PointResult:
    point: list[float]
    worst_rect: list[int]
    worst_error: float
    best_rect: list[int]
    best_error: float
    cube_error: float


@dataclass
class AdversarialReport:
    p: int
    n_max: int
    points: list[PointResult]
    partial: bool
    scanned: int
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def adversarial_search(
    f: Function,
    p: int,
    n_max: int,
    points,
    budget: int = 2_000_000,
) -> AdversarialReport:
    """Scan every rectangle ``(N_1..N_p)`` with ``N_j <= n_max`` for the worst Fejér error.

    The cube ``(n_max, ..., n_max)`` is reported for contrast.  When the
    rectangle count exceeds ``budget`` the scan is cut to the largest cube
    that fits and the report is flagged partial.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    n_scan = n_max
    while (n_scan + 1) ** p > budget and n_scan > 0:
        n_scan -= 1
    partial = n_scan < n_max
    if partial:
        log.warning("budget %d allows degrees up to %d of %d", budget, n_scan, n_max)
    target = np.asarray(evaluate(f, pts))
    table = fejer_mean_table(f, p, n_scan, pts)
    err = np.abs(table - target)  # (n+1,)*p + (P,)
    flat = err.reshape(-1, len(pts))
    results = []
    for i in range(len(pts)):
        worst = int(np.argmax(flat[:, i]))
        best = int(np.argmin(flat[:, i]))
        results.append(
            PointResult(
                point=[float(v) for v in pts[i]],
                worst_rect=[int(v) for v in np.unravel_index(worst, err.shape[:-1])],
                worst_error=float(flat[worst, i]),
                best_rect=[int(v) for v in np.unravel_index(best, err.shape[:-1])],
                best_error=float(flat[best, i]),
                cube_error=float(err[(n_scan,) * p + (i,)]),
            )
        )
    return AdversarialReport(p=p, n_max=n_max, points=results, partial=partial, scanned=(n_scan + 1) ** p)


# --------------------------------------------------------------------------
# output


def csv_header(p_max: int) -> list[str]:
    return ["step", "p"] + [f"N_{j}" for j in range(1, p_max + 1)] + ["err_max", "err_median"]


def report_csv(report: ConvergenceReport, p_max: int | None = None) -> str:
    """CSV body: one row per step, degrees padded with -1 up to ``p_max``."""
    if p_max is None:
        p_max = report.config.get("p_max") or max((s.p for s in report.steps), default=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(p_max))
    for s in report.steps:
        degs = list(s.degrees) + [-1] * (p_max - len(s.degrees))
        w.writerow([s.step, s.p, *degs, repr(s.err_max), repr(s.err_median)])
    return buf.getvalue()


def report_json(report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n"


def emit(report: ConvergenceReport, path: str | Path, fmt: str = "csv") -> list[Path]:
    """Write a report.  CSV goes with a ``.meta.json`` sidecar holding the
    verdict, config echo and library version; JSON carries everything."""
    path = Path(path)
    if fmt == "json":
        path.write_text(report_json(report))
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    path.write_text(report_csv(report))
    meta = path.with_name(path.name + ".meta.json")
    meta.write_text(json.dumps(report.metadata(), sort_keys=True, indent=1) + "\n")
    return [path, meta]


def parse_report(text: str) -> ConvergenceReport:
    return ConvergenceReport.from_dict(json.loads(text))


def adversarial_csv(report: AdversarialReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = len(report.points[0].point) if report.points else report.p
    w.writerow(
        [f"x_{j}" for j in range(1, d + 1)]
        + [f"worst_N_{j}" for j in range(1, report.p + 1)]
        + ["worst_error", "best_error", "cube_error"]
    )
    for r in report.points:
        w.writerow([repr(v) for v in r.point] + r.worst_rect + [repr(r.worst_error), repr(r.best_error), repr(r.cube_error)])
    return buf.getvalue()
