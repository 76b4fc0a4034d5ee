"""Operator nets on finite probability spaces and their tensor products.

Each factor is a finite probability space with a directed family of linear
operators whose least index acts as integration.  A product index assigns
an index to finitely many factors; every other factor sits at its null
element and is integrated out.  Operators are dense matrices acting along
one axis of an array over the product grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .kernels import fejer

LINEARITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FactorSpace:
    """Finite probability space: sample nodes with weights summing to 1."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points)
        w = np.asarray(self.weights, dtype=float)
        if pts.shape[0] < 1 or w.shape != (pts.shape[0],):
            raise ValueError(f"need one weight per point, got {w.shape} for {pts.shape[0]} points")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def circle(cls, grid: int) -> "FactorSpace":
        """Uniform grid ``j / grid`` on the unit circle."""
        return cls(np.arange(grid) / grid, np.full(grid, 1.0 / grid))

    def __len__(self) -> int:
        return len(self.weights)


def integrate(space: FactorSpace, f) -> complex:
    """Weighted sum ``sum_i w_i f_i``."""
    f = np.asarray(f)
    if f.shape != (len(space),):
        raise ValueError(f"expected {len(space)} values, got shape {f.shape}")
    return complex(space.weights @ f)


def integration_matrix(space: FactorSpace) -> np.ndarray:
    """Rank-one matrix sending ``f`` to the constant ``integral f``."""
    return np.outer(np.ones(len(space)), space.weights)


class OperatorNet:
    """Directed family ``{T_a}`` of linear maps on functions over one factor space.

    ``operators`` maps index to a square matrix or to a callable acting on
    value vectors; callables are materialized column by column and checked
    for linearity on random pairs.  ``le`` is the partial order (defaults to
    ``<=``); ``zero`` must precede every index and act as integration.
    """

    def __init__(
        self,
        space: FactorSpace,
        operators: Mapping[Hashable, np.ndarray | Callable],
        zero: Hashable,
        le: Callable[[Hashable, Hashable], bool] | None = None,
        seed: int = 0,
    ):
        self.space = space
        self.zero = zero
        self.le = le if le is not None else (lambda a, b: a <= b)
        n = len(space)
        rng = np.random.default_rng(seed)
        mats = {}
        for idx, op in operators.items():
            if callable(op):
                mat = np.column_stack([np.asarray(op(e), dtype=complex) for e in np.eye(n)])
                _check_linear(op, mat, rng, idx)
            else:
                mat = np.asarray(op, dtype=complex)
            if mat.shape != (n, n):
                raise ValueError(f"operator {idx!r} has shape {mat.shape}, expected {(n, n)}")
            mats[idx] = mat
        if zero not in mats:
            raise ValueError(f"null index {zero!r} has no operator")
        if not all(self.le(zero, a) for a in mats):
            raise ValueError(f"null index {zero!r} is not below every index")
        if not np.allclose(mats[zero], integration_matrix(space), atol=1e-12, rtol=0):
            raise ValueError("operator at the null index is not integration")
        self.operators = mats

    @property
    def indices(self) -> list:
        return list(self.operators)

    def __getitem__(self, idx) -> np.ndarray:
        return self.operators[idx]

    def upper_bound(self, a, b):
        """Some index above both ``a`` and ``b`` (the net is directed)."""
        for c in self.operators:
            if self.le(a, c) and self.le(b, c):
                return c
        raise ValueError(f"no index above {a!r} and {b!r}")


def _check_linear(op: Callable, mat: np.ndarray, rng, idx) -> None:
    n = mat.shape[0]
    for _ in range(3):
        f, g = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
        a, b = rng.standard_normal(2)
        lhs = np.asarray(op(a * f + b * g))
        rhs = a * np.asarray(op(f)) + b * np.asarray(op(g))
        if not np.allclose(lhs, rhs, atol=LINEARITY_TOL * (1 + np.abs(rhs).max())):
            raise ValueError(f"operator {idx!r} is not linear")
        if not np.allclose(mat @ f, np.asarray(op(f)), atol=LINEARITY_TOL * (1 + np.abs(mat @ f).max())):
            raise ValueError(f"operator {idx!r} does not match its matrix")


def fejer_net(grid: int, degrees: Sequence[int]) -> OperatorNet:
    """Fejér means on a uniform circle grid, indexed by degree (0 = integration)."""
    space = FactorSpace.circle(grid)
    degrees = sorted(set(int(d) for d in degrees) | {0})
    for d in degrees:
        if grid < 2 * d + 2:
            raise ValueError(f"grid {grid} too coarse for degree {d}")
    t = space.points
    ops = {d: fejer(d, np.mod(t[:, None] - t[None, :], 1.0)) / grid for d in degrees}
    return OperatorNet(space, ops, zero=0)


@dataclass(frozen=True)
class ProductNetIndex:
    """Per-factor indices; factors not listed sit at their null element."""

    entries: Mapping[int, Hashable] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(sorted(dict(self.entries).items())))

    def at(self, k: int, nets: Sequence[OperatorNet]):
        return self.entries.get(k, nets[k].zero)

    def support(self, nets: Sequence[OperatorNet]) -> list[int]:
        return [k for k, a in self.entries.items() if a != nets[k].zero]

    def le(self, other: "ProductNetIndex", nets: Sequence[OperatorNet]) -> bool:
        """Componentwise order of the product net."""
        return all(nets[k].le(self.at(k, nets), other.at(k, nets)) for k in range(len(nets)))

    def join(self, other: "ProductNetIndex", nets: Sequence[OperatorNet]) -> "ProductNetIndex":
        return ProductNetIndex(
            {k: nets[k].upper_bound(self.at(k, nets), other.at(k, nets)) for k in range(len(nets))}
        )


def tensor_apply(
    nets: Sequence[OperatorNet],
    idx: ProductNetIndex,
    f,
    axis_order: Iterable[int] | None = None,
) -> np.ndarray:
    """Apply ``T^1_{a_1} x ... x T^K_{a_K}`` to values on the product grid.

    Axis ``k`` of ``f`` belongs to factor ``k``.  Factors at their null index
    collapse to the weighted mean along that axis, broadcast back.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != tuple(len(net.space) for net in nets):
        raise ValueError(f"values of shape {f.shape} do not match factor sizes")
    bad = [k for k in idx.entries if not 0 <= k < len(nets)]
    if bad:
        raise ValueError(f"index refers to factors {bad} outside the truncation")
    order = range(len(nets)) if axis_order is None else list(axis_order)
    out = f
    for k in order:
        net = nets[k]
        a = idx.at(k, nets)
        if a == net.zero:
            mean = np.tensordot(net.space.weights, out, axes=(0, k))
            out = np.broadcast_to(np.expand_dims(mean, k), out.shape).copy()
        else:
            out = np.moveaxis(np.tensordot(net[a], out, axes=(1, k)), 0, k)
    return out


def product_grid_values(func: Callable[..., np.ndarray], nets: Sequence[OperatorNet]) -> np.ndarray:
    """Evaluate ``func(*coords)`` on the meshgrid of factor points."""
    mesh = np.meshgrid(*[net.space.points for net in nets], indexing="ij")
    return np.asarray(func(*mesh), dtype=complex)


def default_product_path(nets: Sequence[OperatorNet]) -> list[ProductNetIndex]:
    """Monotone path: step ``s`` activates factors ``0..s-1`` at each net's ``s``-th index."""
    depth = max(len(net.indices) for net in nets)
    steps = max(len(nets), depth - 1)
    path = []
    for s in range(steps + 1):
        entries = {}
        for k in range(min(s, len(nets))):
            ordered = sorted(nets[k].indices, key=lambda a, net=nets[k]: sum(net.le(b, a) for b in net.indices))
            entries[k] = ordered[min(s, len(ordered) - 1)]
        path.append(ProductNetIndex(entries))
    return path


@dataclass
class HarnessStep:
    step: int
    support_size: int
    indices: list
    max_error: float


@dataclass
class HarnessReport:
    steps: list[HarnessStep]
    tolerance: float
    converged: bool

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(
                {
                    "step": s.step,
                    "support_size": s.support_size,
                    "indices": s.indices,
                    "max_error": s.max_error,
                },
                sort_keys=True,
            )
            for s in self.steps
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def theorem4_harness(
    nets: Sequence[OperatorNet],
    f,
    path: Sequence[ProductNetIndex] | None = None,
    tolerance: float = 1e-6,
) -> HarnessReport:
    """Drive a monotone path of product indices and record ``max |T f - f|``.

    ``f`` holds values on the product grid of the (truncated) factors.
    """
    f = np.asarray(f, dtype=complex)
    path = default_product_path(nets) if path is None else list(path)
    for prev, cur in zip(path, path[1:]):
        if not prev.le(cur, nets):
            raise ValueError(f"path is not monotone at step {cur}")
    steps = []
    for s, idx in enumerate(path):
        err = float(np.abs(tensor_apply(nets, idx, f) - f).max())
        steps.append(
            HarnessStep(
                step=s,
                support_size=len(idx.support(nets)),
                indices=[idx.at(k, nets) for k in range(len(nets))],
                max_error=err,
            )
        )
    converged = bool(steps) and steps[-1].max_error <= tolerance
    return HarnessReport(steps=steps, tolerance=tolerance, converged=converged)
