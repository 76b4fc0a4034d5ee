"""Test functions on truncations of the infinite torus.

Three families are supported:

* :class:`TrigPoly` -- finite sums of characters ``c_n exp(2 pi i n.x)``;
* :class:`SpikeTensor` -- products of unit-mass indicator spikes
  ``eps**-1 * 1[0 <= x_k < eps]``, with closed-form coefficients and
  Orlicz integrals;
* :class:`CylinderGrid` -- samples on a uniform product grid over the first
  ``m`` coordinates, constant in the remaining ones.

Points are sequences (or ``(P, d)`` arrays) where entry ``k-1`` is the
coordinate ``x_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .index_core import MultiIndex


class QuadratureError(ValueError):
    """Grid too coarse for the requested integral or coefficient."""


class AliasingError(QuadratureError):
    """A requested frequency is not resolved by the sampling grid."""


def _as_points(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim != 2:
        raise ValueError(f"points must be 1-D or 2-D, got shape {arr.shape}")
    return arr, False


def _require_coords(pts: np.ndarray, needed: int) -> None:
    if pts.shape[1] < needed:
        raise ValueError(f"point has {pts.shape[1]} coordinates, function needs {needed}")


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


# --------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class TrigPoly:
    """Sparse trigonometric polynomial ``sum_n c_n theta_n``."""

    coeffs: Mapping[MultiIndex, complex]

    def __post_init__(self):
        clean = {}
        for n, c in dict(self.coeffs).items():
            if not isinstance(n, MultiIndex):
                n = MultiIndex.from_mapping(n) if isinstance(n, Mapping) else MultiIndex.from_dense(n)
            c = complex(c)
            if c != 0:
                clean[n] = clean.get(n, 0) + c
        object.__setattr__(self, "coeffs", {n: c for n, c in clean.items() if c != 0})

    @classmethod
    def constant(cls, c: complex) -> "TrigPoly":
        return cls({MultiIndex(): c})

    @classmethod
    def character(cls, n: MultiIndex | Sequence[int], c: complex = 1.0) -> "TrigPoly":
        if not isinstance(n, MultiIndex):
            n = MultiIndex.from_dense(n)
        return cls({n: c})

    @property
    def max_coord(self) -> int:
        return max((n.max_coord for n in self.coeffs), default=0)

    def degrees(self, m: int | None = None) -> tuple[int, ...]:
        """Largest ``|n_k|`` per coordinate ``1..m``."""
        m = self.max_coord if m is None else m
        out = [0] * m
        for n in self.coeffs:
            for k, v in n.items:
                if k <= m:
                    out[k - 1] = max(out[k - 1], abs(v))
        return tuple(out)

    def conj_product(self) -> "TrigPoly":
        """``|f|**2`` as a trigonometric polynomial (nonnegative by construction)."""
        acc: dict[MultiIndex, complex] = {}
        for a, ca in self.coeffs.items():
            for b, cb in self.coeffs.items():
                n = a - b
                acc[n] = acc.get(n, 0) + ca * np.conj(cb)
        return TrigPoly(acc)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        acc = dict(self.coeffs)
        for n, c in other.coeffs.items():
            acc[n] = acc.get(n, 0) + c
        return TrigPoly(acc)

    def __eq__(self, other) -> bool:
        return isinstance(other, TrigPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))


@dataclass(frozen=True)
class SpikeTensor:
    """Product of unit-mass spikes ``eps_k**-1 * 1[0 <= x_k < eps_k]``."""

    spikes: Mapping[int, float]

    def __post_init__(self):
        clean = {}
        for k, eps in dict(self.spikes).items():
            k, eps = int(k), float(eps)
            if k < 1:
                raise ValueError(f"coordinates start at 1, got {k}")
            if not (0.0 < eps <= 1.0):
                raise ValueError(f"spike width must lie in (0, 1], got {eps} at coordinate {k}")
            clean[k] = eps
        object.__setattr__(self, "spikes", dict(sorted(clean.items())))

    @property
    def max_coord(self) -> int:
        return max(self.spikes, default=0)

    @property
    def height(self) -> float:
        """Value on the support, ``prod eps_k**-1``."""
        return 1.0 / math.prod(self.spikes.values()) if self.spikes else 1.0

    def coeff_1d(self, k: int, n):
        """Fourier coefficients of the factor at coordinate ``k`` (1 if absent)."""
        n = np.asarray(n)
        eps = self.spikes.get(k)
        if eps is None:
            out = np.where(n == 0, 1.0 + 0j, 0j)
            return out if out.ndim else complex(out)
        with np.errstate(invalid="ignore", divide="ignore"):
            z = 2j * np.pi * n * eps
            out = np.where(n == 0, 1.0 + 0j, -np.expm1(-z) / np.where(n == 0, 1.0, z))
        return out if out.ndim else complex(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, SpikeTensor) and self.spikes == other.spikes

    def __hash__(self):
        return hash(tuple(self.spikes.items()))


@dataclass(frozen=True, eq=False)
class CylinderGrid:
    """Samples on the uniform product grid ``{j / G_k}`` of the first ``m`` coordinates.

    ``samples[j_1, ..., j_m]`` is the value at ``(j_1/G_1, ..., j_m/G_m)``.
    """

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(self.samples.shape)

    @property
    def m(self) -> int:
        return self.samples.ndim

    @property
    def max_coord(self) -> int:
        return self.m

    def nodes(self, k: int) -> np.ndarray:
        """Grid nodes of coordinate ``k`` (1-based)."""
        return np.arange(self.sizes[k - 1]) / self.sizes[k - 1]

    @classmethod
    def from_function(cls, f: "Function", sizes: Sequence[int]) -> "CylinderGrid":
        """Sample ``f`` on the grid.  Coordinates of ``f`` beyond ``len(sizes)`` are set to 0."""
        sizes = tuple(int(g) for g in sizes)
        if isinstance(f, TrigPoly):
            return cls(_trigpoly_samples(f, sizes))
        if isinstance(f, CylinderGrid):
            if f.sizes != sizes:
                raise ValueError(f"cannot resample grid {f.sizes} onto {sizes}")
            return f
        axes = [np.arange(g) / g for g in sizes]
        mesh = np.meshgrid(*axes, indexing="ij") if sizes else []
        d = max(len(sizes), f.max_coord)
        pts = np.zeros((int(np.prod(sizes, dtype=int)), d))
        for k, ax in enumerate(mesh):
            pts[:, k] = ax.ravel()
        return cls(np.asarray(evaluate(f, pts)).reshape(sizes))

    def __eq__(self, other) -> bool:
        return isinstance(other, CylinderGrid) and np.array_equal(self.samples, other.samples)

    __hash__ = None


def _trigpoly_samples(f: TrigPoly, sizes: tuple[int, ...]) -> np.ndarray:
    # inverse DFT of the coefficient array; exact when every |n_k| < G_k / 2
    m = len(sizes)
    if f.max_coord > m:
        raise ValueError(f"polynomial uses {f.max_coord} coordinates, grid has {m}")
    spec = np.zeros(sizes, dtype=complex)
    for n, c in f.coeffs.items():
        dense = n.dense(m)
        for g, v in zip(sizes, dense):
            if 2 * abs(v) >= g:
                raise AliasingError(f"frequency {v} not resolved by grid size {g}")
        spec[tuple(v % g for v, g in zip(dense, sizes))] += c
    if m == 0:
        return spec
    return np.fft.ifftn(spec) * np.prod(sizes)


Function = Union[TrigPoly, SpikeTensor, CylinderGrid]


# --------------------------------------------------------------------------
# evaluation


def evaluate(f: Function, x):
    """Value of ``f`` at a point, or at each row of a ``(P, d)`` array.

    Grids use the nearest node (no interpolation).
    """
    pts, single = _as_points(x)
    _require_coords(pts, f.max_coord)
    if isinstance(f, TrigPoly):
        out = np.zeros(len(pts), dtype=complex)
        for n, c in f.coeffs.items():
            phase = np.zeros(len(pts))
            for k, v in n.items:
                phase += v * pts[:, k - 1]
            out += c * np.exp(2j * np.pi * phase)
    elif isinstance(f, SpikeTensor):
        out = np.full(len(pts), f.height, dtype=complex)
        for k, eps in f.spikes.items():
            xk = np.mod(pts[:, k - 1], 1.0)
            out *= xk < eps
    elif isinstance(f, CylinderGrid):
        idx = tuple(
            np.rint(np.mod(pts[:, k], 1.0) * g).astype(int) % g for k, g in enumerate(f.sizes)
        )
        out = f.samples[idx] if f.m else np.full(len(pts), f.samples[()], dtype=complex)
    else:
        raise TypeError(f"unsupported function type {type(f).__name__}")
    return complex(out[0]) if single else out


# --------------------------------------------------------------------------
# marginals


def marginalize(f: Function, m: int) -> Function:
    """Integrate out every coordinate beyond ``m``."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if isinstance(f, TrigPoly):
        return TrigPoly({n: c for n, c in f.coeffs.items() if n.max_coord <= m})
    if isinstance(f, SpikeTensor):
        return SpikeTensor({k: e for k, e in f.spikes.items() if k <= m})
    if isinstance(f, CylinderGrid):
        if m >= f.m:
            return f
        return CylinderGrid(f.samples.mean(axis=tuple(range(m, f.m))))
    raise TypeError(f"unsupported function type {type(f).__name__}")


# --------------------------------------------------------------------------
# Orlicz functional


def _phi(v: np.ndarray, d: int) -> np.ndarray:
    a = np.abs(v)
    return a * np.log1p(a) ** d


def default_quadrature_sizes(f: TrigPoly, m: int | None = None) -> tuple[int, ...]:
    """Per-axis power-of-two grid comfortably above the polynomial's Nyquist rate."""
    return tuple(_next_pow2(max(32, 4 * (deg + 1))) for deg in f.degrees(m))


def orlicz_functional(
    f: Function,
    d: int,
    sizes: Sequence[int] | None = None,
    tol: float | None = None,
) -> float:
    """``integral |f| ln(|f| + 1)**d`` over the active cylinder.

    Spikes are integrated in closed form.  Polynomials are sampled on a
    uniform grid (``sizes`` or a default); a grid below the Nyquist rate
    raises :class:`QuadratureError`, as does a doubled-grid refinement that
    moves the value by more than ``tol`` when ``tol`` is given.
    """
    if int(d) != d or d < 0:
        raise ValueError(f"Orlicz exponent must be a nonnegative integer, got {d}")
    d = int(d)
    if isinstance(f, SpikeTensor):
        return math.log1p(f.height) ** d
    if isinstance(f, CylinderGrid):
        return float(np.mean(_phi(f.samples, d))) if f.samples.size else 0.0
    if not isinstance(f, TrigPoly):
        raise TypeError(f"unsupported function type {type(f).__name__}")

    m = f.max_coord
    sizes = default_quadrature_sizes(f) if sizes is None else tuple(int(g) for g in sizes[:m])
    if len(sizes) < m:
        raise QuadratureError(f"need grid sizes for {m} coordinates, got {len(sizes)}")
    for g, deg in zip(sizes, f.degrees(m)):
        if g < 2 * deg + 2:
            raise QuadratureError(f"grid size {g} below Nyquist for degree {deg}")
    value = float(np.mean(_phi(_trigpoly_samples(f, sizes), d)))
    if tol is not None:
        fine = float(np.mean(_phi(_trigpoly_samples(f, tuple(2 * g for g in sizes)), d)))
        if abs(fine - value) > tol:
            raise QuadratureError(
                f"quadrature moved by {abs(fine - value):.3e} on refinement, tolerance {tol:.1e}"
            )
        value = fine
    return value


@dataclass(frozen=True)
class LemmaResult:
    lhs: float
    rhs: float
    holds: bool


def lemma_check(
    f: Function,
    m: int,
    d: int,
    sizes: Sequence[int] | None = None,
    tolerance: float = 1e-8,
) -> LemmaResult:
    """Compare the Orlicz functional of the marginal ``f_m`` with that of ``f``.

    Polynomials use one shared grid for both sides so the comparison is the
    discrete Jensen inequality on the same nodes.
    """
    fm = marginalize(f, m)
    if isinstance(f, TrigPoly):
        sizes = default_quadrature_sizes(f) if sizes is None else tuple(sizes)
        rhs = orlicz_functional(f, d, sizes)
        lhs = orlicz_functional(fm, d, sizes[: fm.max_coord])
    else:
        rhs = orlicz_functional(f, d)
        lhs = orlicz_functional(fm, d)
    return LemmaResult(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tolerance)


# --------------------------------------------------------------------------
# config and file formats


def read_grid(path: str | Path, sizes: Sequence[int]) -> CylinderGrid:
    """Load little-endian complex64 samples, C order, coordinate 1 slowest."""
    sizes = tuple(int(g) for g in sizes)
    raw = np.fromfile(path, dtype="<c8")
    expected = int(np.prod(sizes, dtype=int))
    if raw.size != expected:
        raise ValueError(f"{path}: {raw.size} samples, expected {expected} for sizes {sizes}")
    return CylinderGrid(raw.reshape(sizes).astype(complex))


def write_grid(grid: CylinderGrid, path: str | Path) -> None:
    np.ascontiguousarray(grid.samples, dtype="<c8").tofile(path)


def function_from_spec(spec: Mapping, base: str | Path | None = None) -> Function:
    """Build a function from its config record.

    ``{"type": "trigpoly", "terms": [{"index": {"1": 1}, "re": 1, "im": 0}]}``,
    ``{"type": "spike", "eps": {"1": 0.1}}`` or
    ``{"type": "grid", "file": "samples.bin", "sizes": [64, 64]}``.
    """
    kind = spec.get("type")
    if kind == "trigpoly":
        coeffs: dict[MultiIndex, complex] = {}
        for term in spec.get("terms", []):
            n = MultiIndex.from_mapping({int(k): int(v) for k, v in term.get("index", {}).items()})
            coeffs[n] = coeffs.get(n, 0) + complex(term.get("re", 0.0), term.get("im", 0.0))
        return TrigPoly(coeffs)
    if kind == "spike":
        return SpikeTensor({int(k): float(v) for k, v in spec.get("eps", {}).items()})
    if kind == "grid":
        path = Path(spec["file"])
        if base is not None and not path.is_absolute():
            path = Path(base) / path
        return read_grid(path, spec["sizes"])
    raise ValueError(f"unknown function type {kind!r}")


def function_to_spec(f: Function) -> dict:
    """Config record for a polynomial or spike (grids are referenced by file only)."""
    if isinstance(f, TrigPoly):
        terms = [
            {"index": {str(k): v for k, v in n.items}, "re": c.real, "im": c.imag}
            for n, c in sorted(f.coeffs.items(), key=lambda kv: kv[0].items)
        ]
        return {"type": "trigpoly", "terms": terms}
    if isinstance(f, SpikeTensor):
        return {"type": "spike", "eps": {str(k): e for k, e in f.spikes.items()}}
    raise TypeError("grid functions are described by their sample file")
