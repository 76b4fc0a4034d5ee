"""Fourier coefficients in the Jessen system, rectangular partial sums and
Fejér means.

The Fejér mean of a rectangle ``(N_1..N_p)`` is computed from coefficients
with triangular weights ``prod_j (1 - |n_j| / (N_j + 1))``;
:func:`fejer_mean_conv` evaluates the same quantity as a kernel convolution
on a sample grid and serves as an independent check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .funcspace import (
    AliasingError,
    CylinderGrid,
    Function,
    SpikeTensor,
    TrigPoly,
    _as_points,
    _require_coords,
)
from .index_core import MultiIndex, RectIndex, Schedule, admits_rect, enumerate_net
from .kernels import fejer


class MissingCoefficientError(KeyError):
    """The rectangle reaches outside the coefficients a table can vouch for."""


@dataclass(frozen=True)
class FourierTable:
    """Coefficients of ``source`` for every index inside ``box``.

    ``box`` bounds ``|n_j|`` for coordinates ``1..box.p``; indices outside
    the box are not claimed.
    """

    source: Function
    box: RectIndex
    coeffs: Mapping[MultiIndex, complex] = field(default_factory=dict)

    def covers(self, rect: RectIndex) -> bool:
        if rect.p > self.box.p:
            return all(d == 0 for d in rect.degrees[self.box.p :]) and all(
                a <= b for a, b in zip(rect.degrees, self.box.degrees)
            )
        return all(a <= b for a, b in zip(rect.degrees, self.box.degrees))

    def __getitem__(self, n: MultiIndex) -> complex:
        dense = n.dense(self.box.p) if n.max_coord <= self.box.p else None
        if dense is None or any(abs(v) > b for v, b in zip(dense, self.box.degrees)):
            raise MissingCoefficientError(f"{n} outside box {self.box}")
        return self.coeffs.get(n, 0j)

    def as_trigpoly(self) -> TrigPoly:
        return TrigPoly(self.coeffs)


def _weight_triangle(n: np.ndarray, N: int) -> np.ndarray:
    return np.clip(1.0 - np.abs(n) / (N + 1.0), 0.0, None)


def _weight_box(n: np.ndarray, N: int) -> np.ndarray:
    return (np.abs(n) <= N).astype(float)


def _grid_spectrum(f: CylinderGrid) -> np.ndarray:
    if f.m == 0:
        return f.samples.astype(complex)
    return np.fft.fftn(f.samples) / f.samples.size


def fourier_coeff(f: Function | FourierTable, n: MultiIndex | Sequence[int]) -> complex:
    """Coefficient ``c_n = integral f(x) exp(-2 pi i n.x) dx``.

    Grids use the DFT and raise :class:`AliasingError` when ``|n_k| >= G_k/2``;
    indices reaching beyond a grid's active coordinates give 0.
    """
    if not isinstance(n, MultiIndex):
        n = MultiIndex.from_dense(n)
    if isinstance(f, FourierTable):
        return f[n]
    if isinstance(f, TrigPoly):
        return complex(f.coeffs.get(n, 0j))
    if isinstance(f, SpikeTensor):
        c = 1.0 + 0j
        for k, v in n.items:
            c *= f.coeff_1d(k, v)
        return complex(c)
    if isinstance(f, CylinderGrid):
        if n.max_coord > f.m:
            return 0j
        dense = n.dense(f.m)
        for v, g in zip(dense, f.sizes):
            if 2 * abs(v) >= g:
                raise AliasingError(f"frequency {v} not resolved by grid size {g}")
        spec = _grid_spectrum(f)
        return complex(spec[tuple(v % g for v, g in zip(dense, f.sizes))])
    raise TypeError(f"unsupported function type {type(f).__name__}")


def fourier_table(f: Function, box: RectIndex) -> FourierTable:
    """All coefficients of ``f`` with ``|n_j| <= box_j`` on coordinates ``1..box.p``."""
    coeffs: dict[MultiIndex, complex] = {}
    if isinstance(f, TrigPoly):
        for n, c in f.coeffs.items():
            if n.max_coord <= box.p and all(abs(n[j + 1]) <= b for j, b in enumerate(box)):
                coeffs[n] = c
    else:
        spec = _grid_spectrum(f) if isinstance(f, CylinderGrid) else None
        ranges = [range(-b, b + 1) for b in box.degrees]
        for dense in itertools.product(*ranges):
            n = MultiIndex.from_dense(dense)
            if spec is not None:
                c = _grid_coeff_from_spectrum(f, spec, n)
            else:
                c = fourier_coeff(f, n)
            if c != 0:
                coeffs[n] = c
    return FourierTable(source=f, box=box, coeffs=coeffs)


def _grid_coeff_from_spectrum(f: CylinderGrid, spec: np.ndarray, n: MultiIndex) -> complex:
    if n.max_coord > f.m:
        return 0j
    dense = n.dense(f.m)
    for v, g in zip(dense, f.sizes):
        if 2 * abs(v) >= g:
            raise AliasingError(f"frequency {v} not resolved by grid size {g}")
    return complex(spec[tuple(v % g for v, g in zip(dense, f.sizes))])


# --------------------------------------------------------------------------
# weighted rectangular sums


def _weighted_sum(f, rect: RectIndex, x, weight: Callable[[np.ndarray, int], np.ndarray]):
    pts, single = _as_points(x)
    if isinstance(f, FourierTable):
        if not f.covers(rect):
            raise MissingCoefficientError(f"rectangle {rect} exceeds coefficient box {f.box}")
        f = f.as_trigpoly()
    _require_coords(pts, rect.p)

    if isinstance(f, TrigPoly):
        out = np.zeros(len(pts), dtype=complex)
        for n, c in f.coeffs.items():
            if n.max_coord > rect.p:
                continue
            w = 1.0
            phase = np.zeros(len(pts))
            for k, v in n.items:
                w *= float(weight(np.array(v), rect.degrees[k - 1]))
                phase += v * pts[:, k - 1]
            if w:
                out += c * w * np.exp(2j * np.pi * phase)
    elif isinstance(f, SpikeTensor):
        # separable: a product of one-dimensional means, untouched axes contribute c_0 = 1
        out = np.ones(len(pts), dtype=complex)
        for k in f.spikes:
            if k > rect.p:
                continue
            N = rect.degrees[k - 1]
            n = np.arange(-N, N + 1)
            terms = weight(n, N) * f.coeff_1d(k, n)
            out *= np.exp(2j * np.pi * np.multiply.outer(pts[:, k - 1], n)) @ terms
    elif isinstance(f, CylinderGrid):
        spec = _grid_spectrum(f)
        # coordinates above p only keep frequency 0
        spec = spec[tuple(slice(None) if k < rect.p else 0 for k in range(f.m))]
        q = min(rect.p, f.m)
        vecs_idx = []
        for k in range(q):
            N, g = rect.degrees[k], f.sizes[k]
            if 2 * N >= g:
                raise AliasingError(f"degree {N} not resolved by grid size {g}")
            vecs_idx.append((np.arange(-N, N + 1), N, g))
        out = np.empty(len(pts), dtype=complex)
        for i, xi in enumerate(pts):
            acc = spec
            for k, (n, N, g) in enumerate(vecs_idx):
                vec = np.zeros(g, dtype=complex)
                vec[n % g] = weight(n, N) * np.exp(2j * np.pi * n * xi[k])
                acc = np.tensordot(vec, acc, axes=(0, 0))
            out[i] = complex(acc)
    else:
        raise TypeError(f"unsupported function type {type(f).__name__}")
    return complex(out[0]) if single else out


def partial_sum(f, rect: RectIndex, x):
    """Rectangular partial sum ``S_{p,N_1..N_p}(x)``."""
    return _weighted_sum(f, rect, x, _weight_box)


def fejer_mean_weights(f, rect: RectIndex, x):
    """Fejér mean ``sigma_{p,N_1..N_p}(x)`` as a triangular-weighted coefficient sum."""
    return _weighted_sum(f, rect, x, _weight_triangle)


def fejer_mean_conv(f: CylinderGrid, rect: RectIndex, x):
    """Fejér mean by quadrature of ``prod_j K_{N_j}(x_j - t_j) f(t)`` on the sample grid.

    Needs ``rect.p <= f.m`` and ``G_j >= 2 N_j + 2`` so the uniform rule is
    exact for band-limited samples.
    """
    if not isinstance(f, CylinderGrid):
        raise TypeError("the convolution form works on sampled grids")
    if rect.p > f.m:
        raise ValueError(f"rectangle has {rect.p} coordinates, grid only {f.m}")
    for N, g in zip(rect.degrees, f.sizes):
        if g < 2 * N + 2:
            raise AliasingError(f"grid size {g} too small for kernel degree {N}")
    pts, single = _as_points(x)
    _require_coords(pts, rect.p)
    # integrate out the untouched axes first
    base = f.samples.mean(axis=tuple(range(rect.p, f.m))) if f.m > rect.p else f.samples
    out = np.empty(len(pts), dtype=complex)
    for i, xi in enumerate(pts):
        acc = base
        for k in range(rect.p):
            g = f.sizes[k]
            kern = fejer(rect.degrees[k], np.mod(xi[k] - np.arange(g) / g, 1.0)) / g
            acc = np.tensordot(kern, acc, axes=(0, 0))
        out[i] = complex(acc)
    return complex(out[0]) if single else out


def fejer_mean_table(f, p: int, n_max: int, x) -> np.ndarray:
    """Fejér means for every rectangle in ``{0..n_max}**p`` at each point.

    Returns an array of shape ``(n_max+1,)*p + (P,)``.
    """
    pts, _ = _as_points(x)
    _require_coords(pts, p)
    degs = np.arange(n_max + 1)
    if isinstance(f, FourierTable):
        if not f.covers(RectIndex.cube(p, n_max)):
            raise MissingCoefficientError(f"box {f.box} does not cover degree {n_max}")
        f = f.as_trigpoly()
    if isinstance(f, CylinderGrid):
        for g in f.sizes[:p]:
            if 2 * n_max >= g:
                raise AliasingError(f"degree {n_max} not resolved by grid size {g}")
        f = fourier_table(f, RectIndex.cube(min(p, f.m), n_max)).as_trigpoly()
    if isinstance(f, SpikeTensor):
        out = np.ones((n_max + 1,) * p + (len(pts),), dtype=complex)
        n = np.arange(-n_max, n_max + 1)
        for k in range(1, p + 1):
            if k not in f.spikes:
                continue
            W = np.clip(1.0 - np.abs(n)[None, :] / (degs[:, None] + 1.0), 0.0, None)
            E = np.exp(2j * np.pi * np.multiply.outer(n, pts[:, k - 1]))
            axis_vals = (W * f.coeff_1d(k, n)) @ E  # (n_max+1, P)
            shape = [1] * p + [len(pts)]
            shape[k - 1] = n_max + 1
            out = out * axis_vals.reshape(shape)
        return out
    if isinstance(f, TrigPoly):
        terms = [(n, c) for n, c in f.coeffs.items() if n.max_coord <= p]
        out = np.zeros((n_max + 1,) * p + (len(pts),), dtype=complex)
        if not terms:
            return out
        dense = np.array([n.dense(p) for n, _ in terms], dtype=float).reshape(len(terms), p)
        cE = np.array([c for _, c in terms])[:, None] * np.exp(2j * np.pi * dense @ pts[:, :p].T)
        factors = [
            np.clip(1.0 - np.abs(dense[:, j])[None, :] / (degs[:, None] + 1.0), 0.0, None)
            for j in range(p)
        ]
        letters = "abcdefghijklmnopqrs"[:p]
        expr = ",".join(f"{a}t" for a in letters) + ",tz->" + letters + "z"
        return np.einsum(expr, *factors, cE)
    raise TypeError(f"unsupported function type {type(f).__name__}")


def strengthened_limit(
    f,
    schedule: Schedule,
    p_max: int,
    n_of_p: Callable[[int], int | Sequence[int]],
    x,
):
    """Fejér means ``s_p`` for ``p = 1..p_max``, with the inner degrees from ``n_of_p``.

    ``n_of_p(p)`` is either one degree (used on every coordinate) or the
    explicit degrees of the rectangle, which must fit the schedule.
    """
    out = []
    for p in range(1, p_max + 1):
        spec = n_of_p(p)
        rect = RectIndex.cube(p, int(spec)) if np.isscalar(spec) else RectIndex(tuple(spec))
        if rect.p != p:
            raise ValueError(f"n_of_p({p}) gave a rectangle of dimension {rect.p}")
        if not admits_rect(schedule, rect):
            raise ValueError(f"rectangle {rect} is not admitted by {schedule}")
        out.append(fejer_mean_weights(f, rect, x))
    return out


def schedule_path_means(f, schedule: Schedule, p: int, n_max: int, seed: int, x):
    """Fejér means along :func:`enumerate_net`; returns ``(path, values)``."""
    path = enumerate_net(schedule, p, n_max, seed)
    return path, [fejer_mean_weights(f, r, x) for r in path]
