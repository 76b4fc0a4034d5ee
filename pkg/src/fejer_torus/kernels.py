"""One-dimensional Dirichlet and Fejér kernels on the period-1 circle."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .index_core import RectIndex

# below this |sin(pi t)| the closed forms lose digits; use the limit branch
SINGULAR_EPS = 1e-8


def _check_degree(l: int) -> int:
    if int(l) != l or l < 0:
        raise ValueError(f"kernel degree must be a nonnegative integer, got {l}")
    return int(l)


def dirichlet(l: int, t):
    """Dirichlet kernel ``D_l(t) = sum_{|r|<=l} exp(2 pi i r t)``.

    Accepts a scalar or an array of points and returns the same shape.
    """
    l = _check_degree(l)
    t = np.asarray(t, dtype=float)
    s = np.sin(np.pi * t)
    near = np.abs(s) < SINGULAR_EPS
    safe = np.where(near, 1.0, s)
    val = np.sin((2 * l + 1) * np.pi * t) / safe
    # at integer t, sin((2l+1)pi t)/sin(pi t) -> (2l+1) * (+-1)^(2l) = 2l+1
    out = np.where(near, 2 * l + 1.0, val)
    return out if out.ndim else float(out)


def fejer(l: int, t):
    """Fejér kernel ``K_l(t) = (1/(l+1)) (sin((l+1) pi t) / sin(pi t))**2``."""
    l = _check_degree(l)
    t = np.asarray(t, dtype=float)
    s = np.sin(np.pi * t)
    near = np.abs(s) < SINGULAR_EPS
    safe = np.where(near, 1.0, s)
    val = (np.sin((l + 1) * np.pi * t) / safe) ** 2 / (l + 1)
    out = np.where(near, l + 1.0, val)
    return out if out.ndim else float(out)


def dirichlet_direct(l: int, t):
    """Term-by-term ``1 + 2 sum_{r=1}^{l} cos(2 pi r t)``, a reference for the closed form."""
    l = _check_degree(l)
    t = np.asarray(t, dtype=float)
    r = np.arange(1, l + 1)
    out = 1.0 + 2.0 * np.cos(2 * np.pi * np.multiply.outer(t, r)).sum(axis=-1)
    return out if out.ndim else float(out)


def fejer_direct(l: int, t):
    """Average of ``D_0..D_l`` summed term by term."""
    l = _check_degree(l)
    acc = sum(np.asarray(dirichlet_direct(r, t)) for r in range(l + 1))
    out = np.asarray(acc / (l + 1))
    return out if out.ndim else float(out)


def kernel_tensor(rect: RectIndex, x: Sequence[float], t: Sequence[float]) -> float:
    """Product ``prod_j K_{N_j}(x_j - t_j)`` over the rectangle's coordinates."""
    if len(x) != rect.p or len(t) != rect.p:
        raise ValueError(f"expected {rect.p} coordinates, got x:{len(x)} t:{len(t)}")
    val = 1.0
    for n, xj, tj in zip(rect.degrees, x, t):
        val *= fejer(n, (xj - tj) % 1.0)
    return float(val)
