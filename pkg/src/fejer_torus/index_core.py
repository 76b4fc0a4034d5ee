"""Multi-indices on the infinite torus, the rectangular summation net and
index-growth schedules.

Coordinates are numbered from 1.  A :class:`RectIndex` is a point
``(p, N_1..N_p)`` of the net of rectangles; two rectangles of the same
dimension are ordered componentwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


class IncomparableError(ValueError):
    """Raised when two net positions live in different dimensions."""


class ScheduleError(ValueError):
    """Raised for malformed schedules or paths that are not monotone."""


@dataclass(frozen=True)
class MultiIndex:
    """Finitely supported integer vector, stored sparsely.

    ``items`` holds ``(coordinate, value)`` pairs sorted by coordinate with
    every value nonzero, so equal vectors compare and hash equal.
    """

    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        canon = _canonical(self.items)
        object.__setattr__(self, "items", canon)

    @classmethod
    def from_mapping(cls, entries: Mapping[int, int]) -> "MultiIndex":
        return cls(tuple(entries.items()))

    @classmethod
    def from_dense(cls, values: Sequence[int]) -> "MultiIndex":
        """Build from ``(n_1, n_2, ...)``; position ``k-1`` is coordinate ``k``."""
        return cls(tuple((k + 1, int(v)) for k, v in enumerate(values)))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(k for k, _ in self.items)

    @property
    def max_coord(self) -> int:
        """Largest coordinate with a nonzero entry, 0 for the zero index."""
        return self.items[-1][0] if self.items else 0

    def __getitem__(self, k: int) -> int:
        for c, v in self.items:
            if c == k:
                return v
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def dense(self, p: int) -> tuple[int, ...]:
        """Entries for coordinates ``1..p``.  Raises if support exceeds ``p``."""
        if self.max_coord > p:
            raise ValueError(f"support {sorted(self.support)} exceeds {p} coordinates")
        out = [0] * p
        for k, v in self.items:
            out[k - 1] = v
        return tuple(out)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        acc = self.as_dict()
        for k, v in other.items:
            acc[k] = acc.get(k, 0) + v
        return MultiIndex.from_mapping(acc)

    def __neg__(self) -> "MultiIndex":
        return MultiIndex(tuple((k, -v) for k, v in self.items))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        return self + (-other)

    def __mul__(self, c: int) -> "MultiIndex":
        if not isinstance(c, (int, np.integer)):
            return NotImplemented
        return MultiIndex(tuple((k, int(c) * v) for k, v in self.items))

    __rmul__ = __mul__

    def pair(self, x: Sequence[float]) -> float:
        """The pairing ``sum_k n_k x_k``; ``x[k-1]`` is coordinate ``k``."""
        if self.max_coord > len(x):
            raise ValueError(f"point has {len(x)} coordinates, index needs {self.max_coord}")
        return float(sum(v * x[k - 1] for k, v in self.items))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}:{v}" for k, v in self.items)
        return f"MultiIndex({{{body}}})"


def _canonical(items: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    acc: dict[int, int] = {}
    for k, v in items:
        k, v = int(k), int(v)
        if k < 1:
            raise ValueError(f"coordinates start at 1, got {k}")
        acc[k] = acc.get(k, 0) + v
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


@dataclass(frozen=True)
class RectIndex:
    """A rectangle of the summation net: dimension ``p`` and degrees."""

    degrees: tuple[int, ...]

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degrees)
        if not degs:
            raise ValueError("a rectangle needs at least one coordinate")
        if any(d < 0 for d in degs):
            raise ValueError(f"negative degree in {degs}")
        object.__setattr__(self, "degrees", degs)

    @classmethod
    def cube(cls, p: int, n: int) -> "RectIndex":
        return cls((n,) * p)

    @property
    def p(self) -> int:
        return len(self.degrees)

    def __iter__(self):
        return iter(self.degrees)

    def __getitem__(self, j: int) -> int:
        return self.degrees[j]

    def __repr__(self) -> str:
        return f"RectIndex(p={self.p}, {self.degrees})"


def dominates(a: RectIndex, b: RectIndex) -> bool:
    """True iff every degree of ``a`` is at least the matching degree of ``b``."""
    if a.p != b.p:
        raise IncomparableError(f"cannot compare p={a.p} with p={b.p}")
    return all(x >= y for x, y in zip(a.degrees, b.degrees))


def join(a: RectIndex, b: RectIndex) -> RectIndex:
    """Componentwise maximum, an upper bound of both arguments."""
    if a.p != b.p:
        raise IncomparableError(f"cannot join p={a.p} with p={b.p}")
    return RectIndex(tuple(max(x, y) for x, y in zip(a.degrees, b.degrees)))


def ratio(degrees: Sequence[int]) -> float:
    """Spread ``max(N+1)/min(N+1)`` used by the regularity test."""
    shifted = [d + 1 for d in degrees]
    return max(shifted) / min(shifted)


@dataclass(frozen=True)
class Schedule:
    """Index-growth regime.

    ``kind`` is one of ``"cube"``, ``"regular"``, ``"pringsheim"``,
    ``"dregular"``.  For ``"dregular"`` the ``blocks`` list groups
    coordinates; coordinates beyond the last listed one are attached to the
    final block, so a schedule stays usable as the dimension grows.
    """

    kind: str
    lam: float = 1.0
    blocks: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        kind = self.kind.lower().replace("-", "")
        if kind not in ("cube", "regular", "pringsheim", "dregular"):
            raise ScheduleError(f"unknown schedule kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not (self.lam >= 1.0) or math.isinf(self.lam):
            raise ScheduleError(f"lambda must be a finite real >= 1, got {self.lam}")
        blocks = tuple(tuple(sorted(int(c) for c in b)) for b in self.blocks)
        if kind == "dregular":
            if not blocks or any(not b for b in blocks):
                raise ScheduleError("dregular needs nonempty blocks")
            flat = [c for b in blocks for c in b]
            if len(flat) != len(set(flat)):
                raise ScheduleError(f"blocks overlap: {blocks}")
            if sorted(flat) != list(range(1, len(flat) + 1)):
                raise ScheduleError(f"blocks must partition 1..{len(flat)}: {blocks}")
        elif blocks:
            raise ScheduleError(f"{kind} schedule takes no blocks")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def cube(cls) -> "Schedule":
        return cls("cube")

    @classmethod
    def regular(cls, lam: float) -> "Schedule":
        return cls("regular", lam=float(lam))

    @classmethod
    def pringsheim(cls) -> "Schedule":
        return cls("pringsheim")

    @classmethod
    def dregular(cls, blocks: Sequence[Sequence[int]], lam: float = 1.0) -> "Schedule":
        return cls("dregular", lam=float(lam), blocks=tuple(tuple(b) for b in blocks))

    def blocks_for(self, p: int) -> list[tuple[int, ...]]:
        """Coordinate blocks (1-based) on which the ratio bound applies at dimension ``p``."""
        if self.kind in ("cube", "regular"):
            return [tuple(range(1, p + 1))]
        if self.kind == "pringsheim":
            return [(j,) for j in range(1, p + 1)]
        out = [tuple(c for c in b if c <= p) for b in self.blocks]
        listed = sum(len(b) for b in self.blocks)
        if p > listed:
            out[-1] = out[-1] + tuple(range(listed + 1, p + 1))
        return [b for b in out if b]

    def bound(self) -> float:
        return 1.0 if self.kind == "cube" else self.lam

    def to_dict(self) -> dict:
        if self.kind == "dregular":
            return {"kind": "dregular", "blocks": [list(b) for b in self.blocks], "lambda": self.lam}
        if self.kind == "regular":
            return {"kind": "regular", "lambda": self.lam}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Schedule":
        kind = str(d["kind"])
        lam = float(d.get("lambda", d.get("lam", 1.0)))
        blocks = d.get("blocks", ())
        return cls(kind, lam=lam, blocks=tuple(tuple(b) for b in blocks))


def admits_rect(s: Schedule, rect: RectIndex) -> bool:
    """Whether a single rectangle satisfies the schedule's shape constraint."""
    if s.kind == "cube":
        return len(set(rect.degrees)) == 1
    if s.kind == "pringsheim":
        return True
    for block in s.blocks_for(rect.p):
        if ratio([rect.degrees[c - 1] for c in block]) > s.lam:
            return False
    return True


def _check_path(path: Sequence[RectIndex]) -> None:
    for prev, cur in zip(path, path[1:]):
        if prev.p != cur.p:
            raise ScheduleError(f"mixed dimensions in path: {prev.p} and {cur.p}")
        if not dominates(cur, prev):
            raise ScheduleError(f"path is not monotone at {prev} -> {cur}")


def schedule_admits(s: Schedule, path: Sequence[RectIndex]) -> bool:
    """Check that a monotone path stays inside the schedule's regime.

    Raises :class:`ScheduleError` for mixed dimensions or a non-monotone path.
    """
    _check_path(path)
    return all(admits_rect(s, r) for r in path)


def enumerate_net(s: Schedule, p: int, n_max: int, seed: int = 0) -> list[RectIndex]:
    """Seeded monotone path from the zero rectangle to ``(n_max, ..., n_max)``.

    Each step proposes a random 0/1 increment per coordinate (one draw of
    ``p`` bits per step, whatever the schedule), freezes coordinates that
    already reached ``n_max``, forces the smallest coordinates up if nothing
    moved, then raises block minima until every block satisfies the ratio
    bound.  Cube paths are the canonical diagonal and ignore the seed.
    """
    if p < 1 or n_max < 1:
        raise ValueError(f"need p >= 1 and n_max >= 1, got p={p}, n_max={n_max}")
    if s.kind == "cube":
        return [RectIndex.cube(p, k) for k in range(n_max + 1)]

    rng = np.random.default_rng(seed)
    blocks = [[c - 1 for c in b] for b in s.blocks_for(p)]
    lam = s.bound()
    cur = [0] * p
    path = [RectIndex(tuple(cur))]
    while min(cur) < n_max:
        bits = rng.integers(0, 2, size=p)
        nxt = [c + int(b) if c < n_max else c for c, b in zip(cur, bits)]
        if nxt == cur:
            low = min(cur)
            nxt = [c + 1 if c == low else c for c in cur]
        for block in blocks:
            while ratio([nxt[j] for j in block]) > lam:
                low = min(nxt[j] for j in block)
                for j in block:
                    if nxt[j] == low:
                        nxt[j] += 1
        cur = nxt
        path.append(RectIndex(tuple(cur)))
    return path
