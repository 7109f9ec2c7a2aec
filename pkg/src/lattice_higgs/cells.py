"""Oriented cells, boxes and integer chains of the cubical complex on Z^m.

A k-cell is a unit k-cube spanned from a base point along k distinct
coordinate directions (1-based).  Each non-oriented cell carries two
orientations; only positively oriented cells (sorted direction tuple,
sign +1) are ever stored, and queries on negated cells are resolved by
the sign rules q[-c] = -q[c].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Tuple

from .errors import PreconditionError

Coord = Tuple[int, ...]


def _perm_sign(seq) -> int:
    """Sign of the permutation that sorts ``seq`` (assumed distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True, order=True)
class OrientedCell:
    """An oriented k-cell: base point, strictly increasing dirs, sign = +-1.

    Instances are canonical by construction; use :func:`cell` to build one
    from possibly permuted direction indices.
    """

    base: Coord
    dirs: Tuple[int, ...]
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +-1, got {self.sign}")
        if any(d < 1 for d in self.dirs):
            raise ValueError("direction indices are 1-based")
        if any(a >= b for a, b in zip(self.dirs, self.dirs[1:])):
            raise ValueError("dirs must be strictly increasing; use cell() to normalize")

    @property
    def dim(self) -> int:
        return len(self.dirs)

    @property
    def is_positive(self) -> bool:
        return self.sign == 1

    def __neg__(self) -> "OrientedCell":
        return OrientedCell(self.base, self.dirs, -self.sign)

    def positive(self) -> "OrientedCell":
        """The positively oriented cell at the same position (c^+)."""
        return self if self.sign == 1 else -self

    def corners(self) -> Iterator[Coord]:
        for picks in itertools.product((0, 1), repeat=len(self.dirs)):
            yield tuple(
                b + sum(1 for d, t in zip(self.dirs, picks) if t and d - 1 == i)
                for i, b in enumerate(self.base)
            )

    def __repr__(self):
        s = "" if self.sign == 1 else "-"
        return f"{s}Cell({self.base};{self.dirs})"


def cell(base, dirs=(), sign: int = 1) -> OrientedCell:
    """Build an oriented cell, normalizing a permuted direction list.

    A direction list given out of order contributes the sign of the sorting
    permutation.  Repeated directions are rejected (the cell degenerates).
    """
    dirs = tuple(dirs)
    if len(set(dirs)) != len(dirs):
        raise ValueError(f"repeated direction in {dirs}")
    if dirs != tuple(sorted(dirs)):
        sign *= _perm_sign(dirs)
        dirs = tuple(sorted(dirs))
    return OrientedCell(tuple(base), dirs, sign)


def vertex(point) -> OrientedCell:
    return OrientedCell(tuple(point), ())


def edge(base, direction: int) -> OrientedCell:
    return OrientedCell(tuple(base), (direction,))


def plaquette(base, d1: int, d2: int, sign: int = 1) -> OrientedCell:
    return cell(base, (d1, d2), sign)


@dataclass(frozen=True)
class LatticeBox:
    """An axis-parallel box of Z^m; B_N = [-N, N]^m is the common case.

    A cell is in the box iff all corners of its non-oriented cell are.
    """

    m: int
    lo: Coord
    hi: Coord

    def __post_init__(self):
        if self.m < 1 or len(self.lo) != self.m or len(self.hi) != self.m:
            raise ValueError("box bounds must be m-vectors")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("empty box")

    @classmethod
    def centered(cls, m: int, N: int) -> "LatticeBox":
        if m < 2 or N < 1:
            raise ValueError("need m >= 2 and N >= 1")
        return cls(m, (-N,) * m, (N,) * m)

    def contains(self, c: OrientedCell) -> bool:
        # All corners in the box <=> base >= lo and base + extent <= hi.
        for i in range(self.m):
            ext = 1 if (i + 1) in c.dirs else 0
            if c.base[i] < self.lo[i] or c.base[i] + ext > self.hi[i]:
                return False
        return True

    def cells(self, k: int) -> Iterator[OrientedCell]:
        """Positively oriented k-cells of the box in canonical (base, dirs) order."""
        if k < 0 or k > self.m:
            return
        for base in itertools.product(*[range(self.lo[i], self.hi[i] + 1) for i in range(self.m)]):
            for dirs in itertools.combinations(range(1, self.m + 1), k):
                c = OrientedCell(base, dirs)
                if self.contains(c):
                    yield c

    def count(self, k: int) -> int:
        return sum(1 for _ in self.cells(k))

    def boundary_distance(self, c: OrientedCell) -> int:
        """Smallest coordinate distance from any corner of c to a box face."""
        best = None
        for corner in c.corners():
            for i in range(self.m):
                d = min(corner[i] - self.lo[i], self.hi[i] - corner[i])
                best = d if best is None else min(best, d)
        return 0 if best is None else best


class Chain:
    """A sparse integer formal sum of positively oriented k-cells.

    Coefficients on negated cells follow q[-c] = -q[c]; zeros are never
    stored.  Instances are treated as immutable values.
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Dict[OrientedCell, int] | None = None):
        self.dim = dim
        self.coeffs: Dict[OrientedCell, int] = {}
        if coeffs:
            for c, v in coeffs.items():
                if v:
                    self._accumulate(c, v)

    def _accumulate(self, c: OrientedCell, v: int):
        if c.dim != self.dim:
            raise ValueError(f"cell of dim {c.dim} in {self.dim}-chain")
        if not c.is_positive:
            c, v = -c, -v
        new = self.coeffs.get(c, 0) + v
        if new:
            self.coeffs[c] = new
        else:
            self.coeffs.pop(c, None)

    @classmethod
    def of(cls, c: OrientedCell, coeff: int = 1) -> "Chain":
        q = cls(c.dim)
        q._accumulate(c, coeff)
        return q

    def __getitem__(self, c: OrientedCell) -> int:
        if c.is_positive:
            return self.coeffs.get(c, 0)
        return -self.coeffs.get(-c, 0)

    @property
    def support(self):
        """Set of positively oriented cells with nonzero coefficient."""
        return set(self.coeffs)

    def contains(self, c: OrientedCell) -> bool:
        """The paper's ``c in q``: positive with q[c] > 0, or negative with q[-c] < 0."""
        v = self.coeffs.get(c.positive(), 0)
        return v > 0 if c.is_positive else v < 0

    def __add__(self, other: "Chain") -> "Chain":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out = Chain(self.dim, dict(self.coeffs))
        for c, v in other.coeffs.items():
            out._accumulate(c, v)
        return out

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __neg__(self) -> "Chain":
        return Chain(self.dim, {c: -v for c, v in self.coeffs.items()})

    def __rmul__(self, k: int) -> "Chain":
        return Chain(self.dim, {c: k * v for c, v in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, Chain) and self.dim == other.dim and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dim, frozenset(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        if not self.coeffs:
            return f"Chain({self.dim}, 0)"
        parts = [f"{v}*{c}" for c, v in sorted(self.coeffs.items())]
        return " + ".join(parts)


def boundary(c: OrientedCell) -> Chain:
    """The boundary (k-1)-chain of an oriented k-cell.

    For an edge this is (a + e_j)^+ - a^+; in general the alternating sum
    of front/back faces.  Satisfies boundary(boundary(c)) = 0 for k >= 2.
    """
    k = c.dim
    if k == 0:
        raise PreconditionError("0-cells have no boundary")
    out = Chain(k - 1)
    for pos in range(k):
        d = c.dirs[pos]
        rest = c.dirs[:pos] + c.dirs[pos + 1 :]
        s = (-1) ** (pos + 1)  # the paper's (-1)^{k'} with k' = pos + 1
        shifted = tuple(b + (1 if i == d - 1 else 0) for i, b in enumerate(c.base))
        out._accumulate(OrientedCell(c.base, rest), s * c.sign)
        out._accumulate(OrientedCell(shifted, rest), -s * c.sign)
    return out


def boundary_chain(q: Chain) -> Chain:
    out = Chain(q.dim - 1)
    for c, v in q.coeffs.items():
        for f, w in boundary(c).coeffs.items():
            out._accumulate(f, v * w)
    return out


def coboundary(c: OrientedCell, box: LatticeBox) -> Chain:
    """The coboundary (k+1)-chain of c, clipped to the box (free boundary).

    Coefficients satisfy coboundary(c)[c'] = boundary(c')[c] for every
    (k+1)-cell c' in the box.
    """
    if c.dim > box.m - 1:
        raise PreconditionError(f"coboundary undefined for k = m = {box.m}")
    if not box.contains(c.positive()):
        raise PreconditionError(f"{c} outside box")
    out = Chain(c.dim + 1)
    for d in range(1, box.m + 1):
        if d in c.dirs:
            continue
        for shift in (0, -1):
            base = tuple(b + (shift if i == d - 1 else 0) for i, b in enumerate(c.base))
            cand = cell(base, c.dirs + (d,))
            if not box.contains(cand):
                continue
            coeff = boundary(cand)[c]
            if coeff:
                out._accumulate(cand, coeff)
    return out
