"""Lattice paths (Wilson line supports) and their plaquette geometry.

A path is a 1-chain with coefficients in {-1, 0, 1}, connected support and
empty boundary (closed) or boundary x2 - x1 (open).  Rectangular paths run
along the boundary of an axis-parallel rectangle; the completing loop
gamma_R is reconstructed from an explicit rectangle descriptor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .cells import Chain, LatticeBox, OrientedCell, boundary, boundary_chain, edge
from .errors import PreconditionError
from .forms import FormZn, connected_components, delta, omega_E, omega_gamma


@dataclass(frozen=True)
class RectDescriptor:
    """Axis-parallel rectangle: corner + lengths[i] steps along axes[i]."""

    corner: Tuple[int, ...]
    axes: Tuple[int, int]
    lengths: Tuple[int, int]

    def __post_init__(self):
        a1, a2 = self.axes
        if not (1 <= a1 < a2):
            raise ValueError("axes must be distinct 1-based indices with a1 < a2")
        if min(self.lengths) < 1:
            raise ValueError("rectangle side lengths must be >= 1")

    @property
    def ell1(self) -> int:
        return min(self.lengths)

    @property
    def ell2(self) -> int:
        return max(self.lengths)


class LatticePath:
    """A Wilson-line support path, optionally tagged with its rectangle."""

    def __init__(self, chain: Chain, kind: str, rect: Optional[RectDescriptor] = None):
        if kind not in ("open", "closed"):
            raise ValueError("kind must be 'open' or 'closed'")
        if chain.dim != 1:
            raise ValueError("paths are 1-chains")
        if any(abs(v) != 1 for v in chain.coeffs.values()):
            raise ValueError("path coefficients must lie in {-1, 0, 1}")
        self.chain = chain
        self.kind = kind
        self.rect = rect
        self._validate()

    def _validate(self):
        if not self.chain.coeffs:
            raise ValueError("empty path")
        if not _support_connected(self.chain.support):
            raise ValueError("path support must be connected")
        b = boundary_chain(self.chain)
        if self.kind == "closed":
            if not b.is_zero():
                raise ValueError("closed path must have empty boundary")
        else:
            vals = sorted(b.coeffs.values())
            if vals != [-1, 1]:
                raise ValueError("open path boundary must be x2 - x1")
        if self.rect is not None:
            m = len(next(iter(self.support)).base)
            loop = _loop_chain(self.rect, m, orientation=1)
            agree = [loop[e] * self.chain[e] for e in self.support]
            if 0 in agree:
                raise ValueError("path edges must lie on the rectangle boundary")
            if len(set(agree)) != 1:
                raise ValueError("no completing loop matches the path orientation")
            if self.kind == "closed" and self.support != loop.support:
                raise ValueError("closed rectangular path must cover the full boundary")

    @property
    def support(self) -> Set[OrientedCell]:
        return self.chain.support

    def __len__(self) -> int:
        return len(self.chain.coeffs)

    @property
    def endpoints(self) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """(x1, x2) for an open path, None for a closed one."""
        if self.kind == "closed":
            return None
        b = boundary_chain(self.chain)
        x1 = x2 = None
        for c, v in b.coeffs.items():
            if v == 1:
                x2 = c.base
            else:
                x1 = c.base
        return (x1, x2)

    def coefficient(self, e: OrientedCell) -> int:
        return self.chain[e]

    def gamma_R(self) -> "LatticePath":
        """The canonical completing rectangular loop (orientation matching self)."""
        if self.rect is None:
            raise PreconditionError("path has no rectangle descriptor")
        if self.kind == "closed":
            return self
        loop = rectangle_loop(self.rect, orientation=1)
        agree = [loop.chain[e] * self.chain[e] for e in self.support]
        if all(a == 1 for a in agree):
            return loop
        if all(a == -1 for a in agree):
            return rectangle_loop(self.rect, orientation=-1)
        raise PreconditionError("path orientation is not consistent with any loop")

    def __repr__(self):
        return f"LatticePath(kind={self.kind}, |support|={len(self)})"


def _support_connected(edges: Set[OrientedCell]) -> bool:
    if not edges:
        return False
    adj: Dict[Tuple[int, ...], List[OrientedCell]] = {}
    for e in edges:
        for v in boundary(e).support:
            adj.setdefault(v.base, []).append(e)
    seen = set()
    stack = [next(iter(edges))]
    while stack:
        e = stack.pop()
        if e in seen:
            continue
        seen.add(e)
        for v in boundary(e).support:
            for e2 in adj[v.base]:
                if e2 not in seen:
                    stack.append(e2)
    return len(seen) == len(edges)


def _loop_edges(rect: RectDescriptor, m: int) -> List[Tuple[OrientedCell, int]]:
    """Traversal-ordered (positive edge, coefficient) pairs of the CCW loop."""
    a1, a2 = rect.axes
    l1, l2 = rect.lengths
    c = rect.corner
    if len(c) < m:
        raise ValueError("corner has too few coordinates")

    def shift(pt, axis, t):
        return tuple(x + (t if i == axis - 1 else 0) for i, x in enumerate(pt))

    out: List[Tuple[OrientedCell, int]] = []
    for t in range(l1):
        out.append((edge(shift(c, a1, t), a1), 1))
    far1 = shift(c, a1, l1)
    for t in range(l2):
        out.append((edge(shift(far1, a2, t), a2), 1))
    far2 = shift(c, a2, l2)
    for t in range(l1 - 1, -1, -1):
        out.append((edge(shift(far2, a1, t), a1), -1))
    for t in range(l2 - 1, -1, -1):
        out.append((edge(shift(c, a2, t), a2), -1))
    return out


def _loop_chain(rect: RectDescriptor, m: int, orientation: int = 1) -> Chain:
    coeffs: Dict[OrientedCell, int] = {}
    for e, v in _loop_edges(rect, m):
        coeffs[e] = orientation * v
    return Chain(1, coeffs)


def rectangle_loop(rect: RectDescriptor, orientation: int = 1, m: Optional[int] = None) -> LatticePath:
    """Closed rectangular loop along the boundary of rect.

    orientation +1 traverses axes[0] first from the corner (counter-clockwise
    in the (axes[0], axes[1]) plane); -1 reverses every coefficient.
    """
    m = m if m is not None else len(rect.corner)
    return LatticePath(_loop_chain(rect, m, orientation), "closed", rect)


def rectangle_open_path(
    rect: RectDescriptor,
    start: int,
    count: int,
    orientation: int = 1,
    m: Optional[int] = None,
) -> LatticePath:
    """Open path made of ``count`` consecutive loop edges starting at ``start``.

    Indices follow the traversal order of :func:`rectangle_loop`; the result
    keeps the rectangle descriptor so gamma_R is well defined.
    """
    m = m if m is not None else len(rect.corner)
    ordered = _loop_edges(rect, m)
    total = len(ordered)
    if not 1 <= count < total:
        raise ValueError("open path must use between 1 and perimeter-1 edges")
    coeffs: Dict[OrientedCell, int] = {}
    for i in range(start, start + count):
        e, v = ordered[i % total]
        coeffs[e] = orientation * v
    return LatticePath(Chain(1, coeffs), "open", rect)


def u_shaped_path(rect: RectDescriptor, orientation: int = 1, m: Optional[int] = None) -> LatticePath:
    """Bottom + right + left sides of the rectangle (the top side removed)."""
    l1, l2 = rect.lengths
    # Traversal order: bottom (l1), right (l2), top (l1), left (l2); skip the top.
    m = m if m is not None else len(rect.corner)
    ordered = _loop_edges(rect, m)
    keep = list(range(0, l1 + l2)) + list(range(2 * l1 + l2, 2 * l1 + 2 * l2))
    coeffs: Dict[OrientedCell, int] = {}
    for i in keep:
        e, v = ordered[i]
        coeffs[e] = orientation * v
    return LatticePath(Chain(1, coeffs), "open", rect)


# ---------------------------------------------------------------------------
# Plaquette geometry along a path
# ---------------------------------------------------------------------------


def _plaquettes_with_edge(e: OrientedCell, m: int, box: Optional[LatticeBox]) -> List[OrientedCell]:
    """Positive plaquettes whose boundary supports the positive edge e."""
    (d1,) = e.dirs
    out = []
    for d in range(1, m + 1):
        if d == d1:
            continue
        lo, hi = min(d1, d), max(d1, d)
        for shift in (0, -1):
            base = tuple(b + (shift if i == d - 1 else 0) for i, b in enumerate(e.base))
            p = OrientedCell(base, (lo, hi))
            if box is None or box.contains(p):
                out.append(p)
    return out


def corner_plaquettes(gamma: LatticePath, m: Optional[int] = None, box: Optional[LatticeBox] = None) -> Set[OrientedCell]:
    """P_{gamma,c}: positive plaquettes with >= 2 support edges of gamma on their boundary."""
    m = m if m is not None else len(next(iter(gamma.support)).base)
    supp = gamma.support
    counts: Dict[OrientedCell, int] = {}
    for e in supp:
        for p in _plaquettes_with_edge(e, m, box):
            counts[p] = counts.get(p, 0) + 1
    return {p for p, k in counts.items() if k >= 2}


def p_gamma(gamma: LatticePath, box: LatticeBox) -> Set[OrientedCell]:
    """P_gamma: oriented plaquettes bordering gamma with consistent orientation.

    An oriented plaquette q belongs iff some oriented edge e of gamma has
    e in the oriented boundary of q; corner plaquettes shared by two path
    edges appear once (set semantics).
    """
    out: Set[OrientedCell] = set()
    for f in gamma.support:
        ge = gamma.chain[f]
        for p in _plaquettes_with_edge(f, box.m, box):
            s = boundary(p)[f]
            out.add(p if s * ge > 0 else -p)
    return out


def corner_count(form: FormZn, gamma: LatticePath, m: Optional[int] = None, box: Optional[LatticeBox] = None) -> int:
    """|P_{omega,gamma,c}|: supported plaquettes with exactly two gamma edges in supp delta omega."""
    dsup = delta(form).support
    gsup = gamma.support
    total = 0
    for p in corner_plaquettes(gamma, m=m, box=box):
        if p not in form.support:
            continue
        if len(boundary(p).support & gsup & dsup) == 2:
            total += 1
    return total


def v_set(form: FormZn, gamma: LatticePath) -> Set[OrientedCell]:
    """V^{gamma,omega}: vertices where delta(delta omega^gamma | supp gamma_R) != 0."""
    if gamma.rect is None:
        raise PreconditionError("v_set needs a rectangle descriptor")
    loop = gamma.gamma_R()
    og = omega_gamma(form, gamma.support)
    u = delta(og).restrict(loop.support)
    w = delta(u)
    return w.support


def in_event_E(form: FormZn, gamma: LatticePath, m: Optional[int] = None, box: Optional[LatticeBox] = None) -> bool:
    """The leading-order event: components adjacent to gamma are isolated
    single plaquettes and no supported corner plaquette touches gamma twice."""
    og2 = omega_E(form, gamma.support)
    og = omega_gamma(form, gamma.support)
    n_components = len(connected_components(og)) if not og.is_zero() else 0
    if len(og2.support) != n_components:
        return False
    return corner_count(form, gamma, m=m, box=box) == 0


@dataclass(frozen=True)
class GammaStats:
    """The path statistics entering the explicit bounds."""

    length: int
    p_gamma: int
    p_gamma_c: int
    ell1: int
    ell2: int

    def as_dict(self):
        return {
            "length": self.length,
            "p_gamma": self.p_gamma,
            "p_gamma_c": self.p_gamma_c,
            "ell1": self.ell1,
            "ell2": self.ell2,
        }


def gamma_stats(gamma: LatticePath, box: LatticeBox) -> GammaStats:
    if gamma.rect is None:
        raise PreconditionError("gamma_stats needs a rectangle descriptor")
    return GammaStats(
        length=len(gamma),
        p_gamma=len(p_gamma(gamma, box)),
        p_gamma_c=len(corner_plaquettes(gamma, m=box.m, box=box)),
        ell1=gamma.rect.ell1,
        ell2=gamma.rect.ell2,
    )


def rectangle_p_gamma_count(gamma: LatticePath, m: int) -> int:
    """|P_gamma| from the rectangle geometry, for loops away from the boundary.

    Each edge borders 2(m-1) consistently oriented plaquettes; at every corner
    of the path the two incident edges share one plaquette, merged by the set
    union.
    """
    corners = _path_corner_count(gamma)
    return 2 * (m - 1) * len(gamma) - corners


def _path_corner_count(gamma: LatticePath) -> int:
    """Number of vertices where two perpendicular support edges of gamma meet."""
    by_vertex: Dict[Tuple[int, ...], Set[int]] = {}
    for e in gamma.support:
        for v in boundary(e).support:
            by_vertex.setdefault(v.base, set()).add(e.dirs[0])
    return sum(1 for dirs in by_vertex.values() if len(dirs) >= 2)
