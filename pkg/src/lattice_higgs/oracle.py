"""Brute-force exact expectations on small boxes.

Three enumerations, each a ground truth for the others:

* the two-field measure over (gauge, Higgs) configurations,
* the unitary-gauge measure over gauge configurations only,
* the 2-form measure with the product activity weight.

Configurations are enumerated as mixed-radix integers over the positive
cells in canonical order, in chunks; chunk sums are reduced with
compensated (fsum) accumulation so results are deterministic.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .cells import LatticeBox, OrientedCell, boundary
from .couplings import ModelParams, phi, rho
from .errors import GuardError
from .forms import FormZn, delta
from .paths import LatticePath

STATE_GUARD = 1 << 26
_CHUNK = 1 << 16


class BoxIndex:
    """Canonical enumeration of a box's cells plus integer incidence tables."""

    def __init__(self, box: LatticeBox):
        self.box = box
        self.vertices: List[OrientedCell] = list(box.cells(0))
        self.edges: List[OrientedCell] = list(box.cells(1))
        self.plaqs: List[OrientedCell] = list(box.cells(2))
        self.vertex_id = {c: i for i, c in enumerate(self.vertices)}
        self.edge_id = {c: i for i, c in enumerate(self.edges)}
        self.plaq_id = {c: i for i, c in enumerate(self.plaqs)}
        tails, heads = [], []
        for e in self.edges:
            b = boundary(e)
            for v, s in b.coeffs.items():
                (tails if s < 0 else heads).append(self.vertex_id[v])
        self.edge_tail = np.array(tails, dtype=np.int32)
        self.edge_head = np.array(heads, dtype=np.int32)
        pe, ps = [], []
        for p in self.plaqs:
            items = sorted(boundary(p).coeffs.items())
            pe.append([self.edge_id[e] for e, _ in items])
            ps.append([s for _, s in items])
        self.plaq_edges = np.array(pe, dtype=np.int32).reshape(len(self.plaqs), 4)
        self.plaq_signs = np.array(ps, dtype=np.int8).reshape(len(self.plaqs), 4)

    def gamma_coeffs(self, gamma: LatticePath) -> np.ndarray:
        out = np.zeros(len(self.edges), dtype=np.int8)
        for e, v in gamma.chain.coeffs.items():
            if e not in self.edge_id:
                raise GuardError(f"path edge {e} outside box")
            out[self.edge_id[e]] = v
        return out


@lru_cache(maxsize=8)
def box_index(m: int, N: int) -> BoxIndex:
    return BoxIndex(LatticeBox.centered(m, N))


# ---------------------------------------------------------------------------
# Field configurations and the action
# ---------------------------------------------------------------------------


@dataclass
class GaugeConfig:
    """Z_n gauge field: one residue per positive edge (sigma(-e) = -sigma(e))."""

    n: int
    values: Dict[OrientedCell, int]

    def __call__(self, e: OrientedCell) -> int:
        if e.is_positive:
            return self.values.get(e, 0) % self.n
        return (-self.values.get(-e, 0)) % self.n


@dataclass
class HiggsConfig:
    """Z_n Higgs field: one residue per positive vertex."""

    n: int
    values: Dict[OrientedCell, int]

    def __call__(self, v: OrientedCell) -> int:
        if v.is_positive:
            return self.values.get(v, 0) % self.n
        return (-self.values.get(-v, 0)) % self.n


def action(sigma: GaugeConfig, higgs: HiggsConfig, params: ModelParams) -> float:
    """beta * S_W + kappa * S_H, summed over both orientations (hence real)."""
    idx = box_index(params.m, params.N)
    n = params.n
    sw = 0.0 + 0.0j
    for p in idx.plaqs:
        dsig = sum(s * sigma(e) for e, s in boundary(p).coeffs.items()) % n
        sw += rho(dsig, n) + rho(-dsig, n)
    sh = 0.0 + 0.0j
    for e in idx.edges:
        b = boundary(e)
        dphi = sum(s * higgs(v) for v, s in b.coeffs.items()) % n
        val = (sigma(e) - dphi) % n
        sh += rho(val, n) + rho(-val, n)
    total = -(params.beta * sw + params.kappa * sh)
    if abs(total.imag) > 1e-12 * max(1.0, abs(total.real)):
        raise AssertionError(f"action has imaginary part {total.imag}")
    return total.real


def gauge_transform(sigma: GaugeConfig, higgs: HiggsConfig, eta: HiggsConfig, box: LatticeBox):
    """sigma(e) -> -eta(x) + sigma(e) + eta(y); phi(x) -> phi(x) + eta(x).

    Applied over all box edges: an edge holding 0 may become nonzero.
    """
    n = sigma.n
    new_s: Dict[OrientedCell, int] = {}
    for e in box.cells(1):
        x = y = None
        for v, s in boundary(e).coeffs.items():
            if s > 0:
                y = v
            else:
                x = v
        val = (-eta(x) + sigma(e) + eta(y)) % n
        if val:
            new_s[e] = val
    new_h: Dict[OrientedCell, int] = {}
    for v in box.cells(0):
        val = (higgs(v) + eta(v)) % n
        if val:
            new_h[v] = val
    return GaugeConfig(n, new_s), HiggsConfig(n, new_h)


def wilson_line_value(sigma: GaugeConfig, higgs: HiggsConfig, gamma: LatticePath) -> complex:
    n = sigma.n
    s = sum(v * sigma(e) for e, v in gamma.chain.coeffs.items())
    if gamma.kind == "open":
        x1, x2 = gamma.endpoints
        from .cells import vertex

        s -= higgs(vertex(x2)) - higgs(vertex(x1))
    return rho(s % n, n)


# ---------------------------------------------------------------------------
# Vectorized enumeration machinery
# ---------------------------------------------------------------------------


def _digit_chunks(n: int, k: int, chunk: int = _CHUNK):
    """Yield (offset, digits) blocks of the mixed-radix counter, base n, k cells.

    Cell 0 is the most significant digit, matching canonical cell order.
    """
    total = n**k
    weights = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // weights[None, :]) % n
        yield start, digits.astype(np.int8)


def _cos_table(n: int) -> np.ndarray:
    return np.cos(2 * np.pi * np.arange(n) / n)


def _sin_table(n: int) -> np.ndarray:
    return np.sin(2 * np.pi * np.arange(n) / n)


def _phi_table(a: float, n: int) -> np.ndarray:
    return np.array([phi(a, j, n) for j in range(n)])


def _check_imag(num_im: float, scale: float):
    # the accumulated numerator must be real relative to the partition function
    if abs(num_im) > 1e-9 * abs(scale):
        raise AssertionError(f"expected a real accumulation, got imag {num_im} at scale {scale}")


class _WilsonSpec:
    """Per-box arrays describing a Wilson line observable."""

    def __init__(self, idx: BoxIndex, gamma: LatticePath):
        self.gamma = gamma
        self.coeffs = idx.gamma_coeffs(gamma).astype(np.int64)
        if gamma.kind == "open":
            from .cells import vertex

            x1, x2 = gamma.endpoints
            self.v1 = idx.vertex_id[vertex(x1)]
            self.v2 = idx.vertex_id[vertex(x2)]
        else:
            self.v1 = self.v2 = None


def expect_unitary(observable, params: ModelParams) -> float:
    """Expectation under the unitary-gauge measure by full enumeration of sigma.

    ``observable`` is a LatticePath (Wilson line/loop), a callable on
    GaugeConfig, or None for the constant 1.
    """
    idx = box_index(params.m, params.N)
    E = len(idx.edges)
    if params.n**E > STATE_GUARD:
        raise GuardError(f"unitary enumeration needs {params.n}^{E} states")
    if callable(observable):
        return _expect_unitary_slow(observable, params, idx)
    gam = _WilsonSpec(idx, observable) if observable is not None else None
    cos_t, sin_t = _cos_table(params.n), _sin_table(params.n)
    num_re, num_im, den = [], [], []
    for _, sig in _digit_chunks(params.n, E):
        w = _unitary_weights(sig, idx, params, cos_t)
        if gam is None:
            obs_re = np.ones(len(sig))
            obs_im = np.zeros(len(sig))
        else:
            hol = (sig @ gam.coeffs) % params.n
            obs_re, obs_im = cos_t[hol], sin_t[hol]
        num_re.append(float(w @ obs_re))
        num_im.append(float(w @ obs_im))
        den.append(float(w.sum()))
    nr, ni, dn = math.fsum(num_re), math.fsum(num_im), math.fsum(den)
    _check_imag(ni, dn)
    return nr / dn


def _unitary_weights(sig: np.ndarray, idx: BoxIndex, params: ModelParams, cos_t) -> np.ndarray:
    n = params.n
    dsig = np.zeros((len(sig), len(idx.plaqs)), dtype=np.int16)
    for j in range(4):
        dsig += idx.plaq_signs[:, j][None, :] * sig[:, idx.plaq_edges[:, j]].astype(np.int16)
    dsig %= n
    a_w = cos_t[dsig].sum(axis=1)  # sum over positive plaquettes of Re rho(d sigma)
    a_h = cos_t[sig].sum(axis=1)
    # both orientations double the real part
    return np.exp(2 * params.beta * a_w + 2 * params.kappa * a_h)


def _expect_unitary_slow(f: Callable, params: ModelParams, idx: BoxIndex) -> float:
    n, E = params.n, len(idx.edges)
    if n**E > 1 << 20:
        raise GuardError("slow-path unitary enumeration limited to 2^20 states")
    cos_t = _cos_table(n)
    num, den = [], []
    for _, sig in _digit_chunks(n, E):
        w = _unitary_weights(sig, idx, params, cos_t)
        vals = np.array(
            [f(GaugeConfig(n, {e: int(v) for e, v in zip(idx.edges, row) if v})) for row in sig]
        )
        num.append(float(w @ vals))
        den.append(float(w.sum()))
    return math.fsum(num) / math.fsum(den)


def expect_full(observable, params: ModelParams) -> float:
    """Expectation under the two-field measure; enumerates sigma x phi."""
    idx = box_index(params.m, params.N)
    E, V, n = len(idx.edges), len(idx.vertices), params.n
    if n ** (E + V) > STATE_GUARD:
        raise GuardError(f"two-field enumeration needs {n}^{E + V} states")
    gam = _WilsonSpec(idx, observable) if isinstance(observable, LatticePath) else None
    if observable is not None and gam is None:
        raise TypeError("observable must be None or a LatticePath")
    cos_t, sin_t = _cos_table(n), _sin_table(n)

    sig_blocks = list(_digit_chunks(n, E, chunk=min(_CHUNK, n**E)))
    phi_chunk = max(1, (1 << 22) // (n**E))
    num_re, num_im, den = [], [], []
    for _, phi_blk in _digit_chunks(n, V, chunk=phi_chunk):
        dphi = (phi_blk[:, idx.edge_head].astype(np.int16) - phi_blk[:, idx.edge_tail]) % n
        for _, sig in sig_blocks:
            w_gauge = _unitary_gauge_plaquette_weight(sig, idx, params, cos_t)
            # Higgs energy accumulated edge by edge to avoid a 3-d array
            h = np.zeros((len(sig), len(phi_blk)))
            for j in range(E):
                h += cos_t[(sig[:, j][:, None].astype(np.int16) - dphi[None, :, j]) % n]
            w = w_gauge[:, None] * np.exp(2 * params.kappa * h)
            if gam is None:
                obs_re, obs_im = np.ones_like(w), np.zeros_like(w)
            else:
                hol = (sig @ gam.coeffs) % n
                if gam.v1 is not None:
                    dph = (phi_blk[:, gam.v2].astype(np.int64) - phi_blk[:, gam.v1]) % n
                    tot = (hol[:, None] - dph[None, :]) % n
                else:
                    tot = np.broadcast_to(hol[:, None] % n, w.shape)
                obs_re, obs_im = cos_t[tot], sin_t[tot]
            num_re.append(float((w * obs_re).sum()))
            num_im.append(float((w * obs_im).sum()))
            den.append(float(w.sum()))
    nr, ni, dn = math.fsum(num_re), math.fsum(num_im), math.fsum(den)
    _check_imag(ni, dn)
    return nr / dn


def _unitary_gauge_plaquette_weight(sig, idx, params, cos_t):
    n = params.n
    dsig = np.zeros((len(sig), len(idx.plaqs)), dtype=np.int16)
    for j in range(4):
        dsig += idx.plaq_signs[:, j][None, :] * sig[:, idx.plaq_edges[:, j]].astype(np.int16)
    dsig %= n
    return np.exp(2 * params.beta * cos_t[dsig].sum(axis=1))


# ---------------------------------------------------------------------------
# The 2-form measure
# ---------------------------------------------------------------------------


def _delta_digits(omega: np.ndarray, idx: BoxIndex, n: int) -> np.ndarray:
    out = np.zeros((len(omega), len(idx.edges)), dtype=np.int16)
    for p in range(len(idx.plaqs)):
        for j in range(4):
            out[:, idx.plaq_edges[p, j]] += idx.plaq_signs[p, j] * omega[:, p].astype(np.int16)
    out %= n
    return out


def expect_form(observable, params: ModelParams) -> float:
    """Expectation under the 2-form measure.

    ``observable``: a LatticePath evaluates the high-temperature Wilson
    observable (via the uncancelled product, valid also at kappa = 0),
    a callable on FormZn is evaluated per configuration, None gives 1.
    """
    idx = box_index(params.m, params.N)
    P, n = len(idx.plaqs), params.n
    if n**P > STATE_GUARD:
        raise GuardError(f"form enumeration needs {n}^{P} states")
    phi_b = _phi_table(params.beta, n)
    phi_k = _phi_table(params.kappa, n)
    tilt = idx.gamma_coeffs(observable).astype(np.int16) % n if isinstance(observable, LatticePath) else None
    slow = callable(observable)
    num, den = [], []
    for _, om in _digit_chunks(n, P):
        dw = _delta_digits(om, idx, n)
        w = phi_k[dw].prod(axis=1) * phi_b[om].prod(axis=1)
        if observable is None:
            vals_num = w
        elif tilt is not None:
            shifted = (dw + tilt[None, :]) % n
            vals_num = phi_k[shifted].prod(axis=1) * phi_b[om].prod(axis=1)
        elif slow:
            obs = np.array([observable(_row_to_form(row, idx, n)) for row in om], dtype=float)
            vals_num = w * obs
        else:
            raise TypeError("observable must be None, a LatticePath, or callable")
        num.append(float(vals_num.sum()))
        den.append(float(w.sum()))
    return math.fsum(num) / math.fsum(den)


def _row_to_form(row: np.ndarray, idx: BoxIndex, n: int) -> FormZn:
    return FormZn(2, n, {p: int(v) for p, v in zip(idx.plaqs, row) if v})


def form_distribution(params: ModelParams, tilt: Optional[LatticePath] = None):
    """All 2-form configurations with exact probabilities (tilted if asked).

    Returns (list of value-rows, probability vector); guarded to tiny boxes.
    """
    idx = box_index(params.m, params.N)
    P, n = len(idx.plaqs), params.n
    if n**P > 1 << 16:
        raise GuardError("exact distribution limited to 2^16 configurations")
    phi_b = _phi_table(params.beta, n)
    phi_k = _phi_table(params.kappa, n)
    rows = next(_digit_chunks(n, P, chunk=n**P))[1]
    dw = _delta_digits(rows, idx, n)
    if tilt is not None:
        shift = idx.gamma_coeffs(tilt).astype(np.int16) % n
        dw = (dw + shift[None, :]) % n
    w = phi_k[dw].prod(axis=1) * phi_b[rows].prod(axis=1)
    return rows, w / w.sum()


# ---------------------------------------------------------------------------
# Pointwise activity and Wilson observable on forms
# ---------------------------------------------------------------------------


def activity(form: FormZn, params: ModelParams) -> float:
    """Product of phi_kappa over delta-support edges and phi_beta over support.

    Factors at unsupported cells are phi(0) = 1, so the sparse product
    equals the full product over the box.
    """
    total = 1.0
    dw = delta(form)
    for e, v in dw.values.items():
        total *= phi(params.kappa, v, params.n)
    for p, v in form.values.items():
        total *= phi(params.beta, v, params.n)
    return total


def wilson_hat(form: FormZn, gamma: LatticePath, kappa: float) -> float:
    """The high-temperature Wilson observable (ratio form; needs kappa > 0)."""
    n = form.n
    dw = delta(form)
    total = 1.0
    for e, c in gamma.chain.coeffs.items():
        d = dw(e)
        total *= phi(kappa, (d + c) % n, n) / phi(kappa, d, n)
    return total


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def result_row(params: ModelParams, observable_id: str, value: float, states: int, wall: float):
    return [
        params.m,
        params.n,
        params.N,
        repr(params.beta),
        repr(params.kappa),
        observable_id,
        repr(value),
        states,
        f"{wall:.3f}",
    ]


CSV_HEADER = ["m", "n", "N", "beta", "kappa", "observable", "value", "states", "wall_time_s"]


def timed(fn, *args, **kwargs) -> Tuple[float, float]:
    t0 = time.perf_counter()
    val = fn(*args, **kwargs)
    return val, time.perf_counter() - t0
