"""Explicit error constants and closed-form bounds for the small-beta regime.

Every constant is a literal transcription of the corresponding display
formula; an independent re-transcription lives in the test suite and the
two are compared numerically.  Powers with path-length exponents are
evaluated in log space so |gamma| in the hundreds cannot underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .couplings import ModelParams, alpha, assumption_check, eta, xi, zeta
from .errors import PreconditionError
from .paths import GammaStats


def _pow(base: float, k: float) -> float:
    if base < 0:
        raise ValueError("negative base")
    if base == 0.0:
        return 0.0 if k > 0 else 1.0
    return math.exp(k * math.log(base))


def _pow1p(x: float, k: float) -> float:
    """(1 + x)^k via log1p, stable for tiny x and large k."""
    return math.exp(k * math.log1p(x))


@dataclass(frozen=True)
class BoundReport:
    """All explicit constants for one (params, path) pair."""

    m: int
    n: int
    N: int
    beta: float
    kappa: float
    gamma: GammaStats
    zeta_beta: float
    xi_kappa: float
    eta_kappa: float
    alpha: float
    eta_power: float  # eta_kappa^{|gamma|}, the perimeter lower bound
    prediction: float  # xi_kappa^{|gamma|} alpha^{|P_gamma|}
    radius: float  # c0 * prediction * zeta_beta
    c1p: float
    c1pp: float
    c1ppp: float
    c1pppp: float
    c1: float
    c2i: float
    c2ii: float
    c2iii: float
    c2: float
    c0: float
    strong_coupling: bool
    small_hopping: bool
    rigorous: bool

    def as_dict(self):
        d = {
            "m": self.m,
            "n": self.n,
            "N": self.N,
            "beta": self.beta,
            "kappa": self.kappa,
            "zeta_beta": self.zeta_beta,
            "xi_kappa": self.xi_kappa,
            "eta_kappa": self.eta_kappa,
            "alpha": self.alpha,
            "eta_power": self.eta_power,
            "prediction": self.prediction,
            "radius": self.radius,
            "c1_prime": self.c1p,
            "c1_double_prime": self.c1pp,
            "c1_triple_prime": self.c1ppp,
            "c1_quadruple_prime": self.c1pppp,
            "c1": self.c1,
            "c2_i": self.c2i,
            "c2_ii": self.c2ii,
            "c2_iii": self.c2iii,
            "c2": self.c2,
            "c0": self.c0,
            "strong_coupling": self.strong_coupling,
            "small_hopping": self.small_hopping,
            "rigorous": self.rigorous,
        }
        d["gamma"] = self.gamma.as_dict()
        return d


def constants(params: ModelParams, stats: GammaStats) -> BoundReport:
    """Evaluate every constant of the error bound for one path.

    Raises when the strong-coupling assumption fails badly enough that a
    geometric denominator is nonpositive; a failed small-hopping assumption
    only clears the ``rigorous`` flag.
    """
    m, n = params.m, params.n
    zb = zeta(params.beta, n)
    xk = xi(params.kappa, n)
    L, Pg, Pc = stats.length, stats.p_gamma, stats.p_gamma_c
    M = (16 * m) ** 2
    M8 = (8 * m) ** 2

    if xk <= 0.0:
        raise PreconditionError("kappa = 0 gives xi_kappa = 0; constants undefined")
    if 1 - M * zb / xk <= 0 or 1 - M * zb <= 0:
        raise PreconditionError(
            f"(16m)^2 zeta_beta = {M * zb:.3g} not below xi_kappa = {xk:.3g}; "
            "constants are undefined outside the strong-coupling regime"
        )
    if xk >= 1:
        raise PreconditionError("xi_kappa must be < 1")

    c1p = M * (_pow1p(M * zb, L) * _pow1p(M * zb / xk**2, Pc) - 1) / (
        xk * (1 - xk) * (1 - M * zb / xk)
    ) + M * (_pow1p(M**2 * zb**2 / xk, L) * _pow1p(M * zb / xk**2, Pc) - 1) / (
        (1 - xk) * (1 - M * zb)
    )
    c1pp = (
        M**2
        / (1 - xk)
        * (L * zb + 2 * Pc * zb / xk**2)
        * _pow1p(M * zb / xk**2, Pc)
        * _pow1p(M * zb, L)
    )
    if zb == 0.0:
        ratio = Pc * M  # the zeta -> 0 limit of ((1 + M zeta)^Pc - 1)/zeta
    else:
        ratio = (_pow1p(M * zb, Pc) - 1) / zb
    c1ppp = ratio * _pow1p(M * zb * xk**2, L)
    c1pppp = (
        M**2
        * zb
        * L
        * _pow1p(M * zb * xk**2, L)
        / (1 - xk)
        * (xk**4 / (1 - M * zb / xk) + M**4 * zb**4 / (1 - M * zb))
    )
    c1 = c1p + c1pp + c1ppp + c1pppp

    c2i = (
        (2 * m - 1)
        * Pg
        * zb
        * xk**4
        * ((1 / (1 - zb * xk**2) + xk**2) ** 2 + xk**4)
        / (1 - (2 * m - 1) * Pg * zb**2 * xk**8)
    )
    c2ii = Pc * M8 * xk**4 / (1 - M8 * zb / xk) + Pg * M8**2 * zb * xk**4 / (1 - M8 * zb / xk)
    c2iii = (
        zb * xk**2 * Pg * 3 * (2 * m - 3) * M8 * xk**4 / (1 - M8 * zb / xk) + Pc * xk
    )
    c2 = c2i + c2ii + c2iii

    al = alpha(params.beta, params.kappa, n)
    c0 = c1 * _pow(al, -Pg) + c2

    pred = _pow(xk, L) * _pow(al, Pg)
    et = eta(params.kappa, n)
    regime = assumption_check(params)
    return BoundReport(
        m=m,
        n=n,
        N=params.N,
        beta=params.beta,
        kappa=params.kappa,
        gamma=stats,
        zeta_beta=zb,
        xi_kappa=xk,
        eta_kappa=et,
        alpha=al,
        eta_power=_pow(et, L),
        prediction=pred,
        radius=c0 * pred * zb,
        c1p=c1p,
        c1pp=c1pp,
        c1ppp=c1ppp,
        c1pppp=c1pppp,
        c1=c1,
        c2i=c2i,
        c2ii=c2ii,
        c2iii=c2iii,
        c2=c2,
        c0=c0,
        strong_coupling=regime.strong_coupling,
        small_hopping=regime.small_hopping,
        rigorous=regime.both,
    )


def perimeter_bound(params: ModelParams, gamma_length: int) -> float:
    """The perimeter-law lower bound eta_kappa^{|gamma|}."""
    return _pow(eta(params.kappa, params.n), gamma_length)


def prediction(params: ModelParams, stats: GammaStats) -> Tuple[float, float]:
    """(central value, error radius) of the small-beta asymptotic.

    Refuses paths with a rectangle side below 7, where the bound is not
    asserted.
    """
    if stats.ell1 < 7 or stats.ell2 < 7:
        raise PreconditionError(
            f"bound requires rectangle sides >= 7, got {stats.ell1} x {stats.ell2}"
        )
    rep = constants(params, stats)
    return rep.prediction, rep.radius


# ---------------------------------------------------------------------------
# Truncated evaluation of the three appendix sums and their closed forms
# ---------------------------------------------------------------------------


def appendix_sums(params: ModelParams, stats: GammaStats, K: int = 60):
    """(numeric, closed-form bound) pairs for the three tail sums.

    The defining multiple sums are truncated to K terms in each geometric
    direction; the closed forms must dominate the numeric values whenever
    the assumptions hold.
    """
    if K < 50:
        raise PreconditionError("truncation K must be >= 50")
    m, n = params.m, params.n
    zb = zeta(params.beta, n)
    xk = xi(params.kappa, n)
    L, Pc = stats.length, stats.p_gamma_c
    M = (16 * m) ** 2
    if xk == 0.0:
        if zb == 0.0:
            return [(0.0, 0.0)] * 3
        raise PreconditionError("xi_kappa = 0 with zeta_beta > 0: sums undefined")
    if M * zb >= 1 or M * zb / xk >= 1:
        raise PreconditionError("geometric ratio >= 1; sums do not converge")

    xL = _pow(xk, L)

    def xpow(k: float) -> float:
        return _pow(xk, k)

    b1 = 0.0
    for i in range(Pc + 1):
        for j in range(max(1, 2 * i), L + 1):
            pref = math.comb(L, j - 2 * i) * math.comb(Pc, i)
            if pref == 0:
                continue
            inner = 0.0
            for k in range(j - i + 1, j - i + 1 + K):
                mk = (M * zb) ** k
                if mk == 0.0:
                    break
                lo = max(j, 3 * j - 3 * i - k)
                s = sum(xpow(L + kp - 2 * j) for kp in range(lo, lo + K))
                inner += mk * s
            b1 += pref * inner

    b1_bound = (
        M * zb / xk * xL / ((1 - xk) * (1 - M * zb / xk))
        * (_pow1p(M * zb / xk**2, Pc) * _pow1p(M * zb, L) - 1)
        + M * zb * xL / ((1 - xk) * (1 - M * zb))
        * (_pow1p(M * zb / xk**2, Pc) * _pow1p(M**2 * zb**2 / xk, L) - 1)
    ) if xk > 0 else 0.0

    b2 = 0.0
    for i in range(Pc + 1):
        for j in range(max(2 * i + 1, 2), L + 1):
            pref = (j - 1) * math.comb(L, j - 2 * i - 1) * math.comb(Pc, i)
            if pref == 0:
                continue
            mk = (M * zb) ** (j - i)
            lo = max(j, 2 * j - 2 * i)
            s = sum(xpow(L + kp - 2 * j) for kp in range(lo, lo + K))
            b2 += pref * mk * s

    b2_bound = (
        xL * M**2 * zb / (1 - xk)
        * (L * zb + 2 * Pc * zb / xk**2)
        * _pow1p(M * zb / xk**2, Pc)
        * _pow1p(M * zb, L)
    ) if xk > 0 else 0.0

    b3 = 0.0
    for j in range(L + 1):
        pref = math.comb(L, j + 1) * (j + 1)
        if pref == 0:
            continue
        inner = 0.0
        for kh in range(j + 2, j + 2 + K):
            mk = (M * zb) ** kh
            if mk == 0.0:
                break
            lo = 4 * j + max(0, j + 6 - kh)
            s = sum(xpow(L + kp - 2 * j) for kp in range(lo, lo + K))
            inner += mk * s
        b3 += pref * inner

    b3_bound = (
        xL * M**2 * zb**2 * L * _pow1p(M * zb * xk**2, L) / (1 - xk)
        * (xk**4 / (1 - M * zb / xk) + M**4 * zb**4 / (1 - M * zb))
    ) if xk > 0 else 0.0

    return [(b1, b1_bound), (b2, b2_bound), (b3, b3_bound)]
