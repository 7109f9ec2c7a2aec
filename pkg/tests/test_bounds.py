import math

import numpy as np
import pytest

from lattice_higgs.bounds import appendix_sums, constants, perimeter_bound, prediction
from lattice_higgs.cells import LatticeBox
from lattice_higgs.couplings import ModelParams, alpha, eta, eta_hat, xi, zeta
from lattice_higgs.errors import PreconditionError
from lattice_higgs.oracle import expect_unitary
from lattice_higgs.paths import GammaStats, RectDescriptor, gamma_stats, rectangle_loop

DESK = ModelParams(m=2, n=2, N=16, beta=1e-4, kappa=0.25)
DESK_STATS = GammaStats(length=32, p_gamma=60, p_gamma_c=4, ell1=8, ell2=8)


def admissible_points():
    # 10 parameter points inside the assumption region, n = 2, m in {2, 4}
    pts = []
    for m in (2, 4):
        for i in range(5):
            kappa = 0.10 + 0.05 * i
            beta = math.tanh(kappa) / (16 * m) ** 2 * (0.2 + 0.15 * i)
            pts.append(ModelParams(m=m, n=2, N=16, beta=beta, kappa=kappa))
    return pts


# -- independent re-transcription of every constant (different structure) ----


def retranscribe(p: ModelParams, st: GammaStats):
    zb, xk = zeta(p.beta, p.n), xi(p.kappa, p.n)
    L, Pg, Pc, m = st.length, st.p_gamma, st.p_gamma_c, p.m
    A = (16 * m) ** 2 * zb  # the walk-counting ratio of the gamma-attached sums
    B = (8 * m) ** 2 * zb  # same for the free sums
    one_mx = 1 - xk

    t1 = (1 + A) ** L * (1 + A / xk**2) ** Pc - 1
    c1p = (16 * m) ** 2 * t1 / (xk * one_mx * (1 - A / xk))
    t2 = (1 + A**2 / ((16 * m) ** 2 * xk) * (16 * m) ** 2) ** L * (1 + A / xk**2) ** Pc - 1
    c1p += (16 * m) ** 2 * t2 / (one_mx * (1 - A))

    c1pp = (16 * m) ** 4 / one_mx * zb * (L + 2 * Pc / xk**2)
    c1pp *= (1 + A / xk**2) ** Pc * (1 + A) ** L

    if zb == 0:
        c1ppp = Pc * (16 * m) ** 2
    else:
        c1ppp = ((1 + A) ** Pc - 1) / zb * (1 + A * xk**2) ** L

    bracket = xk**4 / (1 - A / xk) + (16 * m) ** 8 * zb**4 / (1 - A)
    c1pppp = (16 * m) ** 4 * zb * L * (1 + A * xk**2) ** L / one_mx * bracket

    deg = 2 * m - 1
    c2i_num = deg * Pg * zb * xk**4 * ((1 / (1 - zb * xk**2) + xk**2) ** 2 + xk**4)
    c2i = c2i_num / (1 - deg * Pg * zb**2 * xk**8)

    c2ii = (Pc * (8 * m) ** 2 * xk**4 + Pg * (8 * m) ** 4 * zb * xk**4) / (1 - B / xk)

    c2iii = Pg * zb * xk**6 * 3 * (2 * m - 3) * (8 * m) ** 2 / (1 - B / xk) + Pc * xk

    c1 = c1p + c1pp + c1ppp + c1pppp
    c2 = c2i + c2ii + c2iii
    al = alpha(p.beta, p.kappa, p.n)
    c0 = c1 / al**Pg + c2
    return dict(
        c1p=c1p, c1pp=c1pp, c1ppp=c1ppp, c1pppp=c1pppp, c1=c1,
        c2i=c2i, c2ii=c2ii, c2iii=c2iii, c2=c2, c0=c0,
    )


def test_transcription_agreement():
    for p in admissible_points():
        rep = constants(p, DESK_STATS)
        ref = retranscribe(p, DESK_STATS)
        for key, want in ref.items():
            got = getattr(rep, key)
            assert got == pytest.approx(want, rel=1e-10), key


def test_c1_is_sum_of_parts():
    rng = np.random.default_rng(1)
    for _ in range(10):
        kappa = float(rng.uniform(0.1, 0.3))
        beta = math.tanh(kappa) / 1024 * float(rng.uniform(0.05, 0.8))
        p = ModelParams(m=2, n=2, N=8, beta=beta, kappa=kappa)
        rep = constants(p, DESK_STATS)
        assert rep.c1 == pytest.approx(rep.c1p + rep.c1pp + rep.c1ppp + rep.c1pppp, rel=1e-14)
        assert rep.c2 == pytest.approx(rep.c2i + rep.c2ii + rep.c2iii, rel=1e-14)
        assert rep.c0 == pytest.approx(rep.c1 * rep.alpha ** -rep.gamma.p_gamma + rep.c2, rel=1e-14)


def test_beta_zero_report():
    p = ModelParams(m=2, n=2, N=16, beta=0.0, kappa=0.25)
    rep = constants(p, DESK_STATS)
    assert rep.zeta_beta == 0.0
    assert rep.radius == 0.0
    assert rep.prediction == pytest.approx(eta_hat(0.25, 2) ** 32, rel=1e-12)
    assert math.isfinite(rep.c0) and rep.c0 > 0
    val, rad = prediction(p, DESK_STATS)
    assert rad == 0.0 and val == rep.prediction


def test_desk_scale_golden_values():
    # frozen on first evaluation; guards against transcription drift
    rep = constants(DESK, DESK_STATS)
    assert rep.alpha == pytest.approx(1.0000335892324435, rel=1e-12)
    assert rep.c1p == pytest.approx(42881365.90432727, rel=1e-9)
    assert rep.c1pp == pytest.approx(154923434.40245542, rel=1e-9)
    assert rep.c1ppp == pytest.approx(21777.262753879364, rel=1e-9)
    assert rep.c1pppp == pytest.approx(4129.085779123126, rel=1e-9)
    assert rep.c2i == pytest.approx(0.0024928837682418685, rel=1e-9)
    assert rep.c2ii == pytest.approx(92.85138892413907, rel=1e-9)
    assert rep.c2iii == pytest.approx(1.9494061969542225, rel=1e-9)
    val, rad = prediction(DESK, DESK_STATS)
    assert val == pytest.approx(1.874745074786359e-11, rel=1e-12)
    assert rad == pytest.approx(7.402712443378321e-07, rel=1e-9)


def test_prediction_requires_side_lengths():
    small = GammaStats(length=16, p_gamma=28, p_gamma_c=4, ell1=4, ell2=4)
    with pytest.raises(PreconditionError):
        prediction(DESK, small)


def test_constants_reject_broken_regime():
    bad = ModelParams(m=2, n=2, N=4, beta=0.5, kappa=0.1)
    with pytest.raises(PreconditionError):
        constants(bad, DESK_STATS)
    with pytest.raises(PreconditionError):
        constants(ModelParams(m=2, n=2, N=4, beta=0.1, kappa=0.0), DESK_STATS)


def test_non_rigorous_flagged_when_small_hopping_fails():
    # large kappa keeps the geometric sums convergent but breaks assumption 3
    p = ModelParams(m=2, n=2, N=8, beta=1e-5, kappa=0.9)
    rep = constants(p, DESK_STATS)
    assert rep.strong_coupling and not rep.small_hopping
    assert not rep.rigorous


def test_perimeter_bound_values():
    assert perimeter_bound(ModelParams(m=2, n=2, N=1, beta=0.1, kappa=0.0), 4) == 0.0
    want = math.tanh(0.6) ** 4
    got = perimeter_bound(ModelParams(m=2, n=2, N=1, beta=0.1, kappa=0.3), 4)
    assert got == pytest.approx(want, rel=1e-12)


def test_perimeter_bound_below_oracle():
    loop = rectangle_loop(RectDescriptor(corner=(0, 0), axes=(1, 2), lengths=(1, 1)))
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    for beta in grid:
        for kappa in grid:
            p = ModelParams(m=2, n=2, N=1, beta=beta, kappa=kappa)
            assert perimeter_bound(p, len(loop)) <= expect_unitary(loop, p) + 1e-12


def test_appendix_sums_dominated_and_stable():
    for p in admissible_points():
        pairs60 = appendix_sums(p, DESK_STATS, K=60)
        pairs120 = appendix_sums(p, DESK_STATS, K=120)
        for (num, bound), (num2, _) in zip(pairs60, pairs120):
            assert num <= bound, (p, num, bound)
            if num2 > 0:
                assert abs(num - num2) / num2 < 1e-12


def test_appendix_sums_zero_at_beta_zero():
    p = ModelParams(m=2, n=2, N=16, beta=0.0, kappa=0.25)
    for num, bound in appendix_sums(p, DESK_STATS, K=60):
        assert num == 0.0 and num <= bound


def test_appendix_bounds_match_c1_parts():
    # each closed form equals the corresponding constant times xi^L zeta
    p = DESK
    rep = constants(p, DESK_STATS)
    scale = rep.xi_kappa ** DESK_STATS.length * rep.zeta_beta
    pairs = appendix_sums(p, DESK_STATS, K=60)
    assert pairs[0][1] == pytest.approx(rep.c1p * scale, rel=1e-10)
    assert pairs[1][1] == pytest.approx(rep.c1pp * scale, rel=1e-10)
    assert pairs[2][1] == pytest.approx(rep.c1pppp * scale, rel=1e-10)


def test_truncation_precondition():
    with pytest.raises(PreconditionError):
        appendix_sums(DESK, DESK_STATS, K=10)


def test_monotone_sanity_radius_and_alpha():
    radii = []
    for beta in (1e-3, 1e-4, 1e-5, 1e-6):
        p = ModelParams(m=2, n=2, N=16, beta=beta, kappa=0.25)
        rep = constants(p, DESK_STATS)
        radii.append(rep.radius)
        assert 1 <= rep.alpha <= 1 / (1 - rep.zeta_beta * rep.xi_kappa**2) + 1e-12
    assert radii == sorted(radii, reverse=True)
    assert radii[-1] < 1e-9


def test_gamma_stats_agree_with_rectangle_formula():
    # lattice-dec count and the closed-form rectangle count must agree
    box = LatticeBox.centered(2, 16)
    loop = rectangle_loop(RectDescriptor(corner=(-4, -4), axes=(1, 2), lengths=(8, 8)))
    st = gamma_stats(loop, box)
    assert st == DESK_STATS
    from lattice_higgs.paths import rectangle_p_gamma_count

    assert st.p_gamma == rectangle_p_gamma_count(loop, m=2)
