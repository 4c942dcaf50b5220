import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floquet_cg.bath import (
    FrequencyIntegrator,
    KernelSpec,
    OhmicBath,
    cg_exponent,
    decoherence_integral,
    f_kernel,
    freq_integral,
    gamma_channel,
    gamma_ft,
    sinc,
    sinc_product_integral,
    spectral_density,
    sup_gamma,
)
from floquet_cg.config import InvalidInputError
from oracles import trapezoid

BATH = OhmicBath(0.05, 20.0, 1.0)
HOT = OhmicBath(0.05, 15.0, 0.1)
SLOW = OhmicBath(0.05, 1.0, 1.0)


def test_spectral_density_odd():
    w = np.linspace(-5, 5, 11)
    assert np.allclose(spectral_density(BATH, -w), -spectral_density(BATH, w))


@pytest.mark.parametrize("bath", [BATH, HOT, SLOW])
def test_kms(bath):
    w = np.linspace(0.01, 30, 200)
    assert np.allclose(gamma_ft(bath, -w) / gamma_ft(bath, w), np.exp(-bath.beta * w), rtol=1e-12)


def test_gamma_zero_limit_and_continuity():
    assert gamma_ft(BATH, 0.0) == BATH.gamma0 / BATH.beta
    for eps in (1e-7, -1e-7, 1e-5):
        assert abs(gamma_ft(BATH, eps) - BATH.gamma0 / BATH.beta) < 1e-5


def test_gamma_no_overflow():
    w = np.array([-1e4, -800.0, 800.0, 1e4])
    g = gamma_ft(OhmicBath(0.05, 1e3, 50.0), w)
    assert np.all(np.isfinite(g)) and np.all(g >= 0)


def test_channels_split_gamma():
    w = np.linspace(-3, 3, 13)
    pos = gamma_channel(BATH, w, "positive")
    neg = gamma_channel(BATH, w, "negative")
    assert pos[6] == 0 and neg[6] == 0
    mask = w != 0
    assert np.allclose((pos + neg)[mask], gamma_ft(BATH, w)[mask])
    with pytest.raises(InvalidInputError):
        gamma_channel(BATH, w, "both")


def test_bath_validation():
    with pytest.raises(InvalidInputError):
        OhmicBath(0.05, -1.0, 1.0)
    with pytest.raises(InvalidInputError):
        OhmicBath(0.05, 1.0, 0.0)


def test_sup_gamma_bounds():
    # high temperature bound gamma <= gamma0 / beta is attained at 0
    assert np.isclose(sup_gamma(HOT), max(HOT.gamma0 / HOT.beta, np.max(gamma_ft(HOT, np.linspace(0, 100, 10001)))))
    zero_t = OhmicBath(0.05, 15.0, 1e6)
    assert sup_gamma(zero_t) <= zero_t.gamma0 * zero_t.omega_c / np.e * (1 + 1e-9)


def test_sinc_series_branch():
    x = np.array([0.0, 1e-6, 5e-5, 1e-3, 2.0])
    assert np.allclose(sinc(x), np.sinc(x / np.pi), rtol=1e-15, atol=0)


def test_f_kernel_phase_and_symmetry():
    spec = KernelSpec(0.3, 2.0, 1.0, -0.5)
    w = np.linspace(-3, 3, 7)
    swapped = KernelSpec(0.3, 2.0, -0.5, 1.0)
    assert np.allclose(f_kernel(spec, w), np.conj(f_kernel(swapped, w)))
    # double time integral definition
    t = np.linspace(0.3, 2.3, 2001)
    w0 = 0.4
    g1 = np.trapezoid(np.exp(1j * (spec.alpha - w0) * t), t)
    g2 = np.trapezoid(np.exp(-1j * (spec.beta - w0) * t), t)
    assert np.isclose(f_kernel(spec, w0), g1 * g2 / (2 * np.pi * spec.tau), rtol=1e-5)


def test_kernel_normalization():
    # int f(x, x, w) dw = 1
    val, _ = sinc_product_integral(lambda w: np.ones_like(w), 0.3, 0.3, 3.0, -3e3, 3e3, breakpoints=())
    assert abs(val - 1.0) < 1e-3


@pytest.mark.parametrize(
    "bath,spec,support",
    [
        (BATH, KernelSpec(0.0, 0.7, 0.0, 0.0), "full"),
        (BATH, KernelSpec(1.0, 2.5, 3.0, 2.1), "full"),
        (HOT, KernelSpec(0.0, 3.1, 1.7, 1.2), "positive"),
        (HOT, KernelSpec(0.4, 1.3, -1.7, -2.3), "negative"),
        (SLOW, KernelSpec(0.0, 9.0, 0.2, 0.3), "full"),
    ],
)
def test_freq_integral_trapezoid_oracle(bath, spec, support):
    lo = 0.0 if support == "positive" else -40 * bath.omega_c
    hi = 0.0 if support == "negative" else 40 * bath.omega_c
    ref = trapezoid(lambda w: gamma_ft(bath, w) * f_kernel(spec, w), lo, hi)
    assert abs(freq_integral(bath, spec, support) - ref) <= 1e-6 * abs(ref)


def test_windowed_mode_matches_direct():
    g = lambda w: gamma_ft(HOT, w)  # noqa: E731
    for x, y, tau in [(-1.0, 1.0, 1000.0), (0.3, 0.3, 1000.0), (2.0, -0.5, 300.0)]:
        d, _ = sinc_product_integral(g, x, y, tau, -600, 600, mode="direct")
        w, _ = sinc_product_integral(g, x, y, tau, -600, 600, mode="windowed")
        assert abs(d - w) < 1e-12


def test_decoherence_integral_limits():
    assert decoherence_integral(BATH, 0.0) == 0.0
    # short times: (4/pi) int gamma w^2 t^2 / 4 / w^2 = t^2 int gamma / pi
    t = 1e-3
    moment = trapezoid(lambda w: gamma_ft(BATH, w), -800, 800)
    assert np.isclose(decoherence_integral(BATH, t), t * t * moment / np.pi, rtol=1e-4)
    # long times: linear with slope 2 gamma(0)
    slope = (decoherence_integral(BATH, 2000.0) - decoherence_integral(BATH, 1000.0)) / 1000.0
    assert np.isclose(slope, 2 * gamma_ft(BATH, 0.0), rtol=1e-3)
    with pytest.raises(InvalidInputError):
        decoherence_integral(BATH, -1.0)


def test_cg_exponent_dcg_reduction():
    for t in (0.1, 1.0, 7.0):
        assert np.isclose(cg_exponent(BATH, t, t), decoherence_integral(BATH, t), rtol=1e-14)
    assert cg_exponent(BATH, 0.0, 1.0) == 0.0
    with pytest.raises(InvalidInputError):
        cg_exponent(BATH, 1.0, 0.0)


def test_zero_coupling():
    bath = OhmicBath(0.0, 20.0, 1.0)
    assert freq_integral(bath, KernelSpec(0, 1.0, 0.0, 0.0)) == 0
    assert decoherence_integral(bath, 3.0) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(-30, 30), st.floats(-30, 30), st.floats(-2, 3), st.floats(0, 10))
def test_bound_by_sup_gamma(alpha, beta, log_tau, t0):
    spec = KernelSpec(t0, 10**log_tau, alpha, beta)
    assert abs(freq_integral(HOT, spec)) <= sup_gamma(HOT) + 1e-6


def test_integrator_cache_thread_safe():
    integ = FrequencyIntegrator(SLOW)
    args = [(0.1 * k, 0.1 * k + 0.05, 2.0) for k in range(8)]
    seq = [integ.real_part(*a) for a in args]
    fresh = FrequencyIntegrator(SLOW)
    out = {}

    def work(i):
        out[i] = [fresh.real_part(*a) for a in args]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    for vals in out.values():
        assert vals == seq
    assert len(fresh) == len(args)
    # symmetric in (alpha, beta): one cache entry
    fresh.real_part(0.05, 0.01, 2.0)
    fresh.real_part(0.01, 0.05, 2.0)
    assert len(fresh) == len(args) + 1


def test_env_tolerance(monkeypatch):
    from floquet_cg.config import default_tolerances

    monkeypatch.setenv("FLOQUET_CG_QUAD_RTOL", "1e-6")
    assert default_tolerances().quad_rtol == 1e-6
    monkeypatch.setenv("FLOQUET_CG_QUAD_RTOL", "abc")
    with pytest.raises(InvalidInputError):
        default_tolerances()


@pytest.mark.parametrize("alpha,tau", [(0.0, 1.0), (2.5, 0.3), (-7.0, 40.0)])
def test_f_kernel_peak_normalization(alpha, tau):
    assert 2 * np.pi / tau * f_kernel(KernelSpec(1.3, tau, alpha, alpha), alpha) == pytest.approx(1.0, abs=1e-15)


def test_delta_limit_off_resonant():
    for x, y in ((0.5, -0.5), (1.0, 2.0)):
        long = abs(freq_integral(BATH, KernelSpec(0.0, 1e4, x, y)))
        short = abs(freq_integral(BATH, KernelSpec(0.0, 1.0, x, y)))
        assert long < 1e-2 * short


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-1, 2), st.floats(0, 10))
def test_bound_in_delta_units(alpha, beta, log_tau, t0):
    spec = KernelSpec(t0, 10**log_tau, alpha, beta)
    for bath in (BATH, SLOW):
        assert abs(freq_integral(bath, spec)) <= sup_gamma(bath) + 1e-6
