"""Ohmic bosonic reservoir: spectral functions, the sinc-product kernel and
frequency integrals of the correlation spectrum against it.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .config import InvalidInputError, QuadratureError, Tolerances, default_tolerances
from .quadrature import integrate_panels, seeded_edges

SUPPORTS = ("full", "positive", "negative")

# lobe budget above which the far field is handled by Fourier-weighted quadrature
DIRECT_LOBE_LIMIT = 20_000
WINDOW_PERIODS = 40
CUTOFF_DECADES = 40.0
SINC_SERIES_BELOW = 1e-4


@dataclass(frozen=True)
class OhmicBath:
    """Gamma(w) = gamma0 * w * exp(-|w| / omega_c), thermal at inverse temperature beta."""

    gamma0: float
    omega_c: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.gamma0) and self.gamma0 >= 0):
            raise InvalidInputError(f"gamma0 must be >= 0, got {self.gamma0}")
        if not (np.isfinite(self.omega_c) and self.omega_c > 0):
            raise InvalidInputError(f"omega_c must be > 0, got {self.omega_c}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise InvalidInputError(f"beta must be > 0, got {self.beta}")

    @property
    def zero_window(self) -> float:
        return 1e-8 * max(1.0 / self.beta, self.omega_c)

    @property
    def omega_max(self) -> float:
        return CUTOFF_DECADES * self.omega_c


def spectral_density(bath: OhmicBath, w):
    w = np.asarray(w, dtype=float)
    out = bath.gamma0 * w * np.exp(-np.abs(w) / bath.omega_c)
    return float(out) if out.ndim == 0 else out


def bose(bath: OhmicBath, w):
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = 1.0 / np.expm1(bath.beta * w)
    return float(out) if out.ndim == 0 else out


def gamma_ft(bath: OhmicBath, w):
    """gamma(w) = Gamma(w) [1 + n_B(w)], with the w -> 0 limit gamma0 / beta."""
    w = np.asarray(w, dtype=float)
    aw = np.abs(w)
    bw = bath.beta * aw
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        # 1 + n_B(w) for w > 0 and -n_B(|w|) for w < 0, times Gamma's sign
        thermal = np.where(w > 0, -1.0 / np.expm1(-bw), 1.0 / np.expm1(bw))
        out = bath.gamma0 * aw * np.exp(-aw / bath.omega_c) * thermal
    out = np.where(aw < bath.zero_window, bath.gamma0 / bath.beta, out)
    out = np.where(np.isfinite(out), out, 0.0)
    return float(out) if out.ndim == 0 else out


def gamma_channel(bath: OhmicBath, w, support="full"):
    """gamma restricted to a half line (Theta(0) = 0 on either half)."""
    g = np.asarray(gamma_ft(bath, w), dtype=float)
    w = np.asarray(w, dtype=float)
    if support == "positive":
        g = np.where(w > 0, g, 0.0)
    elif support == "negative":
        g = np.where(w < 0, g, 0.0)
    elif support != "full":
        raise InvalidInputError(f"unknown support {support!r}")
    return float(g) if g.ndim == 0 else g


def sup_gamma(bath: OhmicBath, support="full") -> float:
    """max_w gamma(w) over the support, by dense sampling plus local refinement."""
    lo, hi = _support_interval(bath, support, 0.0)
    w = np.linspace(lo, hi, 200_001)
    g = gamma_channel(bath, w, support)
    k = int(np.argmax(g))
    fine = np.linspace(w[max(k - 1, 0)], w[min(k + 1, len(w) - 1)], 20_001)
    return float(max(g[k], np.max(gamma_channel(bath, fine, support))))


def sinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SINC_SERIES_BELOW
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelSpec:
    t0: float
    tau: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidInputError(f"coarse-graining time must be > 0, got {self.tau}")


def kernel_phase(spec: KernelSpec) -> complex:
    d = spec.alpha - spec.beta
    return complex(np.exp(1j * d * (spec.t0 + 0.5 * spec.tau)))


def f_kernel(spec: KernelSpec, w):
    """Nascent delta (tau / 2 pi) e^{i(a-b)(t0 + tau/2)} sinc((a-w)tau/2) sinc((b-w)tau/2)."""
    half = 0.5 * spec.tau
    w = np.asarray(w, dtype=float)
    real = spec.tau / (2.0 * np.pi) * sinc((spec.alpha - w) * half) * sinc((spec.beta - w) * half)
    return kernel_phase(spec) * real


def _support_interval(bath, support, reach):
    wmax = max(bath.omega_max, reach)
    if support == "full":
        return -wmax, wmax
    if support == "positive":
        return 0.0, wmax
    if support == "negative":
        return -wmax, 0.0
    raise InvalidInputError(f"unknown support {support!r}")


def _merge(intervals):
    intervals = sorted(intervals)
    out = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return out


def _qawo_cos(func, lo, hi, freq, epsabs, epsrel):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            func, lo, hi, weight="cos", wvar=freq, epsabs=epsabs, epsrel=epsrel, limit=400
        )
    if err > max(100.0 * epsabs, 1e-6 * abs(val)):
        raise QuadratureError(
            f"Fourier-weighted quadrature on [{lo:.4g}, {hi:.4g}] did not converge",
            value=val,
            estimate=err,
        )
    return val, err


def sinc_product_integral(gfun, x, y, tau, lo, hi, rtol=1e-10, atol=1e-14, gscale=1.0,
                          breakpoints=(0.0,), mode="auto"):
    """Real part of  int_lo^hi g(w) (tau/2pi) sinc((x-w)tau/2) sinc((y-w)tau/2) dw.

    ``gfun`` is vectorized and smooth on [lo, hi] apart from ``breakpoints``.
    Long windows at large tau are split into near-resonance windows, which are
    integrated directly, and a far field where the kernel is rewritten as
    ``[cos c - cos((w - m) tau)] / (pi tau (w - x)(w - y))`` and the
    oscillating term goes to a Fourier-weighted rule.
    """
    half = 0.5 * tau
    norm = tau / (2.0 * np.pi)
    atol_eff = max(atol, 1e-3 * rtol * gscale)

    def integrand(w):
        return gfun(w) * norm * sinc((x - w) * half) * sinc((y - w) * half)

    lobe = np.pi / tau
    n_lobes = (hi - lo) / lobe
    points = list(breakpoints) + [x, y]
    if mode == "direct" or (mode == "auto" and n_lobes <= DIRECT_LOBE_LIMIT):
        width = min(lobe, (hi - lo) / 64.0)
        edges = seeded_edges(lo, hi, width, points)
        val, err = integrate_panels(integrand, edges, rtol=rtol, atol=atol_eff)
        return val, err

    w = WINDOW_PERIODS * 2.0 * np.pi / tau
    windows = []
    for c in (x, y):
        a, b = max(lo, c - w), min(hi, c + w)
        if a < b:
            windows.append((a, b))
    windows = _merge(windows) if windows else []
    val = 0.0
    err = 0.0
    for a, b in windows:
        v, e = integrate_panels(integrand, seeded_edges(a, b, lobe, points), rtol=rtol, atol=atol_eff)
        val += v
        err += e
    # far field: complement of the windows, split at breakpoints
    cuts = sorted({lo, hi, *[p for p in breakpoints if lo < p < hi]})
    far = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        segs = [(a, b)]
        for wa, wb in windows:
            nxt = []
            for sa, sb in segs:
                if wb <= sa or wa >= sb:
                    nxt.append((sa, sb))
                    continue
                if sa < wa:
                    nxt.append((sa, wa))
                if wb < sb:
                    nxt.append((wb, sb))
            segs = nxt
        far.extend(s for s in segs if s[1] > s[0])
    if not far:
        return val, err
    mid = 0.5 * (x + y)
    cos_c = np.cos((x - y) * half)
    pref = 1.0 / (np.pi * tau)

    def envelope(w):
        w = np.asarray(w, dtype=float)
        return gfun(w) / ((w - x) * (w - y))

    target = atol_eff / (pref * max(1, 2 * len(far)))
    for a, b in far:
        edges = seeded_edges(a, b, max((b - a) / 16.0, 1e-300), ())
        plain, e1 = integrate_panels(envelope, edges, rtol=rtol, atol=target)
        osc, e2 = _qawo_cos(lambda u: float(envelope(u + mid)), a - mid, b - mid, tau, target, rtol)
        val += pref * (cos_c * plain - osc)
        err += pref * (abs(cos_c) * e1 + e2)
    return val, err


class FrequencyIntegrator:
    """Cached evaluation of int gamma(w) f^tau_{t0}(x, y, w) dw for one bath.

    Cache keys round (x, y, tau) to 12 significant digits; the lock makes
    concurrent lookups and insertions behave like a sequential cache.
    """

    def __init__(self, bath: OhmicBath, tol: Tolerances | None = None):
        self.bath = bath
        self.tol = tol or default_tolerances()
        self._cache = {}
        self._lock = threading.Lock()
        self._gsup = {}

    @staticmethod
    def _round(v):
        return float(f"{v:.12e}")

    def gscale(self, support):
        if support not in self._gsup:
            self._gsup[support] = sup_gamma(self.bath, support)
        return self._gsup[support]

    def real_part(self, x, y, tau, support="full"):
        """The sinc-product integral without the kernel's phase factor."""
        if self.bath.gamma0 == 0:
            return 0.0
        if not tau > 0:
            raise InvalidInputError(f"coarse-graining time must be > 0, got {tau}")
        a, b = sorted((x, y))
        key = (support, self._round(a), self._round(b), self._round(tau))
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        reach = abs(a) + abs(b) + 80.0 * np.pi / tau
        lo, hi = _support_interval(self.bath, support, reach)
        val, _ = sinc_product_integral(
            lambda w: gamma_channel(self.bath, w, support), a, b, tau, lo, hi,
            rtol=self.tol.quad_rtol, atol=self.tol.quad_atol, gscale=self.gscale(support),
        )
        with self._lock:
            self._cache[key] = val
        return val

    def integral(self, spec: KernelSpec, support="full") -> complex:
        real = self.real_part(spec.alpha, spec.beta, spec.tau, support)
        return kernel_phase(spec) * real

    def __len__(self):
        return len(self._cache)


_integrators = {}
_integrators_lock = threading.Lock()


def integrator_for(bath: OhmicBath) -> FrequencyIntegrator:
    tol = default_tolerances()
    key = (bath, tol)
    with _integrators_lock:
        if key not in _integrators:
            _integrators[key] = FrequencyIntegrator(bath, tol)
        return _integrators[key]


def freq_integral(bath: OhmicBath, spec: KernelSpec, support="full") -> complex:
    """int dw gamma(w) f^tau_{t0}(alpha, beta, w) over the channel's support."""
    return integrator_for(bath).integral(spec, support)


def decoherence_integral(bath: OhmicBath, t) -> float:
    """(4/pi) int gamma(w) sin^2(w t / 2) / w^2 dw, the pure-dephasing exponent."""
    if t < 0:
        raise InvalidInputError(f"time must be >= 0, got {t}")
    if t == 0 or bath.gamma0 == 0:
        return 0.0
    # sin^2(wt/2)/w^2 = (pi t / 2) * f^t(0, 0, w)
    return 2.0 * t * integrator_for(bath).real_part(0.0, 0.0, t)


def cg_exponent(bath: OhmicBath, t, tau) -> float:
    """Coherence decay exponent of the fixed-tau coarse-graining solution."""
    if t < 0:
        raise InvalidInputError(f"time must be >= 0, got {t}")
    if not tau > 0:
        raise InvalidInputError(f"coarse-graining time must be > 0, got {tau}")
    if t == 0 or bath.gamma0 == 0:
        return 0.0
    return 2.0 * t * integrator_for(bath).real_part(0.0, 0.0, tau)
