"""The three driven two-level models, their benchmarks and figure presets.

All energies are in units of the level splitting Delta in the presets, but
nothing below assumes Delta = 1.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace

import numpy as np

from .bath import OhmicBath, decoherence_integral, cg_exponent, gamma_channel, gamma_ft
from .config import DegenerateSpectrumError, InvalidInputError
from .floquet import (
    CouplingHarmonics,
    DrivenHamiltonian,
    FloquetData,
    floquet_from_hamiltonian,
    floquet_from_pair,
    fourier_harmonics,
)
from .generators import BathCoupling, GeneratorBuilder, solve_dcg, solve_fixed
from .opcore import IDENTITY, SM, SP, SX, SY, SZ, bessel_j, bloch_vector, dag, density_matrix

PURE_DEPHASING = "pure_dephasing"
CIRCULAR = "circular"
FAST_DRIVING = "fast_driving"
KINDS = (PURE_DEPHASING, CIRCULAR, FAST_DRIVING)

DEFAULT_NMAX = {PURE_DEPHASING: 1, CIRCULAR: 4, FAST_DRIVING: 1}
BLOCH_SLACK = 1e-8


@dataclass(frozen=True)
class Scenario:
    kind: str
    delta: float
    omega: float
    bath: OhmicBath
    bloch0: tuple = (1.0, 0.0, 0.0)
    lam: float = 0.0
    p: complex = 0.0
    n_max: int | None = None
    exact_floquet: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        for name in ("delta", "omega", "lam"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")
        if not np.isfinite(complex(self.p)):
            raise InvalidInputError("p must be finite")
        if not self.omega > 0:
            raise InvalidInputError(f"omega must be > 0, got {self.omega}")
        b = np.asarray(self.bloch0, dtype=float)
        if b.shape != (3,) or not np.all(np.isfinite(b)) or b @ b > 1 + BLOCH_SLACK:
            raise InvalidInputError(f"initial Bloch vector {tuple(b)} is not a valid state")
        object.__setattr__(self, "bloch0", tuple(float(v) for v in b))
        object.__setattr__(self, "p", complex(self.p))
        if self.n_max is None:
            object.__setattr__(self, "n_max", DEFAULT_NMAX[self.kind])
        if self.n_max < 1:
            raise InvalidInputError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @property
    def rho0(self):
        return density_matrix(*self.bloch0)

    @property
    def resonance_tol(self) -> float:
        return 1e-9 * max(self.omega, abs(self.delta))

    def with_(self, **kw) -> "Scenario":
        return replace(self, **kw)


@dataclass(frozen=True)
class BlochSeries:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    method: str

    def __post_init__(self):
        norm = self.x**2 + self.y**2 + self.z**2
        if np.any(norm > 1 + BLOCH_SLACK):
            k = int(np.argmax(norm))
            raise InvalidInputError(
                f"{self.method}: Bloch vector norm {norm[k]:.12g} exceeds 1 at t={self.t[k]:.6g}"
            )

    @classmethod
    def from_states(cls, t, states, method):
        b = bloch_vector(np.asarray(states))
        return cls(np.asarray(t, dtype=float), b[:, 0], b[:, 1], b[:, 2], method)

    def as_array(self):
        return np.column_stack([self.x, self.y, self.z])


def _require(sc: Scenario, kind):
    if sc.kind != kind:
        raise InvalidInputError(f"operation needs a {kind} scenario, got {sc.kind}")


def _grid(t_grid):
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] < 0 or np.any(np.diff(t) < 0):
        raise InvalidInputError("time grid must be a non-empty ascending sequence with t >= 0")
    return t


# ---------------------------------------------------------------------------
# pure dephasing


def pd_hamiltonian(sc: Scenario) -> DrivenHamiltonian:
    d, lam, w = sc.delta, sc.lam, sc.omega

    def h(t):
        t = np.asarray(t, dtype=float)
        return (0.5 * d + lam * np.cos(w * t))[..., None, None] * SZ

    return DrivenHamiltonian(h, sc.period)


def pd_floquet(sc: Scenario) -> FloquetData:
    """Analytic pair Hbar = (Delta/2) sigma^z, kick = exp(-i (lam/Omega) sin(Omega t) sigma^z).

    The Floquet basis is pinned to the sigma^z eigenbasis, which stays well
    defined when the quasienergies coincide modulo Omega (Omega = Delta).
    """
    _require(sc, PURE_DEPHASING)
    amp = sc.lam / sc.omega

    def kick(t):
        phi = amp * np.sin(sc.omega * t)
        return np.diag([np.exp(-1j * phi), np.exp(1j * phi)])

    return floquet_from_pair(0.5 * sc.delta * SZ, kick, sc.omega, degeneracy_tol=0.0)


def _pd_phase(sc, t):
    return np.exp(1j * (sc.delta * t + 2.0 * sc.lam / sc.omega * np.sin(sc.omega * t)))


def _pd_series(sc, t, decay, method):
    x0, y0, z0 = sc.bloch0
    rho10 = 0.5 * (x0 + 1j * y0) * _pd_phase(sc, t) * np.exp(-decay)
    return BlochSeries(t, 2 * rho10.real, 2 * rho10.imag, np.full_like(t, z0), method)


def pd_exact(sc: Scenario, t_grid) -> BlochSeries:
    """Exact coherences exp(i(Delta t + 2 lam/Omega sin Omega t) - D(t)) rho10(0)."""
    _require(sc, PURE_DEPHASING)
    t = _grid(t_grid)
    decay = np.array([decoherence_integral(sc.bath, tk) for tk in t])
    return _pd_series(sc, t, decay, "exact")


def pd_analytic_cg(sc: Scenario, tau, t_grid) -> BlochSeries:
    """Fixed-tau coarse-graining solution; ``tau = inf`` gives the Born-Markov limit."""
    _require(sc, PURE_DEPHASING)
    t = _grid(t_grid)
    if np.isinf(tau):
        decay = 2.0 * gamma_ft(sc.bath, 0.0) * t
        return _pd_series(sc, t, decay, "bm_analytic")
    if not tau > 0:
        raise InvalidInputError(f"coarse-graining time must be > 0, got {tau}")
    decay = np.array([cg_exponent(sc.bath, tk, tau) for tk in t])
    return _pd_series(sc, t, decay, f"cg_analytic:tau={tau:.17g}")


# ---------------------------------------------------------------------------
# circular driving


def circular_hamiltonian(sc: Scenario) -> DrivenHamiltonian:
    d, p, w = sc.delta, sc.p, sc.omega

    def h(t):
        t = np.asarray(t, dtype=float)
        ph = np.exp(-1j * w * t)[..., None, None]
        return 0.5 * d * SZ + p * SP * ph + np.conj(p) * SM * np.conj(ph)

    return DrivenHamiltonian(h, sc.period)


def circular_htilde(sc: Scenario):
    return 0.5 * (sc.delta - sc.omega) * SZ + sc.p * SP + np.conj(sc.p) * SM


def circular_model(sc: Scenario):
    """(driven Hamiltonian, coupling operators [sigma^+, sigma^-], analytic FloquetData)."""
    _require(sc, CIRCULAR)
    w = sc.omega
    hbar = circular_htilde(sc) - 0.5 * w * IDENTITY

    def kick(t):
        return np.diag([np.exp(-1j * w * t), 1.0])

    fd = floquet_from_pair(hbar, kick, w)
    return circular_hamiltonian(sc), [SP, SM], fd


CIRCULAR_CHANNELS = ((0, 1, "positive"), (1, 0, "negative"))


def gamma_tilde_12(bath: OhmicBath, w, omega):
    """Theta(w + Omega) Gamma(w + Omega) [1 + n_B(w + Omega)]."""
    return gamma_channel(bath, np.asarray(w, dtype=float) + omega, "positive")


def gamma_tilde_21(bath: OhmicBath, w, omega):
    """Theta(Omega - w) Gamma(Omega - w) n_B(Omega - w)."""
    return gamma_channel(bath, np.asarray(w, dtype=float) - omega, "negative")


def circular_tilde_steady(sc: Scenario):
    """Steady-state population P_- in the rotating frame and the observable map.

    Returns ``(p_minus, observable)`` where ``observable(op, t)`` gives the
    asymptotic lab-frame expectation value of ``op`` at time(s) ``t``.
    """
    _require(sc, CIRCULAR)
    energies, vecs = np.linalg.eigh(circular_htilde(sc))
    if abs(energies[1] - energies[0]) < 1e-12 * max(1.0, abs(sc.delta), sc.omega):
        raise DegenerateSpectrumError("rotating-frame Hamiltonian is degenerate")
    minus, plus = vecs[:, 0], vecs[:, 1]
    gap = energies[1] - energies[0]
    bath, w = sc.bath, sc.omega
    down = (gamma_tilde_12(bath, gap, w) * abs(np.conj(minus) @ SM @ plus) ** 2
            + gamma_tilde_21(bath, gap, w) * abs(np.conj(minus) @ SP @ plus) ** 2)
    up = (gamma_tilde_12(bath, -gap, w) * abs(np.conj(plus) @ SM @ minus) ** 2
          + gamma_tilde_21(bath, -gap, w) * abs(np.conj(plus) @ SP @ minus) ** 2)
    if down + up <= 0:
        raise DegenerateSpectrumError("both transition rates vanish")
    p_minus = float(down / (down + up))
    rho_bar = p_minus * np.outer(minus, minus.conj()) + (1 - p_minus) * np.outer(plus, plus.conj())

    def observable(op, t):
        t = np.asarray(t, dtype=float)
        # e^{+i Omega t sigma^z / 2} O e^{-i Omega t sigma^z / 2} is diagonal-phased
        ph = np.exp(1j * w * t)
        op = np.asarray(op, dtype=complex)
        out = (op[0, 0] * rho_bar[0, 0] + op[1, 1] * rho_bar[1, 1]
               + ph * op[0, 1] * rho_bar[1, 0] + np.conj(ph) * op[1, 0] * rho_bar[0, 1])
        return out.real

    return p_minus, observable


def circular_asymptotic(sc: Scenario, t_grid) -> BlochSeries:
    t = _grid(t_grid)
    _, obs = circular_tilde_steady(sc)
    return BlochSeries(t, obs(SX, t), obs(SY, t), obs(SZ, t), "asymptotic")


# ---------------------------------------------------------------------------
# fast driving


def fast_hamiltonian(sc: Scenario) -> DrivenHamiltonian:
    d, lam, w = sc.delta, sc.lam, sc.omega

    def h(t):
        t = np.asarray(t, dtype=float)
        return 0.5 * d * SZ + (lam * np.cos(w * t))[..., None, None] * SX

    return DrivenHamiltonian(h, sc.period)


def fast_mu1(sc: Scenario) -> float:
    return bessel_j(0, 2.0 * sc.lam / sc.omega)


def fast_model(sc: Scenario, n_max=None, exact=None):
    """(driven Hamiltonian, [sigma^z], FloquetData, CouplingHarmonics).

    By default the Floquet pair is the fast-driving approximation
    kick = exp(-i (lam/Omega) sin(Omega t) sigma^x), Hbar = (Delta/2) J_0(2 lam/Omega) sigma^z,
    and the harmonics are its Bessel coefficients.  With ``exact`` the pair
    comes from numerical propagation instead.
    """
    _require(sc, FAST_DRIVING)
    n_max = sc.n_max if n_max is None else int(n_max)
    if n_max < 1:
        raise InvalidInputError(f"n_max must be >= 1, got {n_max}")
    exact = sc.exact_floquet if exact is None else exact
    ham = fast_hamiltonian(sc)
    if exact:
        fd = floquet_from_hamiltonian(ham)
        return ham, [SZ], fd, fourier_harmonics([SZ], fd, n_max)
    amp = sc.lam / sc.omega
    arg = 2.0 * amp

    def kick(t):
        phi = amp * np.sin(sc.omega * t)
        return np.cos(phi) * IDENTITY - 1j * np.sin(phi) * SX

    hbar = 0.5 * sc.delta * fast_mu1(sc) * SZ
    fd = floquet_from_pair(hbar, kick, sc.omega)
    v = fd.vectors
    tensor = np.empty((1, 2 * n_max + 1, 2, 2), dtype=complex)
    for i, m in enumerate(range(-n_max, n_max + 1)):
        jm = bessel_j(m, arg)
        op = jm * SZ if m % 2 == 0 else -1j * jm * SY
        tensor[0, i] = dag(v) @ op @ v
    return ham, [SZ], fd, CouplingHarmonics(tensor, n_max)


def fast_benchmark(sc: Scenario, t_grid) -> BlochSeries:
    """Fast-driving analytic solution with Sigma(t) = exp(-mu1^2 D(t))."""
    _require(sc, FAST_DRIVING)
    t = _grid(t_grid)
    x0, y0, z0 = sc.bloch0
    mu1 = fast_mu1(sc)
    sig = np.exp(-(mu1**2) * np.array([decoherence_integral(sc.bath, tk) for tk in t]))
    c = np.cos(mu1 * sc.delta * t)
    s = np.sin(mu1 * sc.delta * t)
    phi = 2.0 * sc.lam / sc.omega * np.sin(sc.omega * t)
    rot = (s * x0 + c * y0) * sig
    x = (c * x0 - s * y0) * sig
    y = -np.sin(phi) * z0 + np.cos(phi) * rot
    z = np.cos(phi) * z0 + np.sin(phi) * rot
    return BlochSeries(t, x, y, z, "fd")


def fast_asymptotic(sc: Scenario, t_grid):
    """Long-time limit (sigma^y, sigma^z) of the fast-driving solution."""
    t = _grid(t_grid)
    phi = 2.0 * sc.lam / sc.omega * np.sin(sc.omega * t)
    z0 = sc.bloch0[2]
    return -np.sin(phi) * z0, np.cos(phi) * z0


# ---------------------------------------------------------------------------
# master-equation pipeline


@dataclass(frozen=True)
class Pipeline:
    scenario: Scenario
    fd: FloquetData
    harmonics: CouplingHarmonics
    builder: GeneratorBuilder

    def propagator(self, t):
        return self.fd.propagator(t)


@functools.lru_cache(maxsize=32)
def pipeline(sc: Scenario, n_max=None) -> Pipeline:
    """Floquet data, harmonics and generator builder for a scenario (cached)."""
    n_max = sc.n_max if n_max is None else int(n_max)
    if sc.kind == PURE_DEPHASING:
        fd = pd_floquet(sc)
        ch = fourier_harmonics([SZ], fd, n_max)
        coupling = BathCoupling(sc.bath)
    elif sc.kind == CIRCULAR:
        ham, ops, fd = circular_model(sc)
        if sc.exact_floquet:
            fd = floquet_from_hamiltonian(ham)
        ch = fourier_harmonics(ops, fd, n_max)
        coupling = BathCoupling(sc.bath, CIRCULAR_CHANNELS)
    else:
        _, _, fd, ch = fast_model(sc, n_max)
        coupling = BathCoupling(sc.bath)
    builder = GeneratorBuilder(fd, ch, coupling, sc.resonance_tol)
    return Pipeline(sc, fd, ch, builder)


METHODS = ("exact", "fd", "dcg", "pcg", "cg", "longterm", "bms", "bmu")


def parse_method(name: str):
    """Split a method tag into (base, tau); ``cg:tau=0.5`` -> ("cg", 0.5)."""
    name = name.strip()
    if name.startswith("cg:"):
        arg = name[3:].strip()
        for prefix in ("tau=", "τ="):
            if arg.startswith(prefix):
                arg = arg[len(prefix):]
        try:
            tau = float(arg)
        except ValueError as exc:
            raise InvalidInputError(f"bad coarse-graining time in method {name!r}") from exc
        if not (np.isfinite(tau) and tau > 0):
            raise InvalidInputError(f"coarse-graining time must be > 0 in method {name!r}")
        return "cg", tau
    if name not in METHODS or name == "cg":
        raise InvalidInputError(f"unknown method {name!r}; expected one of {METHODS} (cg as cg:tau=<value>)")
    return name, None


def check_method(sc: Scenario, name: str):
    base, tau = parse_method(name)
    if base == "exact" and sc.kind != PURE_DEPHASING:
        raise InvalidInputError("method 'exact' is only available for the pure_dephasing model")
    if base == "fd" and sc.kind != FAST_DRIVING:
        raise InvalidInputError("method 'fd' is only available for the fast_driving model")
    return base, tau


def simulate(sc: Scenario, method: str, t_grid, n_max=None, workers=1) -> BlochSeries:
    """Lab-frame Bloch series of one method on a time grid."""
    base, tau = check_method(sc, method)
    t = _grid(t_grid)
    if base == "exact":
        return replace(pd_exact(sc, t), method=method)
    if base == "fd":
        return replace(fast_benchmark(sc, t), method=method)
    pl = pipeline(sc, n_max)
    b = pl.builder
    if base == "dcg":
        states = solve_dcg(lambda tk: b.cg(tk, 0.0, "dcg"), sc.rho0, t, pl.propagator, workers)
    else:
        if base == "pcg":
            gen = b.cg(sc.period, 0.0, "pcg")
        elif base == "cg":
            gen = b.cg(tau, 0.0)
        elif base == "longterm":
            gen = b.longterm()
        elif base == "bms":
            gen = b.bms()
        else:
            gen = b.bmu()
        states = solve_fixed(gen, sc.rho0, t, pl.propagator)
    return BlochSeries.from_states(t, states, method)


# ---------------------------------------------------------------------------
# presets (Delta = 1)


def _preset_table():
    fig2 = Scenario(PURE_DEPHASING, 1.0, 10.0, OhmicBath(0.05, 20.0, 1.0), (1.0, 0.0, 0.0), lam=0.5)
    fig4 = Scenario(CIRCULAR, 1.0, 2.0, OhmicBath(0.05, 15.0, 0.1), (0.6, 0.0, 0.4), p=0.5)
    fig5 = Scenario(FAST_DRIVING, 1.0, 25.0, OhmicBath(0.05, 15.0, 1.0), (0.2, 0.0, 0.4), lam=0.5)
    return {
        "fig2": (fig2, "pure dephasing, Omega = 10, lam = 1/2, omega_c = 20, beta = 1",
                 ("exact", "dcg", "pcg", "bms", "bmu"), 10.0, 200),
        "fig3": (fig2.with_(omega=1.0), "pure dephasing with slow driving, Omega = 1",
                 ("exact", "dcg", "pcg", "bms", "bmu"), 10.0, 200),
        "fig4": (fig4, "circular driving, Omega = 2, P = 1/2, beta = 0.1, omega_c = 15",
                 ("dcg", "pcg", "bms", "bmu"), 20.0, 200),
        "fig5": (fig5, "fast driving, Omega = 25, lam = 1/2, beta = 1, omega_c = 15",
                 ("fd", "dcg", "pcg", "bms", "bmu"), 10.0, 200),
        "fig6": (fig5, "fast driving, as fig5, long-time window",
                 ("fd", "dcg", "pcg", "bms", "bmu"), 100.0, 400),
        "fig7": (fig5.with_(bath=OhmicBath(0.05, 1.0, 1.0)), "fast driving with slow bath, omega_c = 1",
                 ("fd", "dcg", "pcg", "bms", "bmu"), 10.0, 100),
        # exploratory regimes, structural checks only
        "circular_fast": (fig4.with_(omega=8.0), "circular driving, omega_c > Omega >> Delta (exploratory)",
                          ("dcg", "pcg", "bms", "bmu"), 20.0, 200),
        "circular_slow": (fig4.with_(omega=1.2), "circular driving, omega_c >> Omega ~ Delta (exploratory)",
                          ("dcg", "pcg", "bms", "bmu"), 20.0, 200),
    }


EXPLORATORY = ("circular_fast", "circular_slow")


PRESETS = _preset_table()


def preset(name: str) -> Scenario:
    try:
        return PRESETS[name][0]
    except KeyError:
        raise InvalidInputError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
