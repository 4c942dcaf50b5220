"""Coarse-graining generators, their long-time limits and the propagation schemes.

Generators act in the interaction picture of the driven system, where the
coupling operators read

    A_alpha(t) = sum_{abn} A^n_{alpha,ab} exp(i (E_a - E_b + n Omega) t) L_ab,

with L_ab = |a><b| in the Floquet basis.  Collecting the double time integral
over the coarse-graining window gives a dissipator in LGKS form over the four
jump operators L_xy.  The Hermitian (Lamb-shift) correction is set to zero.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bath import FrequencyIntegrator, KernelSpec, OhmicBath, gamma_channel, integrator_for, kernel_phase
from .config import ConsistencyError, InvalidInputError, Tolerances, default_tolerances
from .floquet import CouplingHarmonics, FloquetData
from .opcore import check_density_matrix, dag, devectorize, lgks_apply, lgks_superop, matrix_exp, vectorize

log = logging.getLogger(__name__)

SCHEMES = ("cg", "dcg", "pcg", "longterm", "bms", "bmu")
# harmonics below this fraction of the largest one are dropped from the sums
WEIGHT_CUTOFF = 1e-12


@dataclass(frozen=True)
class BathCoupling:
    """Bath plus the non-vanishing correlation channels.

    Each channel ``(alpha, beta, support)`` contributes gamma restricted to
    ``support`` as gamma_{alpha beta}.
    """

    bath: OhmicBath
    channels: tuple = ((0, 0, "full"),)

    @classmethod
    def wrap(cls, bath):
        return bath if isinstance(bath, cls) else cls(bath)


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str
    n_max: int = 1
    resonance_tol: float = 1e-9
    tau: float | None = None
    strict_bmu: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidInputError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not self.resonance_tol > 0:
            raise InvalidInputError(f"resonance_tol must be > 0, got {self.resonance_tol}")
        if self.n_max < 1:
            raise InvalidInputError(f"n_max must be >= 1, got {self.n_max}")
        if self.scheme == "cg" and not (self.tau is not None and self.tau > 0):
            raise InvalidInputError("scheme 'cg' needs a coarse-graining time tau > 0")


def floquet_jumps(fd: FloquetData):
    """L_xy = |x><y| in the computational basis, indexed by 2 x + y."""
    v = fd.vectors
    return [np.outer(v[:, x], np.conj(v[:, y])) for x in range(2) for y in range(2)]


@dataclass(frozen=True)
class LgksGenerator:
    kossakowski: np.ndarray
    jumps: tuple
    hamiltonian_correction: np.ndarray
    scheme: str
    tau: float | None = None
    t0: float = 0.0
    symmetrization: float = 0.0
    _sup: list = field(default_factory=list, compare=False, repr=False)

    def superoperator(self):
        if not self._sup:
            self._sup.append(lgks_superop(self.kossakowski, self.jumps, self.hamiltonian_correction))
        return self._sup[0]

    def apply(self, rho):
        return lgks_apply(self.kossakowski, self.jumps, rho, self.hamiltonian_correction)

    def validate(self, tol: Tolerances | None = None):
        tol = tol or default_tolerances()
        k = self.kossakowski
        herm = np.max(np.abs(k - dag(k)), initial=0.0)
        if herm > tol.kossakowski_hermitian:
            raise ConsistencyError(f"{self.scheme}: Kossakowski matrix not Hermitian ({herm:.3e})")
        emin = float(np.min(np.linalg.eigvalsh(k)))
        if emin < -tol.kossakowski_psd:
            raise ConsistencyError(f"{self.scheme}: Kossakowski matrix has eigenvalue {emin:.3e}")
        sup = self.superoperator()
        # trace preservation: vec(1)^T L = 0
        leak = np.max(np.abs(vectorize(np.eye(2)) @ sup))
        if leak > tol.trace:
            raise ConsistencyError(f"{self.scheme}: generator is not trace preserving ({leak:.3e})")
        return self

    @property
    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.kossakowski)))


@dataclass(frozen=True)
class _Term:
    channel: int
    x: float  # frequency E_a - E_b + n Omega
    y: float  # frequency E_c - E_d + n' Omega
    weight: complex
    j: int
    k: int
    a: int
    b: int
    c: int
    d: int
    n: int
    n2: int


def _terms(fd: FloquetData, ch: CouplingHarmonics, coupling: BathCoupling):
    energies = fd.quasienergies
    omega = fd.omega
    scale = np.max(np.abs(ch.tensor), initial=0.0)
    if scale == 0:
        return []
    cut = WEIGHT_CUTOFF * scale
    out = []
    for ci, (alpha, beta, _support) in enumerate(coupling.channels):
        if alpha >= ch.n_ops or beta >= ch.n_ops:
            raise InvalidInputError(f"channel ({alpha}, {beta}) refers to a missing coupling operator")
        left = []
        right = []
        for n in ch.orders:
            an = ch.get(alpha, int(n))
            bn = ch.get(beta, int(-n))
            for p in range(2):
                for q in range(2):
                    if abs(an[p, q]) > cut:
                        left.append((p, q, int(n), an[p, q]))
                    # A^{-n'}_{beta,dc} with (d, c) = (p, q), n' = n
                    if abs(bn[p, q]) > cut:
                        right.append((q, p, int(n), bn[p, q]))
        for a, b, n, wa in left:
            x = energies[a] - energies[b] + n * omega
            for c, d, n2, wb in right:
                y = energies[c] - energies[d] + n2 * omega
                out.append(_Term(ci, x, y, wa * wb, 2 * b + a, 2 * d + c, a, b, c, d, n, n2))
    return out


def _assemble(fd, terms, values, scheme, tau=None, t0=0.0, tol=None):
    tol = tol or default_tolerances()
    k = np.zeros((4, 4), dtype=complex)
    for term, val in zip(terms, values):
        k[term.j, term.k] += term.weight * val
    herm = 0.5 * (k + dag(k))
    corr = float(np.max(np.abs(k - herm), initial=0.0))
    if corr > tol.symmetrize_flag:
        log.warning("%s generator: Hermitian symmetrization changed entries by %.3e", scheme, corr)
    gen = LgksGenerator(
        kossakowski=herm,
        jumps=tuple(floquet_jumps(fd)),
        hamiltonian_correction=np.zeros((2, 2), dtype=complex),
        scheme=scheme,
        tau=tau,
        t0=t0,
        symmetrization=corr,
    )
    return gen.validate(tol)


class GeneratorBuilder:
    """Builds every generator variant for one (Floquet data, harmonics, bath) triple.

    The enumeration of contributing terms happens once; only the frequency
    integrals depend on tau, and those are cached by the bath integrator.
    """

    def __init__(self, fd: FloquetData, ch: CouplingHarmonics, bath, resonance_tol=None,
                 tol: Tolerances | None = None):
        self.fd = fd
        self.ch = ch
        self.coupling = BathCoupling.wrap(bath)
        self.tol = tol or default_tolerances()
        if resonance_tol is None:
            resonance_tol = 1e-9 * fd.omega
        if not resonance_tol > 0:
            raise InvalidInputError(f"resonance_tol must be > 0, got {resonance_tol}")
        self.resonance_tol = float(resonance_tol)
        self.terms = _terms(fd, ch, self.coupling)
        self.integrator: FrequencyIntegrator = integrator_for(self.coupling.bath)

    def _support(self, term):
        return self.coupling.channels[term.channel][2]

    def cg(self, tau, t0=0.0, scheme="cg") -> LgksGenerator:
        if not (np.isfinite(tau) and tau > 0):
            raise InvalidInputError(f"coarse-graining time must be > 0, got {tau}")
        values = []
        for term in self.terms:
            spec = KernelSpec(t0, tau, term.x, term.y)
            real = self.integrator.real_part(term.x, term.y, tau, self._support(term))
            values.append(kernel_phase(spec) * real)
        return _assemble(self.fd, self.terms, values, scheme, tau, t0, self.tol)

    def _limit(self, keep, scheme):
        bath = self.coupling.bath
        terms = [t for t in self.terms if keep(t)]
        values = [gamma_channel(bath, t.x, self._support(t)) for t in terms]
        return _assemble(self.fd, terms, values, scheme, None, 0.0, self.tol)

    def longterm(self) -> LgksGenerator:
        rt = self.resonance_tol
        return self._limit(lambda t: abs(t.x - t.y) < rt, "longterm")

    def bms(self) -> LgksGenerator:
        e = self.fd.quasienergies
        rt = self.resonance_tol

        def keep(t):
            return t.n == t.n2 and abs((e[t.a] - e[t.b]) - (e[t.c] - e[t.d])) < rt

        return self._limit(keep, "bms")

    def bmu(self, strict=False) -> LgksGenerator:
        """Ultrasecular limit: only a = c, b = d and n = n'.

        Unless ``strict``, the zero-frequency dephasing block (a = b, c = d,
        n = n' = 0) is kept in full, so that the undriven pure-dephasing limit
        reproduces the Born-Markov-secular rate.
        """

        def keep(t):
            if t.n != t.n2:
                return False
            if t.a == t.c and t.b == t.d:
                return True
            return not strict and t.n == 0 and t.a == t.b and t.c == t.d

        return self._limit(keep, "bmu")


def build_cg(fd, ch, bath, tau, t0=0.0) -> LgksGenerator:
    return GeneratorBuilder(fd, ch, bath).cg(tau, t0)


def build_longterm(fd, ch, bath, resonance_tol=None) -> LgksGenerator:
    return GeneratorBuilder(fd, ch, bath, resonance_tol).longterm()


def build_bms(fd, ch, bath, resonance_tol=None) -> LgksGenerator:
    return GeneratorBuilder(fd, ch, bath, resonance_tol).bms()


def build_bmu(fd, ch, bath, strict=False) -> LgksGenerator:
    return GeneratorBuilder(fd, ch, bath).bmu(strict)


def _check_grid(t_grid):
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidInputError("time grid must be a non-empty 1-D sequence")
    if t[0] < 0 or np.any(np.diff(t) < 0) or not np.all(np.isfinite(t)):
        raise InvalidInputError("time grid must be finite, ascending and start at t >= 0")
    return t


def _to_frame(rho, t, propagator):
    if propagator is None:
        return rho
    u = propagator(t)
    return u @ rho @ dag(u)


def _finish(rho, t, tol, what):
    rho = 0.5 * (rho + dag(rho))
    return check_density_matrix(rho, tol, f"{what} state at t={t:.6g}")


def solve_fixed(gen: LgksGenerator, rho0, t_grid, propagator=None, tol: Tolerances | None = None):
    """rho(t) = exp(L t) rho0 under a fixed generator.

    ``propagator`` maps interaction-picture states back to the lab frame via
    rho -> U(t) rho U(t)^+.
    """
    tol = tol or default_tolerances()
    t = _check_grid(t_grid)
    sup = gen.superoperator()
    v0 = vectorize(np.asarray(rho0, dtype=complex))
    out = []
    for tk in t:
        rho = devectorize(matrix_exp(sup, tk) @ v0)
        out.append(_finish(_to_frame(rho, tk, propagator), tk, tol, gen.scheme))
    return out


def solve_dcg(builder, rho0, t_grid, propagator=None, workers=1, tol: Tolerances | None = None):
    """Dynamical coarse-graining: rho(t) = exp(L_{tau=t} t) rho0 for each t.

    ``builder`` maps tau to an LgksGenerator with t0 = 0.  Points are
    independent and may be evaluated by a thread pool.
    """
    tol = tol or default_tolerances()
    t = _check_grid(t_grid)
    rho0 = np.asarray(rho0, dtype=complex)
    v0 = vectorize(rho0)

    def point(tk):
        if tk == 0:
            rho = rho0.copy()
        else:
            gen = builder(tk)
            rho = devectorize(matrix_exp(gen.superoperator(), tk) @ v0)
        return _finish(_to_frame(rho, tk, propagator), tk, tol, "dcg")

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, t))
    return [point(tk) for tk in t]
