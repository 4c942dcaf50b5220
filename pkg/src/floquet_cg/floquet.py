"""Period propagation, Floquet decomposition and kick-operator harmonics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .config import AliasingError, DegenerateSpectrumError, InvalidInputError
from .opcore import dag, expm_hermitian_2x2, is_unitary

DEFAULT_STEPS = 4096
DEFAULT_NMAX = 8

# two-exponential commutator-free 4th order scheme on Gauss-Legendre nodes
_C1 = 0.5 - np.sqrt(3.0) / 6.0
_C2 = 0.5 + np.sqrt(3.0) / 6.0
_A1 = (3.0 - 2.0 * np.sqrt(3.0)) / 12.0
_A2 = (3.0 + 2.0 * np.sqrt(3.0)) / 12.0


@dataclass(frozen=True)
class DrivenHamiltonian:
    """T-periodic system Hamiltonian ``H_S(t)``.

    ``func`` maps a time (or an array of times) to a 2x2 matrix (or a stack
    of them).  Non-vectorized callables are accepted and looped over.
    """

    func: Callable
    period: float

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.period

    def __call__(self, t):
        return self.sample(t)

    def sample(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return np.asarray(self.func(float(t)), dtype=complex)
        out = np.asarray(self.func(t), dtype=complex)
        if out.shape != t.shape + (2, 2):
            out = np.array([self.func(float(tk)) for tk in t.ravel()], dtype=complex)
            out = out.reshape(t.shape + (2, 2))
        return out


def fold_quasienergy(energy, omega):
    """Map energies into the first Brillouin zone [-omega/2, omega/2)."""
    energy = np.asarray(energy, dtype=float)
    folded = energy - omega * np.floor((energy + 0.5 * omega) / omega)
    # guard the upper edge against rounding
    folded = np.where(folded >= 0.5 * omega, folded - omega, folded)
    return folded


def _cf4_steps(ham: DrivenHamiltonian, t0, h):
    """Single-step propagators from t0 to t0 + h (arrays of start times)."""
    t0 = np.asarray(t0, dtype=float)
    h1 = ham.sample(t0 + _C1 * h)
    h2 = ham.sample(t0 + _C2 * h)
    for sample in (h1, h2):
        herm = np.max(np.abs(sample - dag(sample)))
        if herm > 1e-12 * max(1.0, np.max(np.abs(sample))):
            raise InvalidInputError(f"driven Hamiltonian is not Hermitian (deviation {herm:.3e})")
    first = expm_hermitian_2x2(_A2 * h1 + _A1 * h2, h)
    second = expm_hermitian_2x2(_A1 * h1 + _A2 * h2, h)
    return second @ first


def propagate_period(ham: DrivenHamiltonian, steps: int = DEFAULT_STEPS):
    """Propagators ``U_S(t_k)`` on ``t_k = k T / steps`` for k = 0..steps.

    The last element is ``U_S(T)``.
    """
    steps = int(steps)
    if steps < 64 or steps & (steps - 1):
        raise InvalidInputError(f"steps must be a power of two >= 64, got {steps}")
    h = ham.period / steps
    starts = np.arange(steps) * h
    step_ops = _cf4_steps(ham, starts, h)
    grid = np.empty((steps + 1, 2, 2), dtype=complex)
    grid[0] = np.eye(2)
    for k in range(steps):
        grid[k + 1] = step_ops[k] @ grid[k]
    return grid


def propagate_to(ham: DrivenHamiltonian, t, max_step):
    """U_S(t) from 0 by CF4 stepping with step size at most ``max_step``."""
    nsteps = max(1, int(np.ceil(abs(t) / max_step)))
    h = t / nsteps
    step_ops = _cf4_steps(ham, np.arange(nsteps) * h, h)
    u = np.eye(2, dtype=complex)
    for op in step_ops:
        u = op @ u
    return u


def _phase_fix(vectors):
    vectors = np.array(vectors, dtype=complex)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        k = int(np.argmax(np.abs(col)))
        vectors[:, j] = col * np.exp(-1j * np.angle(col[k]))
    return vectors


@dataclass(frozen=True)
class FloquetData:
    """Floquet decomposition ``U_S(t) = U_kick(t) exp(-i Hbar t)``.

    ``vectors`` holds the Floquet states as columns, ordered with ascending
    quasienergy.  ``kick_samples`` live on ``kick_times = k T / N``.
    ``kick_fn`` evaluates the kick operator at arbitrary times.
    """

    quasienergies: np.ndarray
    vectors: np.ndarray
    omega: float
    kick_times: np.ndarray
    kick_samples: np.ndarray
    kick_fn: Callable | None = field(default=None, compare=False)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @property
    def hbar(self):
        v = self.vectors
        return v @ np.diag(self.quasienergies) @ dag(v)

    def evolve_hbar(self, t):
        """exp(-i Hbar t)."""
        v = self.vectors
        return v @ np.diag(np.exp(-1j * self.quasienergies * t)) @ dag(v)

    def kick(self, t):
        if self.kick_fn is not None:
            return np.asarray(self.kick_fn(t), dtype=complex)
        # exact only on the sample grid
        n = len(self.kick_times)
        k = (t / self.period) * n
        kr = int(round(k))
        if abs(k - kr) > 1e-9 * max(1.0, abs(k)):
            raise InvalidInputError("kick requested off the sample grid and no kick_fn is set")
        return self.kick_samples[kr % n]

    def propagator(self, t):
        return self.kick(t) @ self.evolve_hbar(t)

    def gauge_shift(self, index: int, m: int) -> "FloquetData":
        """Shift one quasienergy by ``m * omega`` and compensate the kick.

        The result generally leaves the first Brillouin zone; it exists to
        check gauge invariance of derived quantities.
        """
        energies = np.array(self.quasienergies, dtype=float)
        energies[index] += m * self.omega
        proj = np.outer(self.vectors[:, index], np.conj(self.vectors[:, index]))

        def phase(t):
            return np.eye(2) + (np.exp(1j * m * self.omega * t) - 1.0) * proj

        samples = np.array([k @ phase(t) for k, t in zip(self.kick_samples, self.kick_times)])
        base = self.kick_fn
        kick_fn = None if base is None else (lambda t: base(t) @ phase(t))
        return FloquetData(energies, self.vectors, self.omega, self.kick_times, samples, kick_fn)


def _check_nondegenerate(energies, omega, tol):
    d = abs(energies[0] - energies[1]) % omega
    if min(d, omega - d) < tol * omega:
        raise DegenerateSpectrumError(
            f"quasienergies {energies[0]:.12g} and {energies[1]:.12g} coincide modulo omega"
        )


def floquet_decompose(u_grid, omega, kick_fn=None, degeneracy_tol=1e-10) -> FloquetData:
    """Floquet data from propagators on an equidistant grid over [0, T].

    ``u_grid`` has N+1 entries with the last one equal to U_S(T).
    """
    u_grid = np.asarray(u_grid, dtype=complex)
    if u_grid.ndim != 3 or u_grid.shape[1:] != (2, 2) or len(u_grid) < 3:
        raise InvalidInputError("u_grid must be a stack of at least three 2x2 propagators")
    period = 2.0 * np.pi / omega
    n = len(u_grid) - 1
    u_t = u_grid[-1]
    tri, z = scipy.linalg.schur(u_t, output="complex")
    eig = np.diag(tri)
    energies = fold_quasienergy(-np.angle(eig) / period, omega)
    _check_nondegenerate(energies, omega, degeneracy_tol)
    order = np.argsort(energies)
    energies = energies[order]
    vectors = _phase_fix(z[:, order])
    times = np.arange(n) * period / n
    back = np.einsum(
        "ij,kj,lj->kil", vectors, np.exp(1j * np.outer(times, energies)), np.conj(vectors)
    )
    samples = u_grid[:n] @ back
    return FloquetData(energies, vectors, float(omega), times, samples, kick_fn)


def floquet_from_hamiltonian(ham: DrivenHamiltonian, steps: int = DEFAULT_STEPS) -> FloquetData:
    """Numerically propagate one period and decompose.

    The attached ``kick_fn`` re-propagates from the nearest grid point, so
    the kick is available at arbitrary times with the grid's accuracy.
    """
    grid = propagate_period(ham, steps)
    omega = ham.omega
    period = ham.period
    h = period / steps
    holder = {}

    def kick_fn(t):
        fd = holder["fd"]
        cycles = np.floor(t / period)
        tau = t - cycles * period
        k = min(int(tau // h), steps - 1)
        rest = tau - k * h
        u_k = grid[k]
        if rest > 0:
            shifted = DrivenHamiltonian(lambda s: ham.sample(np.asarray(s) + k * h), period)
            u_k = propagate_to(shifted, rest, h) @ u_k
        # U_S(tau) exp(+i Hbar tau) is the periodic kick
        return u_k @ fd.evolve_hbar(-tau)

    fd = floquet_decompose(grid, omega, kick_fn=kick_fn)
    holder["fd"] = fd
    return fd


def floquet_from_pair(hbar, kick_fn, omega, samples: int = 256, degeneracy_tol=1e-10) -> FloquetData:
    """Floquet data from an analytic (Floquet Hamiltonian, kick) pair.

    Quasienergies are folded into the first Brillouin zone and the kick is
    compensated accordingly, so that ``kick(t) exp(-i Hbar t)`` is unchanged.
    """
    hbar = np.asarray(hbar, dtype=complex)
    raw, vecs = np.linalg.eigh(0.5 * (hbar + dag(hbar)))
    folded = fold_quasienergy(raw, omega)
    shifts = np.rint((folded - raw) / omega).astype(int)
    order = np.argsort(folded)
    folded, shifts = folded[order], shifts[order]
    vecs = _phase_fix(vecs[:, order])
    _check_nondegenerate(folded, omega, degeneracy_tol)
    projs = [np.outer(vecs[:, a], np.conj(vecs[:, a])) for a in range(2)]

    def folded_kick(t):
        comp = sum(np.exp(1j * shifts[a] * omega * t) * projs[a] for a in range(2))
        return np.asarray(kick_fn(t), dtype=complex) @ comp

    period = 2.0 * np.pi / omega
    times = np.arange(samples) * period / samples
    kicks = np.array([folded_kick(t) for t in times])
    return FloquetData(folded, vecs, float(omega), times, kicks, folded_kick)


@dataclass(frozen=True)
class CouplingHarmonics:
    """Fourier components ``tensor[alpha, n + n_max, a, b] = <a|A_alpha^n|b>``.

    Matrix elements refer to the Floquet basis of the FloquetData they were
    computed from.
    """

    tensor: np.ndarray
    n_max: int

    @property
    def orders(self):
        return np.arange(-self.n_max, self.n_max + 1)

    @property
    def n_ops(self) -> int:
        return self.tensor.shape[0]

    def get(self, alpha: int, n: int):
        if abs(n) > self.n_max:
            return np.zeros((2, 2), dtype=complex)
        return self.tensor[alpha, n + self.n_max]

    def truncated(self, n_max: int) -> "CouplingHarmonics":
        if n_max > self.n_max:
            raise InvalidInputError(f"cannot extend harmonics from {self.n_max} to {n_max}")
        lo = self.n_max - n_max
        return CouplingHarmonics(self.tensor[:, lo : lo + 2 * n_max + 1].copy(), n_max)


def fourier_harmonics(a_ops, fd: FloquetData, n_max: int = DEFAULT_NMAX) -> CouplingHarmonics:
    """Discrete Fourier coefficients of ``U_kick^+ A U_kick`` in the Floquet basis."""
    n_max = int(n_max)
    if n_max < 1:
        raise InvalidInputError(f"n_max must be >= 1, got {n_max}")
    samples = np.asarray(fd.kick_samples)
    nsamp = len(samples)
    if nsamp < 8 * n_max:
        raise AliasingError(f"{nsamp} kick samples cannot resolve harmonics up to n_max={n_max}")
    v = fd.vectors
    tensor = np.empty((len(a_ops), 2 * n_max + 1, 2, 2), dtype=complex)
    orders = np.arange(-n_max, n_max + 1)
    for alpha, op in enumerate(a_ops):
        op = np.asarray(op, dtype=complex)
        rotated = dag(v) @ dag(samples) @ op @ samples @ v
        spec = np.fft.fft(rotated, axis=0) / nsamp
        tensor[alpha] = spec[orders % nsamp]
    return CouplingHarmonics(tensor, n_max)


def harmonics_reconstruct(ch: CouplingHarmonics, alpha: int, omega: float, t):
    """sum_n A^n exp(i n omega t), in the Floquet basis."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    phases = np.exp(1j * np.outer(t, ch.orders) * omega)
    return np.einsum("tn,nab->tab", phases, ch.tensor[alpha])


def check_kick_samples(fd: FloquetData, tol=1e-9):
    if not np.allclose(fd.kick_samples[0], np.eye(2), atol=tol):
        raise InvalidInputError("kick operator at t=0 differs from identity")
    for k in fd.kick_samples:
        if not is_unitary(k, tol):
            raise InvalidInputError("kick sample is not unitary")
