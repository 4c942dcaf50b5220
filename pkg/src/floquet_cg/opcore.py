"""2x2 operator algebra, column-stacked superoperators and special functions.

All operators are plain ``numpy`` arrays.  Vectorization is column-stacking
throughout the package, so that ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.special

from .config import ConsistencyError, InvalidInputError, Tolerances, default_tolerances

IDENTITY = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
# raising operator in the sigma^z = diag(+1, -1) basis
SP = np.array([[0, 1], [0, 0]], dtype=complex)
SM = np.array([[0, 0], [1, 0]], dtype=complex)

BESSEL_MAX_ORDER = 16
BESSEL_MAX_ARG = 50.0


def dag(op):
    return np.conj(np.swapaxes(op, -1, -2))


def is_hermitian(op, tol=1e-12) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - dag(op)), initial=0.0) <= tol)


def is_unitary(op, tol=1e-9) -> bool:
    op = np.asarray(op)
    eye = np.eye(op.shape[-1])
    return bool(np.max(np.abs(dag(op) @ op - eye)) <= tol)


def vectorize(op):
    """Column-stack a square matrix into a vector."""
    return np.asarray(op).reshape(-1, order="F")


def devectorize(vec, dim=None):
    vec = np.asarray(vec)
    if dim is None:
        dim = int(round(np.sqrt(vec.size)))
    return vec.reshape((dim, dim), order="F")


def spre(op):
    """Superoperator of left multiplication, X -> op X."""
    return np.kron(np.eye(op.shape[0]), op)


def spost(op):
    """Superoperator of right multiplication, X -> X op."""
    return np.kron(op.T, np.eye(op.shape[0]))


def commutator_superop(ham):
    """Superoperator of X -> -i [ham, X]."""
    return -1j * (spre(ham) - spost(ham))


def matrix_exp(mat, s=1.0):
    """Return ``exp(s * mat)``.

    Backed by scipy's scaling-and-squaring Pade implementation; only the input
    validation and the exact ``s == 0`` shortcut live here.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidInputError(f"matrix_exp expects a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)) or not np.isfinite(s):
        raise InvalidInputError("matrix_exp received non-finite entries")
    if s == 0:
        return np.eye(mat.shape[0], dtype=complex)
    return scipy.linalg.expm(s * mat)


def expm_hermitian_2x2(ham, t):
    """exp(-i ham t) for a (stack of) 2x2 Hermitian matrices, in closed form.

    Writes ham = h0 + h.sigma so that the exponential is a rotation; this is
    used in the inner loop of the period propagator.
    """
    ham = np.asarray(ham, dtype=complex)
    h0 = 0.5 * (ham[..., 0, 0] + ham[..., 1, 1]).real
    hz = 0.5 * (ham[..., 0, 0] - ham[..., 1, 1]).real
    hx = ham[..., 1, 0].real
    hy = ham[..., 1, 0].imag
    norm = np.sqrt(hx * hx + hy * hy + hz * hz)
    phi = norm * t
    c = np.cos(phi)
    # sin(phi)/norm with the norm -> 0 limit handled
    s_over = np.where(norm > 0, np.sin(phi) / np.where(norm > 0, norm, 1.0), t)
    out = np.empty(ham.shape, dtype=complex)
    out[..., 0, 0] = c - 1j * s_over * hz
    out[..., 1, 1] = c + 1j * s_over * hz
    out[..., 0, 1] = -1j * s_over * (hx - 1j * hy)
    out[..., 1, 0] = -1j * s_over * (hx + 1j * hy)
    return out * np.exp(-1j * h0 * t)[..., None, None]


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x) for integer n.

    Restricted to |n| <= 16 and |x| <= 50, the range the models need; values
    come from scipy.special.jv.
    """
    if int(n) != n:
        raise InvalidInputError(f"Bessel order must be an integer, got {n}")
    n = int(n)
    if abs(n) > BESSEL_MAX_ORDER:
        raise InvalidInputError(f"Bessel order |n|={abs(n)} exceeds {BESSEL_MAX_ORDER}")
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)) or np.any(np.abs(x_arr) > BESSEL_MAX_ARG):
        raise InvalidInputError(f"Bessel argument outside |x| <= {BESSEL_MAX_ARG}")
    val = scipy.special.jv(abs(n), x_arr)
    if n < 0 and n % 2:
        val = -val
    return float(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# density matrices and Lindblad forms


def density_matrix(sx=0.0, sy=0.0, sz=0.0):
    """rho = (1 + sx X + sy Y + sz Z) / 2."""
    return 0.5 * (IDENTITY + sx * SX + sy * SY + sz * SZ)


def bloch_vector(rho):
    """(<X>, <Y>, <Z>) for a single state or a stack of states."""
    rho = np.asarray(rho)
    rho10 = rho[..., 1, 0]
    rho01 = rho[..., 0, 1]
    sx = (rho10 + rho01).real
    sy = (1j * (rho01 - rho10)).real
    sz = (rho[..., 0, 0] - rho[..., 1, 1]).real
    return np.stack([sx, sy, sz], axis=-1)


def check_density_matrix(rho, tol: Tolerances | None = None, what="state"):
    """Raise ConsistencyError unless rho is Hermitian, unit-trace and PSD."""
    tol = tol or default_tolerances()
    rho = np.asarray(rho)
    herm = np.max(np.abs(rho - dag(rho)))
    if herm > tol.hermitian:
        raise ConsistencyError(f"{what} not Hermitian (deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol.trace:
        raise ConsistencyError(f"{what} trace {tr.real:.15g} differs from 1")
    emin = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))[0]
    if emin < -tol.positivity:
        raise ConsistencyError(f"{what} has negative eigenvalue {emin:.3e}")
    return rho


def lgks_apply(kossakowski, jumps, rho, hamiltonian=None):
    """Apply -i[H, rho] + sum_jk K_jk (L_k rho L_j^+ - 1/2 {L_j^+ L_k, rho})."""
    kmat = np.atleast_2d(np.asarray(kossakowski, dtype=complex))
    jumps = [np.asarray(j, dtype=complex) for j in jumps]
    if kmat.shape != (len(jumps), len(jumps)):
        raise InvalidInputError(
            f"Kossakowski matrix shape {kmat.shape} does not match {len(jumps)} jump operators"
        )
    if np.max(np.abs(kmat - dag(kmat)), initial=0.0) > 1e-10:
        raise InvalidInputError("Kossakowski matrix is not Hermitian")
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    if hamiltonian is not None:
        out += -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for j, lj in enumerate(jumps):
        ljd = dag(lj)
        for k, lk in enumerate(jumps):
            if kmat[j, k] == 0:
                continue
            prod = ljd @ lk
            out += kmat[j, k] * (lk @ rho @ ljd - 0.5 * (prod @ rho + rho @ prod))
    return out


def lgks_superop(kossakowski, jumps, hamiltonian=None):
    """Column-stacked superoperator of :func:`lgks_apply`."""
    kmat = np.atleast_2d(np.asarray(kossakowski, dtype=complex))
    jumps = [np.asarray(j, dtype=complex) for j in jumps]
    if kmat.shape != (len(jumps), len(jumps)):
        raise InvalidInputError(
            f"Kossakowski matrix shape {kmat.shape} does not match {len(jumps)} jump operators"
        )
    dim = jumps[0].shape[0] if jumps else 2
    sup = np.zeros((dim * dim, dim * dim), dtype=complex)
    if hamiltonian is not None:
        sup += commutator_superop(np.asarray(hamiltonian, dtype=complex))
    for j, lj in enumerate(jumps):
        ljd = dag(lj)
        for k, lk in enumerate(jumps):
            if kmat[j, k] == 0:
                continue
            prod = ljd @ lk
            sup += kmat[j, k] * (np.kron(ljd.T, lk) - 0.5 * (spre(prod) + spost(prod)))
    return sup
