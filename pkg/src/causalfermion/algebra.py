"""Exact 2x2 / 4x4 spinor-matrix machinery.

Conventions (natural units, c = hbar = 1):
  * Pauli matrices sigma_1..3, sigma_0 = I2.
  * Weyl representation of the Dirac matrices:
        beta = [[0, I2], [I2, 0]],  alpha_k = [[sigma_k, 0], [0, -sigma_k]].
  * Minkowski product a.b = a0 b0 - a1 b1 - a2 b2 - a3 b3 on length-4 arrays.
  * A boost with rapidity rho along the unit vector e is represented in
    SL(2,C) by A = exp(rho/2 * sum_k e_k sigma_k); along e3 this is
    A_rho = diag(exp(rho/2), exp(-rho/2)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NotLightlike,
    NotTimelike,
    NotUnimodular,
    ZeroMomentum,
    ZeroMomentumMassless,
)

HERMITIAN_TOL = 1e-14
UNITARY_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

BETA = np.block([[np.zeros((2, 2)), I2], [I2, np.zeros((2, 2))]]).astype(complex)
ALPHA = np.array(
    [np.block([[SIGMA[k], np.zeros((2, 2))], [np.zeros((2, 2)), -SIGMA[k]]]) for k in range(3)]
).astype(complex)
GAMMA5 = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) <= tol)


def minkowski_square(k: np.ndarray) -> float:
    k = np.asarray(k, dtype=float)
    return float(k[0] ** 2 - k[1] ** 2 - k[2] ** 2 - k[3] ** 2)


def sinc(w):
    """sin(w)/w with a short even series below |w| = 1e-4."""
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-4
    safe = np.where(small, 1.0, w)
    out = np.where(small, 1.0 - w * w / 6.0 + w**4 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def energy(p, m: float):
    """eps(p) = sqrt(|p|^2 + m^2); p is a 3-vector or an array of |p| values."""
    p = np.asarray(p, dtype=float)
    p2 = np.sum(p * p) if p.shape == (3,) else p * p
    return np.sqrt(p2 + m * m)


def dirac_hamiltonian(p, m: float) -> np.ndarray:
    """h(p) = sum_k alpha_k p_k + beta m; Hermitian, h(p)^2 = eps(p)^2 I4."""
    if m < 0:
        raise ValueError("mass must be >= 0")
    p = np.asarray(p, dtype=float)
    return np.einsum("k,kij->ij", p, ALPHA) + m * BETA


def weyl_hamiltonian(p, chi: int) -> np.ndarray:
    """h^chi(p) = chi * sigma . p; Hermitian, h^chi(p)^2 = |p|^2 I2."""
    p = np.asarray(p, dtype=float)
    return chi * np.einsum("k,kij->ij", p, SIGMA)


def dirac_projector(p, m: float, eta: int) -> np.ndarray:
    """Energy projector pi^eta(p) = (I4 + (eta/eps) h(p)) / 2."""
    p = np.asarray(p, dtype=float)
    eps = energy(p, m)
    if eps == 0.0:
        raise ZeroMomentumMassless("projector singular at p = 0 for m = 0")
    return 0.5 * (I4 + (eta / eps) * dirac_hamiltonian(p, m))


def weyl_projector(p, chi: int, eta: int) -> np.ndarray:
    """pi^{chi eta}(p) = (I2 + (eta/|p|) h^chi(p)) / 2; dilation invariant."""
    p = np.asarray(p, dtype=float)
    ap = float(np.linalg.norm(p))
    if ap == 0.0:
        raise ZeroMomentumMassless("massless projector singular at p = 0")
    return 0.5 * (I2 + (eta / ap) * weyl_hamiltonian(p, chi))


def energy_projector(p, eta: int, *, kind: str = "dirac", m: float = 1.0, chi: int = +1) -> np.ndarray:
    if kind == "dirac":
        return dirac_projector(p, m, eta)
    if kind == "weyl":
        return weyl_projector(p, chi, eta)
    raise ValueError(f"unknown kind {kind!r}")


def canonical_cross_section(k) -> np.ndarray:
    """Positive 2x2 matrix Q(k) with Q(k).(eta m,0,0,0) = k for timelike k.

    Q(k) = sqrt(m / (2(m+|k0|))) (I2 + (eta/m) sum_j k_j sigma_j), sigma_0 = I2,
    with m = sqrt(k.k) and eta = sgn(k0).  Q(k)^2 = (eta/m) sum_j k_j sigma_j.
    """
    k = np.asarray(k, dtype=float)
    ksq = minkowski_square(k)
    if ksq <= 0.0:
        raise NotTimelike(f"k.k = {ksq} is not positive")
    m = np.sqrt(ksq)
    eta = 1.0 if k[0] >= 0 else -1.0
    ksig = k[0] * I2 + np.einsum("k,kij->ij", k[1:], SIGMA)
    return np.sqrt(m / (2.0 * (m + abs(k[0])))) * (I2 + (eta / m) * ksig)


def helicity_cross_section(p) -> np.ndarray:
    """B(p) in SU(2) with |p| B(p).e3 = p; B(lambda p) = B(p) for lambda > 0.

    Entries a_pm = sqrt((|p| +- p3) / (2|p|)) and b = (p1 + i p2)/|p1 + i p2|;
    for p on the positive/negative 3-axis B is I2 / -i sigma_2.
    """
    p = np.asarray(p, dtype=float)
    ap = float(np.linalg.norm(p))
    if ap == 0.0:
        raise ZeroMomentum("helicity cross section undefined at p = 0")
    if p[0] == 0.0 and p[1] == 0.0:
        return I2.copy() if p[2] > 0 else (-1j * SIGMA[1])
    a_plus = np.sqrt((ap + p[2]) / (2.0 * ap))
    a_minus = np.sqrt((ap - p[2]) / (2.0 * ap))
    b = (p[0] + 1j * p[1]) / abs(p[0] + 1j * p[1])
    return np.array([[a_plus, -np.conj(b) * a_minus], [b * a_minus, a_plus]], dtype=complex)


def boost_matrix(rho: float, e=(0.0, 0.0, 1.0)) -> np.ndarray:
    """A_{rho e} = exp(rho/2 sum_k e_k sigma_k) for a unit 3-vector e."""
    e = np.asarray(e, dtype=float)
    n = np.einsum("k,kij->ij", e, SIGMA)
    return np.cosh(rho / 2.0) * I2 + np.sinh(rho / 2.0) * n


def lorentz_action(a: np.ndarray, k) -> np.ndarray:
    """Four-vector action A.k defined by A (sum k_mu sigma_mu) A^* = sum (A.k)_mu sigma_mu."""
    k = np.asarray(k, dtype=float)
    x = k[0] * I2 + np.einsum("k,kij->ij", k[1:], SIGMA)
    y = a @ x @ a.conj().T
    out = np.empty(4)
    out[0] = 0.5 * np.real(np.trace(y))
    for j in range(3):
        out[j + 1] = 0.5 * np.real(np.trace(SIGMA[j] @ y))
    return out


def polar_decompose_sl2(a: np.ndarray, tol: float = UNITARY_TOL):
    """Split A in SL(2,C) as B' A_rho B with B', B in SU(2) and A_rho = diag(e^{rho/2}, e^{-rho/2}).

    Obtained from the eigen-decomposition of A^* A; rho = 2 log of the larger
    singular value.  rho = 0 (A already unitary) short-circuits to (A, 0, I2).
    """
    a = np.asarray(a, dtype=complex)
    if abs(np.linalg.det(a) - 1.0) > 1e-12:
        raise NotUnimodular(f"det A = {np.linalg.det(a)}")
    w, v = np.linalg.eigh(a.conj().T @ a)
    # eigh sorts ascending; want the larger singular value first
    w = w[::-1]
    v = v[:, ::-1]
    rho = float(np.log(w[0]))  # w[0] = e^{rho}, the square of the larger singular value
    if abs(rho) <= tol:
        return a.copy(), 0.0, I2.copy()
    det = np.linalg.det(v)
    v = v @ np.diag([1.0, 1.0 / det])
    b = v.conj().T
    a_rho = np.diag([np.exp(rho / 2.0), np.exp(-rho / 2.0)]).astype(complex)
    b_prime = a @ np.linalg.inv(a_rho @ b)
    return b_prime, rho, b


def wigner_rotation_massive(p, m: float, eta: int, rho: float) -> np.ndarray:
    """Wigner rotation R(p^eta, A_rho) for the boost A_rho along e3, m > 0.

    R = d(eta p)^{-1/2} [[g(m+eps) - d eta p3, d eta (p1 - i p2)],
                         [-d eta (p1 + i p2), g(m+eps) - d eta p3]]
    with g = cosh(rho/2), d = sinh(rho/2), and the normalizer
    d(p) = (m+eps)(m + cosh(rho) eps - sinh(rho) p3).
    """
    if m <= 0:
        raise ValueError("massive Wigner rotation needs m > 0")
    p = np.asarray(p, dtype=float)
    eps = float(energy(p, m))
    g = np.cosh(rho / 2.0)
    d = np.sinh(rho / 2.0)
    norm = (m + eps) * (m + np.cosh(rho) * eps - np.sinh(rho) * eta * p[2])
    diag = g * (m + eps) - d * eta * p[2]
    off = d * eta * (p[0] - 1j * p[1])
    return np.array([[diag, off], [-np.conj(off), diag]], dtype=complex) / np.sqrt(norm)


def _massless_wigner_boost(p4: np.ndarray, rho: float) -> np.ndarray:
    """Closed form R0(p, A_rho) for lightlike p, boost along e3."""
    eta = 1.0 if p4[0] > 0 else -1.0
    p = p4[1:]
    ap = float(np.linalg.norm(p))
    g = np.cosh(rho / 2.0)
    d = np.sinh(rho / 2.0)
    norm = ap * (np.cosh(rho) * ap - np.sinh(rho) * eta * p[2])
    diag = g * ap - d * eta * p[2]
    off = d * eta * (p[0] - 1j * p[1])
    return np.array([[diag, off], [-np.conj(off), diag]], dtype=complex) / np.sqrt(norm)


def wigner_rotation_massless(p4, a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """R0(p, A) = B' B(B'^{-1}.p) B(B.q)^{-1} B for lightlike p, A = B' A_rho B.

    q = A^{-1}.p; R0 is in SU(2), dilation invariant in p, and satisfies the
    cocycle R0(p, A) R0(q, A') = R0(p, A A').  For A in SU(2), R0 = A.
    """
    p4 = np.asarray(p4, dtype=float)
    if np.linalg.norm(p4[1:]) == 0.0 or abs(minkowski_square(p4)) > tol * float(np.dot(p4, p4)):
        raise NotLightlike(f"p.p = {minkowski_square(p4)} for p = {p4}")
    b_prime, rho, b = polar_decompose_sl2(np.asarray(a, dtype=complex))
    if rho == 0.0:
        return np.asarray(a, dtype=complex).copy()
    p_mid = lorentz_action(np.linalg.inv(b_prime), p4)
    q_mid = lorentz_action(boost_matrix(-rho), p_mid)
    bp = helicity_cross_section(p_mid[1:])
    bq = helicity_cross_section(q_mid[1:])
    return b_prime @ bp @ np.linalg.inv(bq) @ b


def boost_spinor_rep(a: np.ndarray, kind: str = "dirac", chi: int = +1) -> np.ndarray:
    """s(A) = diag(A, A^{*-1}) on Dirac spinors; s^+(A) = A, s^-(A) = A^{*-1} on Weyl."""
    a = np.asarray(a, dtype=complex)
    if abs(np.linalg.det(a) - 1.0) > UNITARY_TOL:
        raise NotUnimodular(f"det A = {np.linalg.det(a)}")
    a_star_inv = np.linalg.inv(a.conj().T)
    if kind == "dirac":
        out = np.zeros((4, 4), dtype=complex)
        out[:2, :2] = a
        out[2:, 2:] = a_star_inv
        return out
    if kind == "weyl":
        return a.copy() if chi == +1 else a_star_inv
    raise ValueError(f"unknown kind {kind!r}")


def time_reversal_matrix(kind: str = "dirac") -> np.ndarray:
    """Matrix omega with T psi = omega conj(psi): -diag(sigma2, sigma2) / -sigma2."""
    if kind == "dirac":
        out = np.zeros((4, 4), dtype=complex)
        out[:2, :2] = -SIGMA[1]
        out[2:, 2:] = -SIGMA[1]
        return out
    if kind == "weyl":
        return -SIGMA[1].copy()
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class Dirac:
    """Dirac system of mass m > 0 (m = 0 allowed; it splits into the two Weyl systems)."""

    m: float = 1.0

    components = 4
    kind = "dirac"

    def hamiltonian(self, p) -> np.ndarray:
        return dirac_hamiltonian(p, self.m)

    def energy(self, p):
        return energy(p, self.m)

    def projector(self, p, eta: int) -> np.ndarray:
        return dirac_projector(p, self.m, eta)

    def boost_rep(self, a: np.ndarray) -> np.ndarray:
        return boost_spinor_rep(a, "dirac")

    def time_reversal(self) -> np.ndarray:
        return time_reversal_matrix("dirac")


@dataclass(frozen=True)
class Weyl:
    """Weyl system of chirality chi in {+1, -1}."""

    chi: int = +1

    components = 2
    kind = "weyl"
    m = 0.0

    def hamiltonian(self, p) -> np.ndarray:
        return weyl_hamiltonian(p, self.chi)

    def energy(self, p):
        return energy(p, 0.0)

    def projector(self, p, eta: int) -> np.ndarray:
        return weyl_projector(p, self.chi, eta)

    def boost_rep(self, a: np.ndarray) -> np.ndarray:
        return boost_spinor_rep(a, "weyl", self.chi)

    def time_reversal(self) -> np.ndarray:
        return time_reversal_matrix("weyl")
