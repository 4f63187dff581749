"""Causal positive-operator localization T(Delta) = P+ E(Delta) P+ and its statistics.

Everything diagonal in momentum (pi^+, dilations, H) is applied there; E(Delta)
routes through an FFT pair.  Two engines coexist:

  * 3D grid fields for generic states and measurement cascades;
  * a radial reduction for the point-localization sequences, whose momentum
    support grows linearly with the dilation index n and leaves any fixed
    3D grid long before n = 64.

The radial engine closes on states of the form

    phi(p) = s(|p|) + (alpha . p^) v(|p|)        (Dirac, s, v : C^4 valued)
    phi(p) = s(|p|) + (sigma . p^) v(|p|)        (Weyl,  s, v : C^2 valued)

because pi^eta(p), pi_0(p), h(p), dilations and radial masks mix only (s, v);
position representation uses the order-0/1 spherical Bessel transforms.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import algebra as al
from .errors import (
    DegenerateState,
    DomainViolation,
    NotInRange,
    NotPositiveEnergy,
    NullDilationLimit,
)
from .field import Grid, RegionMask, SpinorField
from .weylradial import cumulative_simpson, simpson_weights

_CHUNK = 256


# --- 3D grid engine -----------------------------------------------------------


def _projector_apply(field: SpinorField, eta: int) -> np.ndarray:
    """pi^eta(p) phi on the momentum grid.

    The p = 0 cell of a massless system is spectrally ambiguous; h(0) = 0
    leaves it at the projector average 1/2, keeping P+ + P- = I exact.
    """
    g = field.grid
    s = field.system
    mesh = g.momentum_mesh()
    pmag = np.sqrt(sum(m**2 for m in mesh))
    eps = np.sqrt(pmag**2 + s.m**2)
    hphi = _h_apply(field, field.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(eps > 0, 1.0 / np.where(eps > 0, eps, 1.0), 0.0)
    return 0.5 * (field.values + eta * inv[..., None] * hphi)


def _h_apply(field: SpinorField, vals: np.ndarray) -> np.ndarray:
    g = field.grid
    s = field.system
    mesh = g.momentum_mesh()
    mats = al.ALPHA if s.kind == "dirac" else al.SIGMA
    out = np.zeros_like(vals)
    for k in range(g.dim):
        axis = k if g.dim == 3 else 2
        pk = mesh[k][..., None] if g.dim == 3 else mesh[0][..., None]
        out += pk * np.einsum("ij,...j->...i", mats[axis], vals)
    if s.kind == "dirac":
        out += s.m * np.einsum("ij,...j->...i", al.BETA, vals)
        return out
    return s.chi * out


def positive_energy_project(field: SpinorField, eta: int = +1) -> SpinorField:
    """P^eta phi in momentum representation; idempotent, commutes with e^{ith}."""
    if field.rep != "momentum":
        raise ValueError("positive_energy_project acts in momentum representation")
    return replace(field, values=_projector_apply(field, eta))


def pol_apply(field: SpinorField, mask: RegionMask, tol: float = 1e-10) -> SpinorField:
    """T(Delta) phi = P+ E(Delta) phi for a positive-energy momentum-rep state."""
    if field.rep != "momentum":
        raise ValueError("pol_apply acts in momentum representation")
    proj = positive_energy_project(field)
    if (field - proj).norm() > tol * max(field.norm(), 1.0):
        raise NotPositiveEnergy("state is not in the positive-energy subspace")
    masked = field.to_position().apply_mask(mask).to_momentum()
    return positive_energy_project(masked)


def random_positive_state(
    grid: Grid,
    system,
    seed: int,
    p_center: float = 1.2,
    p_width: float = 0.6,
) -> SpinorField:
    """Gaussian momentum envelope times a random spinor, P+-projected, normalized."""
    rng = np.random.default_rng(seed)
    mesh = grid.momentum_mesh()
    pmag = np.sqrt(sum(m**2 for m in mesh))
    env = np.exp(-0.5 * ((pmag - p_center) / p_width) ** 2)
    d = system.components
    spin = rng.normal(size=d) + 1j * rng.normal(size=d)
    phase = np.exp(1j * rng.normal(size=env.shape))
    vals = (env * phase)[..., None] * spin
    phi = SpinorField(grid, system, "momentum", vals.astype(complex))
    return positive_energy_project(phi).normalized()


@dataclass(frozen=True)
class CascadeStats:
    """Moments and probabilities of the repeated position measurement."""

    gamma: np.ndarray  # gamma_k = <phi1, T(Delta)^k phi1>, k = 0..2N-1
    omega: np.ndarray  # omega_n = gamma_{2n-1}/gamma_{2n-2}
    sigma: np.ndarray  # sigma_n = gamma_{2n-2}
    sigma2: float  # ||T(Delta) phi1||^2
    sigma2_prime: float  # ||T(Delta') phi1||^2
    sigma2_bar: float  # ||(I-P) E(Delta) phi1||^2
    sigma2_bar_prime: float  # ||(I-P) E(Delta') phi1||^2


def measurement_cascade(field: SpinorField, mask: RegionMask, depth: int = 12) -> CascadeStats:
    """Iterated T(Delta) moments; depth caps the error accumulation at ~k FFT roundoffs."""
    if field.rep != "momentum":
        raise ValueError("measurement_cascade acts in momentum representation")
    depth = min(depth, 12)
    chain = field.copy()
    gamma = [1.0]
    for _ in range(2 * depth - 1):
        chain = pol_apply(chain, mask, tol=np.inf)
        gamma.append(float(np.real(field.inner(chain))))
    gamma = np.array(gamma)
    if gamma[1] <= 0.0:
        raise DegenerateState("T(Delta) phi1 = 0")
    omega = gamma[1::2] / gamma[0:-1:2]
    sigma = gamma[0:-1:2]
    t_phi = pol_apply(field, mask, tol=np.inf)
    t_phi_c = pol_apply(field, ~mask, tol=np.inf)
    e_phi = field.to_position().apply_mask(mask).to_momentum()
    e_phi_c = field.to_position().apply_mask(~mask).to_momentum()
    neg = e_phi - positive_energy_project(e_phi)
    neg_c = e_phi_c - positive_energy_project(e_phi_c)
    return CascadeStats(
        gamma=gamma,
        omega=omega,
        sigma=sigma,
        sigma2=t_phi.norm_sq(),
        sigma2_prime=t_phi_c.norm_sq(),
        sigma2_bar=neg.norm_sq(),
        sigma2_bar_prime=neg_c.norm_sq(),
    )


# --- radial engine ------------------------------------------------------------


@dataclass
class RadialSpinorState:
    """State s(k) + (alpha.p^) v(k) on a radial momentum grid (Dirac or Weyl).

    In position representation the same pair means S(r) + i (alpha.x^) V(r);
    the transforms between the two are the order-0/1 spherical Bessel
    quadratures, unitary on L^2(r^2 dr).
    """

    k: np.ndarray  # radial momentum nodes, uniform from 0
    s: np.ndarray  # (n, d)
    v: np.ndarray  # (n, d)
    system: object  # al.Dirac or al.Weyl
    rep: str = "momentum"

    @property
    def dk(self) -> float:
        return float(self.k[1] - self.k[0])

    def copy(self) -> "RadialSpinorState":
        return RadialSpinorState(self.k, self.s.copy(), self.v.copy(), self.system, self.rep)

    def norm_sq(self) -> float:
        w = simpson_weights(self.k.size, self.dk)
        dens = np.sum(np.abs(self.s) ** 2 + np.abs(self.v) ** 2, axis=1)
        return float(4.0 * np.pi * np.sum(w * self.k**2 * dens))

    def normalized(self) -> "RadialSpinorState":
        n = np.sqrt(self.norm_sq())
        return RadialSpinorState(self.k, self.s / n, self.v / n, self.system, self.rep)

    def _beta(self, x: np.ndarray) -> np.ndarray:
        if self.system.kind != "dirac":
            return np.zeros_like(x)
        return np.einsum("ij,nj->ni", al.BETA, x)

    def apply_projector(self, eta: int) -> "RadialSpinorState":
        """pi^eta(k): [s, v] -> [(s + (m/e) beta s + (k/e) v)/2, ((k/e) s + v - (m/e) beta v)/2]."""
        if self.rep != "momentum":
            raise ValueError("projector acts in momentum representation")
        sy = self.system
        chi = getattr(sy, "chi", +1)
        m = sy.m
        eps = np.sqrt(self.k**2 + m * m)
        eps[eps == 0.0] = np.inf  # k = 0 node of a massless system: weight 1/2
        ke = (self.k / eps)[:, None] * (chi if sy.kind == "weyl" else 1.0)
        me = (m / eps)[:, None]
        s_new = 0.5 * (self.s + eta * (me * self._beta(self.s) + ke * self.v))
        v_new = 0.5 * (self.v + eta * (ke * self.s - me * self._beta(self.v)))
        return RadialSpinorState(self.k, s_new, v_new, sy, self.rep)

    def apply_dilation_limit_projector(self) -> "RadialSpinorState":
        """pi_0(k) = (I + alpha.p^)/2: [s, v] -> [(s+v)/2, (s+v)/2]."""
        if self.rep != "momentum":
            raise ValueError("pi_0 acts in momentum representation")
        half = 0.5 * (self.s + self.v)
        return RadialSpinorState(self.k, half.copy(), half.copy(), self.system, self.rep)

    def apply_h(self) -> "RadialSpinorState":
        """h(k): [s, v] -> [m beta s + k v, k s - m beta v] (times chi for Weyl)."""
        sy = self.system
        chi = getattr(sy, "chi", +1)
        kk = self.k[:, None]
        if sy.kind == "dirac":
            s_new = sy.m * self._beta(self.s) + kk * self.v
            v_new = kk * self.s - sy.m * self._beta(self.v)
        else:
            s_new = chi * kk * self.v
            v_new = chi * kk * self.s
        return RadialSpinorState(self.k, s_new, v_new, sy, self.rep)

    def energy_expectation(self) -> float:
        h = self.apply_h()
        w = simpson_weights(self.k.size, self.dk)
        dens = np.real(
            np.sum(np.conj(self.s) * h.s, axis=1) + np.sum(np.conj(self.v) * h.v, axis=1)
        )
        return float(4.0 * np.pi * np.sum(w * self.k**2 * dens))


def _bessel_transform(x: np.ndarray, nodes_in: np.ndarray, nodes_out: np.ndarray, order: int) -> np.ndarray:
    """sqrt(2/pi) int j_order(k r) k^2 x(k) dk, chunked over output nodes."""
    w = simpson_weights(nodes_in.size, float(nodes_in[1] - nodes_in[0]))
    pref = w * nodes_in**2
    out = np.empty((nodes_out.size, x.shape[1]), dtype=complex)
    coef = np.sqrt(2.0 / np.pi)
    for start in range(0, nodes_out.size, _CHUNK):
        blk = nodes_out[start : start + _CHUNK]
        arg = np.outer(blk, nodes_in)
        if order == 0:
            kern = al.sinc(arg)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                small = np.abs(arg) < 1e-4
                safe = np.where(small, 1.0, arg)
                kern = np.where(
                    small, arg / 3.0, np.sin(safe) / safe**2 - np.cos(safe) / safe
                )
        out[start : start + len(blk)] = coef * ((kern * pref) @ x)
    return out


def radial_to_position(state: RadialSpinorState, radii: np.ndarray) -> RadialSpinorState:
    """(S, V) on the radii; psi(x) = S(|x|) + i (alpha.x^) V(|x|)."""
    if state.rep != "momentum":
        raise ValueError("state already in position representation")
    s_pos = _bessel_transform(state.s, state.k, radii, 0)
    v_pos = _bessel_transform(state.v, state.k, radii, 1)
    return RadialSpinorState(radii, s_pos, v_pos, state.system, "position")


def radial_to_momentum(state: RadialSpinorState, k_nodes: np.ndarray) -> RadialSpinorState:
    if state.rep != "position":
        raise ValueError("state already in momentum representation")
    s_mom = _bessel_transform(state.s, state.k, k_nodes, 0)
    v_mom = _bessel_transform(state.v, state.k, k_nodes, 1)
    return RadialSpinorState(k_nodes, s_mom, v_mom, state.system, "momentum")


def radial_ball_mass(state: RadialSpinorState, radius: float) -> float:
    """||E(B_radius) psi||^2 from the position-representation pair."""
    if state.rep != "position":
        raise ValueError("ball mass needs position representation")
    dens = np.sum(np.abs(state.s) ** 2 + np.abs(state.v) ** 2, axis=1)
    cum = cumulative_simpson(state.k**2 * dens, state.dk)
    return float(4.0 * np.pi * np.interp(radius, state.k, cum))


def shell_state(system, k_nodes: np.ndarray, k_lo: float, k_hi: float) -> RadialSpinorState:
    """1_{k_lo <= |p| <= k_hi} u0(p^) with u0 the dilation-invariant eigenvector.

    u0 satisfies (alpha.p^) u0 = u0, realized as s = v = c/2 for a constant
    spinor c; here c = e_1.  pi_0 u0 = u0 by construction.
    """
    d = system.components
    c = np.zeros(d, dtype=complex)
    c[0] = 1.0
    env = ((k_nodes >= k_lo) & (k_nodes <= k_hi)).astype(complex)
    s = env[:, None] * (0.5 * c)
    v = env[:, None] * (0.5 * c)
    return RadialSpinorState(k_nodes, s, v, system, "momentum")


def gaussian_radial_state(system, k_nodes: np.ndarray, center: float, width: float, seed: int = 0) -> RadialSpinorState:
    rng = np.random.default_rng(seed)
    d = system.components
    env = np.exp(-0.5 * ((k_nodes - center) / width) ** 2).astype(complex)
    s = env[:, None] * (rng.normal(size=d) + 1j * rng.normal(size=d))
    v = env[:, None] * (rng.normal(size=d) + 1j * rng.normal(size=d))
    return RadialSpinorState(k_nodes, s, v, system, "momentum")


def dilate_radial(state: RadialSpinorState, n: float) -> RadialSpinorState:
    """D_n^{-1}: phi(k) -> n^{-3/2} phi(k/n) by resampling the radial profile."""
    if state.rep != "momentum":
        raise ValueError("dilation acts in momentum representation")
    kq = state.k / n
    s = np.empty_like(state.s)
    v = np.empty_like(state.v)
    for c in range(state.s.shape[1]):
        s[:, c] = np.interp(kq, state.k, state.s[:, c].real) + 1j * np.interp(
            kq, state.k, state.s[:, c].imag
        )
        v[:, c] = np.interp(kq, state.k, state.v[:, c].real) + 1j * np.interp(
            kq, state.k, state.v[:, c].imag
        )
    return RadialSpinorState(state.k, n ** (-1.5) * s, n ** (-1.5) * v, state.system, "momentum")


def point_localized_sequence(
    phi0: RadialSpinorState,
    n: float,
    project: bool = True,
) -> RadialSpinorState:
    """phi_n = P+ D_n^{-1} phi0 / ||.||; localized at 0 as n grows."""
    state = dilate_radial(phi0, n)
    if project:
        q = state.apply_dilation_limit_projector()
        if np.sqrt(max(q.norm_sq(), 0.0)) <= 1e-6:
            raise NullDilationLimit("||pi_0 phi0|| is numerically zero")
        state = state.apply_projector(+1)
    nrm = state.norm_sq()
    if nrm <= 0.0:
        raise NullDilationLimit("P+ D_n^{-1} phi0 vanished")
    return state.normalized()


def ball_expectation(state: RadialSpinorState, radius: float, radii: np.ndarray) -> float:
    """<phi, T(B_radius) phi> = ||E(B_radius) psi||^2 for positive-energy phi."""
    pos = radial_to_position(state, radii)
    return radial_ball_mass(pos, radius)


def dilated_shell(system, k_nodes: np.ndarray, k_lo: float, k_hi: float, n: float) -> RadialSpinorState:
    """D_n^{-1} of the shell state evaluated exactly: 1_{n k_lo <= |p| <= n k_hi} u0."""
    return shell_state(system, k_nodes, n * k_lo, n * k_hi)


def energy_growth(phi0: RadialSpinorState, ns, guard_tol: float = 1e-12, factory=None):
    """[(n, <phi_n, H phi_n>/n)] plus the dilation-limit target.

    The target is <Q phi0, |P| Q phi0> / ||Q phi0||^2 with Q the pi_0
    projection, evaluated by radial quadrature.  The momentum support of phi0
    must stay clear of 0 and of the band edge (after the largest dilation).
    `factory(n)`, when given, supplies D_n^{-1} phi0 evaluated exactly instead
    of resampling the profile (resampling blurs sharp band edges by a constant
    relative width and biases the large-n limit).
    """
    dens0 = np.sum(np.abs(phi0.s) ** 2 + np.abs(phi0.v) ** 2, axis=1)
    total = float(np.sum(dens0 * phi0.k**2))
    lo_frac = float(np.sum((dens0 * phi0.k**2)[phi0.k < 4 * phi0.dk])) / total
    n_max = max(float(n) for n in ns)
    hi_cells = phi0.k > phi0.k[-1] / n_max - 2 * phi0.dk
    hi_frac = float(np.sum((dens0 * phi0.k**2)[hi_cells])) / total
    if lo_frac > guard_tol or hi_frac > guard_tol:
        raise DomainViolation("momentum support touches 0 or the band edge")
    q = phi0.apply_dilation_limit_projector()
    qn = q.norm_sq()
    if qn <= 0.0:
        raise NullDilationLimit("Q phi0 = 0")
    w = simpson_weights(phi0.k.size, phi0.dk)
    qdens = np.sum(np.abs(q.s) ** 2 + np.abs(q.v) ** 2, axis=1)
    target = float(4.0 * np.pi * np.sum(w * phi0.k**3 * qdens)) / qn
    rows = []
    for n in ns:
        if factory is not None:
            phi_n = factory(float(n)).apply_projector(+1).normalized()
        else:
            phi_n = point_localized_sequence(phi0, float(n))
        rows.append((float(n), phi_n.energy_expectation() / float(n)))
    return rows, target


def truncation_negative_fraction(phi0: RadialSpinorState, ns, radius: float, radii: np.ndarray):
    """[(n, negative-energy fraction of the ball-truncated phi_n)].

    phi^_n = E(B) phi_n / ||E(B) phi_n||; the fraction ||(I - P+) phi^_n||
    vanishes as the sequence localizes.
    """
    rows = []
    for n in ns:
        phi_n = point_localized_sequence(phi0, float(n))
        pos = radial_to_position(phi_n, radii)
        mask = (radii <= radius).astype(float)[:, None]
        cut = RadialSpinorState(radii, pos.s * mask, pos.v * mask, pos.system, "position")
        cut_m = radial_to_momentum(cut, phi0.k)
        cut_m = cut_m.normalized()
        neg = cut_m.apply_projector(-1)
        rows.append((float(n), float(np.sqrt(neg.norm_sq()))))
    return rows


def weyl_pol_sequence(phi: RadialSpinorState, n: float, eta: int = +1) -> RadialSpinorState:
    """phi_n = D_n^{-1} phi for a Weyl state in ran P^{chi eta} (no reprojection needed)."""
    if phi.system.kind != "weyl":
        raise NotInRange("weyl_pol_sequence needs a Weyl state")
    proj = phi.apply_projector(eta)
    diff = RadialSpinorState(phi.k, proj.s - phi.s, proj.v - phi.v, phi.system, phi.rep)
    if diff.norm_sq() > 1e-12 * max(phi.norm_sq(), 1.0):
        raise NotInRange("state is not in the range of the chosen P^{chi eta}")
    return dilate_radial(phi, n).normalized()
