"""Closed-form evolution of radially symmetric Weyl states.

For psi(x) = g(|x|) with a square-integrable 2-spinor profile g the evolved
state splits into outgoing/ingoing projections plus a remainder:

    psi_t = A^+_t + A^-_t + R_t
    A^s_t(x) = pi^{chi s}(x/|x|) ((|x| + s t)/|x|) g(||x| + s t|)
    R_t(x)   = h^chi(x/|x|) (1/2|x|^2) (G(||x|+t|) - G(||x|-t|)),
    G(r)     = -int_0^r rho g(rho) d rho

Everything reduces to radial quadrature: writing psi_t(x) = u(r) + h^chi(x^) v(r)
with u = (a_+ + a_-)/2 and v = (a_+ - a_-)/2 + rho_t, the solid-angle integral
of any ball or slab probability collapses to an (r, xi) integral whose xi part
is exact (the integrand is affine in xi = cos(theta)).

The independent spectral route uses the Fourier-sine pair j f = S(j g) of the
radial momentum profile and evaluates three sine/cosine quadratures per output
radius; it shares nothing with the closed form beyond g itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import SIGMA, Weyl, sinc
from .errors import OriginSingular
from .field import Grid, SpinorField

DEFAULT_NODES = 4096
_CHUNK = 512


def simpson_weights(n_points: int, h: float) -> np.ndarray:
    """Composite Simpson weights for an odd number of uniformly spaced points."""
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError("Simpson needs an odd number of points")
    w = np.ones(n_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def cumulative_simpson(f: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral on the same nodes; Simpson over interval pairs.

    Odd nodes get the 5/8/-1 half-panel rule so the cumulative values stay
    consistent with the full composite rule at even nodes.
    """
    n = f.shape[0]
    out = np.zeros_like(f, dtype=complex if np.iscomplexobj(f) else float)
    pair = h / 3.0 * (f[0:-2:2] + 4.0 * f[1::2] + f[2::2])
    even = np.concatenate([[0.0], np.cumsum(pair, axis=0)]) if f.ndim == 1 else None
    if f.ndim == 1:
        out[0::2] = even
        out[1::2] = out[0:-2:2] + h / 12.0 * (5.0 * f[0:-2:2] + 8.0 * f[1::2] - f[2::2])
        return out
    even2 = np.concatenate([np.zeros((1,) + f.shape[1:]), np.cumsum(pair, axis=0)], axis=0)
    out[0::2] = even2
    out[1::2] = out[0:-2:2] + h / 12.0 * (5.0 * f[0:-2:2] + 8.0 * f[1::2] - f[2::2])
    return out


@dataclass
class RadialProfile:
    """Radial 2-spinor profile on a uniform grid over [0, r_max].

    The cumulative moment G(r) = -int_0^r rho g(rho) d rho is computed with
    the same nodes (cumulative Simpson) so its discrete cancellations at t = 0
    are exact to rounding.
    """

    r: np.ndarray
    g: np.ndarray  # (n, 2) complex
    G: np.ndarray  # (n, 2) complex

    @staticmethod
    def from_callable(g_of_r, r_max: float, n_nodes: int = DEFAULT_NODES) -> "RadialProfile":
        r = np.linspace(0.0, r_max, n_nodes + 1)
        g = np.asarray(g_of_r(r), dtype=complex)
        if g.shape != (r.size, 2):
            raise ValueError("profile callable must map radii to shape (n, 2)")
        G = -cumulative_simpson(r[:, None] * g, r[1] - r[0])
        return RadialProfile(r, g, G)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0])

    def norm_sq(self) -> float:
        w = simpson_weights(self.r.size, self.dr)
        return float(4.0 * np.pi * np.sum(w * self.r**2 * np.sum(np.abs(self.g) ** 2, axis=1)))

    def normalized(self) -> "RadialProfile":
        n = np.sqrt(self.norm_sq())
        return RadialProfile(self.r, self.g / n, self.G / n)

    def g_at(self, radii: np.ndarray) -> np.ndarray:
        """Linear interpolation of g at |radii| (zero beyond r_max)."""
        rq = np.abs(np.asarray(radii, dtype=float))
        out = np.zeros(rq.shape + (2,), dtype=complex)
        for c in range(2):
            out[..., c] = np.interp(rq, self.r, self.g[:, c].real, right=0.0) + 1j * np.interp(
                rq, self.r, self.g[:, c].imag, right=0.0
            )
        return out

    def G_at(self, radii: np.ndarray) -> np.ndarray:
        """G at |radii|; constant (total moment) beyond r_max."""
        rq = np.abs(np.asarray(radii, dtype=float))
        out = np.zeros(rq.shape + (2,), dtype=complex)
        for c in range(2):
            out[..., c] = np.interp(
                rq, self.r, self.G[:, c].real, right=float(self.G[-1, c].real)
            ) + 1j * np.interp(rq, self.r, self.G[:, c].imag, right=float(self.G[-1, c].imag))
        return out


def radial_parts(profile: RadialProfile, t: float, radii: np.ndarray):
    """(a_plus, a_minus, rho_t) radial 2-spinor factors at the given radii.

    A^s_t(x) = pi^{chi s}(x^) a_s(|x|) and R_t(x) = h^chi(x^) rho_t(|x|);
    radii below half a profile step are rejected (1/r^2 is only removably
    singular in exact arithmetic).
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < profile.dr / 2.0):
        raise OriginSingular("evaluation requested below dr/2")
    a_plus = ((radii + t) / radii)[:, None] * profile.g_at(radii + t)
    a_minus = ((radii - t) / radii)[:, None] * profile.g_at(radii - t)
    rho = (profile.G_at(radii + t) - profile.G_at(radii - t)) / (2.0 * radii**2)[:, None]
    return a_plus, a_minus, rho


def scalar_vector_parts(profile: RadialProfile, t: float, radii: np.ndarray):
    """psi_t(x) = u(|x|) + h^chi(x^) v(|x|): returns (u, v) on the radii."""
    a_plus, a_minus, rho = radial_parts(profile, t, radii)
    u = 0.5 * (a_plus + a_minus)
    v = 0.5 * (a_plus - a_minus) + rho
    return u, v


def evaluate_closed_form(profile: RadialProfile, chi: int, t: float, points: np.ndarray) -> np.ndarray:
    """psi_t at 3D points (n, 3) via the closed form."""
    points = np.asarray(points, dtype=float)
    r = np.linalg.norm(points, axis=1)
    u, v = scalar_vector_parts(profile, t, r)
    nhat = points / r[:, None]
    h = chi * np.einsum("nk,kij->nij", nhat, SIGMA)
    return u + np.einsum("nij,nj->ni", h, v)


def sample_on_grid(profile: RadialProfile, chi: int, t: float, grid: Grid) -> SpinorField:
    """Closed-form psi_t sampled on a 3D grid (origin cell set to zero)."""
    if grid.dim != 3:
        raise ValueError("radial sampling needs a 3D grid")
    mesh = np.meshgrid(*(grid.axis(k) for k in range(3)), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    r = np.linalg.norm(pts, axis=1)
    ok = r >= profile.dr / 2.0
    vals = np.zeros((pts.shape[0], 2), dtype=complex)
    vals[ok] = evaluate_closed_form(profile, chi, t, pts[ok])
    return SpinorField(grid, Weyl(chi), "position", vals.reshape((grid.n,) * 3 + (2,)))


# --- radial quadratures of the evolved state --------------------------------


def _uv_on_quad_grid(profile: RadialProfile, t: float, r_max: float, n_nodes: int):
    n = n_nodes + (n_nodes % 2)  # even interval count
    r = np.linspace(0.0, r_max, n + 1)
    r[0] = profile.dr / 2.0  # exclude the removable origin
    u, v = scalar_vector_parts(profile, t, r)
    w = simpson_weights(r.size, r_max / n)
    return r, u, v, w


def ball_probability_evolved(
    profile: RadialProfile,
    chi: int,
    t: float,
    center: float = 0.0,
    radius: float | None = None,
    n_nodes: int = 4096,
) -> float:
    """P(psi_t in ball of given radius centered at center*e3), exact in xi.

    The angular integrand is affine in xi = cos(theta): with u, v the scalar
    and vector radial parts, the azimuthal average of |psi_t|^2 is
    |u|^2 + |v|^2 + 2 chi xi Re<u, sigma3 v>, and the hit condition
    r^2 - 2 r c xi + c^2 <= radius^2 clips xi to an exact interval.
    """
    rad = abs(t) if radius is None else radius
    r_max = profile.r_max + abs(t)
    r, u, v, w = _uv_on_quad_grid(profile, t, r_max, n_nodes)
    a = np.sum(np.abs(u) ** 2 + np.abs(v) ** 2, axis=1)
    b = 2.0 * chi * np.real(np.einsum("ni,ij,nj->n", np.conj(u), SIGMA[2], v))
    c = center
    if c == 0.0:
        cum = cumulative_simpson(r**2 * a, float(r[-1] - r[-2]))
        return float(4.0 * np.pi * np.interp(rad, r, cum))
    lo = (r**2 + c**2 - rad**2) / (2.0 * r * c)
    if c > 0:
        x0, x1 = np.clip(lo, -1.0, 1.0), np.ones_like(r)
    else:
        x0, x1 = -np.ones_like(r), np.clip(lo, -1.0, 1.0)
    width = np.maximum(x1 - x0, 0.0)
    second = np.where(width > 0.0, (x1**2 - x0**2) / 2.0, 0.0)
    return float(2.0 * np.pi * np.sum(w * r**2 * (a * width + b * second)))


def slab_probability_evolved(
    profile: RadialProfile,
    chi: int,
    t: float,
    beta: float = 0.0,
    half_width: float | None = None,
    n_nodes: int = 4096,
) -> float:
    """P(psi_t in {|x3 - beta| <= half_width}) by the same (r, xi) quadrature."""
    hw = abs(t) if half_width is None else half_width
    r_max = profile.r_max + abs(t)
    r, u, v, w = _uv_on_quad_grid(profile, t, r_max, n_nodes)
    a = np.sum(np.abs(u) ** 2 + np.abs(v) ** 2, axis=1)
    b = 2.0 * chi * np.real(np.einsum("ni,ij,nj->n", np.conj(u), SIGMA[2], v))
    x0 = np.clip((beta - hw) / r, -1.0, 1.0)
    x1 = np.clip((beta + hw) / r, -1.0, 1.0)
    width = np.maximum(x1 - x0, 0.0)
    second = np.where(width > 0.0, (x1**2 - x0**2) / 2.0, 0.0)
    return float(2.0 * np.pi * np.sum(w * r**2 * (a * width + b * second)))


def splitting_norms(profile: RadialProfile, t: float, n_nodes: int = 4096):
    """(||A^+_t||^2, ||A^-_t||^2, ||R_t||^2) by radial quadrature."""
    out = []
    r_max = profile.r_max + abs(t)
    for s in (+1, -1):
        n = n_nodes + (n_nodes % 2)
        rr = np.linspace(0.0, r_max, n + 1)
        w = simpson_weights(rr.size, r_max / n)
        shifted = rr + s * t
        dens = np.sum(np.abs(profile.g_at(shifted)) ** 2, axis=1)
        out.append(float(2.0 * np.pi * np.sum(w * shifted**2 * dens)))
    r, u, v, w = _uv_on_quad_grid(profile, t, r_max, n_nodes)
    _, _, rho = radial_parts(profile, t, r)
    out.append(float(4.0 * np.pi * np.sum(w * r**2 * np.sum(np.abs(rho) ** 2, axis=1))))
    return tuple(out)


def ball_capture_split(profile: RadialProfile, t: float, s: int, n_nodes: int = 4096) -> float:
    """||E(B_|t|) A^s_t||^2 = 2 pi int_0^|t| (r + s t)^2 |g(|r + s t|)|^2 dr."""
    n = n_nodes + (n_nodes % 2)
    rr = np.linspace(0.0, abs(t), n + 1)
    w = simpson_weights(rr.size, abs(t) / n)
    shifted = rr + s * t
    dens = np.sum(np.abs(profile.g_at(shifted)) ** 2, axis=1)
    return float(2.0 * np.pi * np.sum(w * shifted**2 * dens))


def ball_probability_static(profile: RadialProfile, radius: float) -> float:
    """||E(B_radius) psi||^2 = 4 pi int_0^radius r^2 |g|^2 dr on the profile nodes."""
    r = profile.r
    dens = np.sum(np.abs(profile.g) ** 2, axis=1)
    cum = cumulative_simpson(r**2 * dens, profile.dr)
    return float(4.0 * np.pi * np.interp(radius, r, cum))


# --- independent spectral route ---------------------------------------------


def _sine_transform_at(profile: RadialProfile, s: np.ndarray) -> np.ndarray:
    r = profile.r
    u = r[:, None] * profile.g
    w = simpson_weights(r.size, profile.dr)
    out = np.empty((s.size, 2), dtype=complex)
    coef = np.sqrt(2.0 / np.pi)
    for start in range(0, s.size, _CHUNK):
        block = s[start : start + _CHUNK]
        kern = np.sin(np.outer(block, r)) * w
        out[start : start + len(block)] = coef * (kern @ u)
    return out


def sine_transform_profile(profile: RadialProfile, band_tol: float = 1e-13):
    """(s nodes, u~ = S(j g) samples) over the momentum band the profile fills.

    The band edge is probed on [0, Nyquist/2] (the forward quadrature aliases
    near the full node Nyquist) and set where the amplitude last exceeds
    band_tol of its peak, so the inverse quadratures resolve sin(s r) instead
    of chasing the node Nyquist.  The final grid reuses the profile node count.
    """
    probe_max = 0.5 * np.pi / profile.dr
    probe = np.linspace(0.0, probe_max, 2049)
    amp = np.sum(np.abs(_sine_transform_at(profile, probe)) ** 2, axis=1)
    above = np.nonzero(amp > band_tol**2 * float(amp.max()))[0]
    edge = probe[above[-1]] if above.size else probe[-1]
    s_max = min(1.25 * edge + 1.0, probe_max)
    n = profile.r.size - 1
    s = np.linspace(0.0, s_max, n + 1)
    return s, _sine_transform_at(profile, s)


def spectral_evolve(profile: RadialProfile, chi: int, t: float, radii: np.ndarray):
    """(u, v) parts of psi_t at the radii via the Fourier-sine route.

    u(r) = (1/r) S[cos(ts) u~](r)
    v(r) = (1/r) C[sin(ts) u~](r) - (t/r^2) S[sinc(ts) u~](r)
    with S/C the sine/cosine quadratures over the s band; independent of the
    closed form (no use of G or the shifted profile).
    """
    radii = np.asarray(radii, dtype=float)
    s, ut = sine_transform_profile(profile)
    ws = simpson_weights(s.size, s[1] - s[0])
    coef = np.sqrt(2.0 / np.pi)
    f_cos = (np.cos(t * s)[:, None] * ut) * ws[:, None]
    f_sin = (np.sin(t * s)[:, None] * ut) * ws[:, None]
    f_snc = (t * sinc(t * s)[:, None] * ut) * ws[:, None]
    u_out = np.empty((radii.size, 2), dtype=complex)
    v_out = np.empty((radii.size, 2), dtype=complex)
    for start in range(0, radii.size, _CHUNK):
        r_blk = radii[start : start + _CHUNK]
        sin_m = np.sin(np.outer(r_blk, s))
        cos_m = np.cos(np.outer(r_blk, s))
        term1 = coef * (sin_m @ f_cos) / r_blk[:, None]
        term2 = coef * (cos_m @ f_sin) / r_blk[:, None]
        term3 = coef * (sin_m @ f_snc) / (r_blk**2)[:, None]
        u_out[start : start + len(r_blk)] = term1
        v_out[start : start + len(r_blk)] = term2 - term3
    return u_out, v_out


def crosscheck_against_spectral(
    profile: RadialProfile,
    chi: int,
    t: float,
    n_eval: int = 2048,
) -> float:
    """Relative L2 discrepancy between the closed form and the sine route."""
    r_max = profile.r_max + abs(t) + 1.0
    n = n_eval + (n_eval % 2)
    radii = np.linspace(0.0, r_max, n + 1)
    radii[0] = profile.dr / 2.0
    w = simpson_weights(radii.size, r_max / n)
    u_cf, v_cf = scalar_vector_parts(profile, t, radii)
    u_sp, v_sp = spectral_evolve(profile, chi, t, radii)
    diff = np.sum(np.abs(u_cf - u_sp) ** 2 + np.abs(v_cf - v_sp) ** 2, axis=1)
    err = 4.0 * np.pi * np.sum(w * radii**2 * diff)
    return float(np.sqrt(err / profile.norm_sq()))


# --- asymptotics --------------------------------------------------------------


def asymptotic_ball_probability(profile: RadialProfile, b, chi: int):
    """Limits of ||E(B_|t|) psi_t||^2 for t -> +inf / -inf, psi centered at b.

    1/2 +- 2 pi int_0^1 int_0^{|b| xi} xi r^2 <g(r), h^chi(b/|b|) g(r)> dr dxi;
    both limits lie in [1/4, 3/4] and equal 1/2 exactly for b = 0.
    """
    b = np.asarray(b, dtype=float)
    bmag = float(np.linalg.norm(b))
    if bmag == 0.0:
        return 0.5, 0.5
    h = chi * np.einsum("k,kij->ij", b / bmag, SIGMA)
    q = np.real(np.einsum("ni,ij,nj->n", np.conj(profile.g), h, profile.g))
    moment = cumulative_simpson(profile.r**2 * q, profile.dr)  # int_0^y r^2 q dr
    n_xi = 513
    xi = np.linspace(0.0, 1.0, n_xi)
    w_xi = simpson_weights(n_xi, xi[1] - xi[0])
    inner = np.interp(np.minimum(bmag * xi, profile.r_max), profile.r, moment)
    corr = 2.0 * np.pi * float(np.sum(w_xi * xi * inner))
    return 0.5 + corr, 0.5 - corr


def slab_probability_limit(profile: RadialProfile, chi: int, beta: float, times) -> list:
    """[(t, P(psi_t in {|x3 - beta| <= |t|}))]: increases toward 1."""
    return [
        (float(t), slab_probability_evolved(profile, chi, float(t), beta=beta))
        for t in times
    ]
