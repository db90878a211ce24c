"""Boundary value problems for H(x, 0) and H(0, y): conformal map, poles, index, solutions.

H(x, y) is the joint generating function of the two relay queues. The
unknown H(x, 0) is analytic inside the contour M; its boundary condition on
M is either a Dirichlet problem (sigma = 1) or a Riemann-Hilbert problem.
Both are solved by mapping the unit disc onto the interior of M with a
Theodorsen map and evaluating Cauchy-type integrals as Fourier series.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import ellipj, ellipk

from .analysis import InstabilityError, StabilityRegion
from .kernel import Contour, KernelPolynomials, build_kernel, contour
from .model import Coefficients, classify_case, conservation_residuals

log = logging.getLogger(__name__)

DEFAULT_GRID = 512
THEODORSEN_TOL = 1e-12


class UnsupportedRegionError(ValueError):
    """x = 1 is not inside M (some lam_i >= T b_i); the boundary problem does not apply."""


class UnsupportedIndexError(ValueError):
    """Only index zero Riemann-Hilbert problems are solved."""


class TheodorsenDivergence(RuntimeError):
    pass


# ---------------------------------------------------------------- conformal map

def conjugate_fft(u):
    """Discrete conjugate function of periodic samples (spectral multiplier -i sign k)."""
    n = len(u)
    U = np.fft.fft(u)
    k = np.fft.fftfreq(n, 1.0 / n)
    V = -1j * np.sign(k) * U
    if n % 2 == 0:
        V[n // 2] = 0
    return np.fft.ifft(V).real


def conjugate_wittich(u):
    """Same operator as a trapezoid sum of the cotangent kernel.

    The singular node and every node at an even offset are skipped; the odd
    offsets carry weight 2/n.
    """
    n = len(u)
    if n % 2:
        raise ValueError("Wittich's rule needs an even grid")
    off = np.arange(n)
    j = off[None, :] - off[:, None]
    odd = (j % 2) == 1
    with np.errstate(divide="ignore"):
        w = np.where(odd, 2.0 / n / np.tan(np.pi * j / n), 0.0)
    return -w @ u


@dataclass
class ConformalMap:
    """gamma0: unit disc -> interior of a star-shaped contour, gamma0(0) = 0, gamma0'(0) > 0.

    Boundary correspondence: gamma0(exp(i phi)) = rho(psi) exp(i psi).
    log(gamma0(z)/z) = sum coef[k] z^k.
    """
    phi: np.ndarray
    psi: np.ndarray
    rho: np.ndarray
    coef: np.ndarray
    iterations: int
    step: float

    @classmethod
    def from_boundary(cls, phi, psi, rho, iterations=0, step=0.0):
        n = len(phi)
        ck = np.fft.fft(np.log(rho)) / n
        coef = ck[: n // 2].copy()
        coef[1:] *= 2
        return cls(phi, psi, rho, coef, iterations, step)

    @property
    def boundary(self):
        return self.rho * np.exp(1j * self.psi)

    def __call__(self, z):
        z = np.asarray(z, complex)
        return z * np.exp(P.polyval(z, self.coef))

    def dlog(self, z):
        """d/dz log gamma0(z)."""
        z = np.asarray(z, complex)
        return 1 / z + P.polyval(z, P.polyder(self.coef))

    def derivative(self, z):
        z = np.asarray(z, complex)
        return np.exp(P.polyval(z, self.coef)) * (1 + z * P.polyval(z, P.polyder(self.coef)))

    def inverse(self, x, z=None, tol=1e-15, max_iter=100):
        """z with gamma0(z) = x, by Newton from x / gamma0'(0)."""
        x = np.asarray(x, complex)
        z = x * np.exp(-self.coef[0]) if z is None else np.asarray(z, complex)
        for _ in range(max_iter):
            dz = (self(z) - x) / self.derivative(z)
            z = z - dz
            if np.all(np.abs(dz) < tol):
                break
        return z

    @property
    def z0(self):
        """gamma(1): the point of (0, 1) mapped to x = 1."""
        return float(self.inverse(1.0).real)

    @property
    def gamma_prime_1(self):
        """Derivative of the inverse map at x = 1."""
        return float(1 / self.derivative(self.z0).real)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi_rad", "psi_rad", "rho"])
            for row in zip(self.phi, self.psi, self.rho):
                w.writerow([repr(float(v)) for v in row])


def theodorsen(radius: Callable, grid_size=DEFAULT_GRID, tol=THEODORSEN_TOL, max_iter=10_000,
               conjugate=conjugate_fft) -> ConformalMap:
    """Fixed point psi = phi + K[log rho(psi)] of the Theodorsen equation.

    radius(psi) is the polar radius of the target contour.
    """
    phi = 2 * np.pi * np.arange(grid_size) / grid_size
    psi = phi.copy()
    step = np.inf
    for it in range(1, max_iter + 1):
        new = phi + conjugate(np.log(radius(psi)))
        step = float(np.max(np.abs(new - psi)))
        psi = new
        if not np.isfinite(step):
            break
        if step < tol:
            return ConformalMap.from_boundary(phi, psi, radius(psi), it, step)
    raise TheodorsenDivergence(
        f"no convergence after {it} iterations (last step {step:.3g}); "
        "try a larger grid or the elliptic approximation")


def theodorsen_solve(c: Contour, grid_size=None, tol=THEODORSEN_TOL, **kw) -> ConformalMap:
    return theodorsen(c.radius, grid_size or len(c.phi) or DEFAULT_GRID, tol, **kw)


# ---------------------------------------------------------------- elliptic approximation

def _sn_complex(u, m):
    """Jacobi sn(u | m) for complex u through the imaginary-argument addition formula."""
    u = np.asarray(u, complex)
    s, c, d, _ = ellipj(u.real, m)
    s1, c1, d1, _ = ellipj(u.imag, 1 - m)
    den = c1 ** 2 + m * s ** 2 * s1 ** 2
    return (s * d1 + 1j * c * d * s1 * c1) / den


def elliptic_parameter(q, tol=1e-15, max_terms=10_000):
    """m = k^2 = 16 q prod((1 + q^2n) / (1 + q^(2n-1)))^8 from the nome q."""
    prod = 1.0
    for n in range(1, max_terms + 1):
        f = (1 + q ** (2 * n)) / (1 + q ** (2 * n - 1))
        prod *= f
        if abs(f - 1) < tol:
            break
    return 16 * q * prod ** 8


@dataclass
class EllipticMap:
    """Map of the ellipse with semi-axes (ra, rb) onto the unit disc."""
    ra: float
    rb: float
    q: float
    m: float

    @classmethod
    def from_axes(cls, ra, rb):
        big, small = max(ra, rb), min(ra, rb)
        q = ((big - small) / (big + small)) ** 2
        return cls(ra, rb, q, elliptic_parameter(q) if q > 0 else 0.0)

    def __call__(self, x):
        x = np.asarray(x, complex)
        big, small = max(self.ra, self.rb), min(self.ra, self.rb)
        if self.q == 0:
            return x / big
        rot = self.rb > self.ra
        if rot:
            x = -1j * x
        c = np.sqrt(big ** 2 - small ** 2)
        K = ellipk(self.m)
        w = np.sqrt(np.sqrt(self.m)) * _sn_complex(2 * K / np.pi * np.arcsin(x / c), self.m)
        return 1j * w if rot else w


def elliptic_approx(c: Contour) -> EllipticMap:
    """Ellipse through rho(0) and rho(pi/2)."""
    return EllipticMap.from_axes(float(c.radius(0.0)[0]), float(c.radius(np.pi / 2)[0]))


# ---------------------------------------------------------------- poles and index

def _boundary_polys(coeffs: Coefficients):
    """A and B (times xy/T) as 2-d coefficient arrays [i, j] of x^i y^j."""
    (a1, a2), (b1, b2) = coeffs.a, coeffs.b
    d1, d2 = b1 - a1, b2 - a2
    A = np.zeros((2, 2))
    A[1, 1], A[0, 1], A[1, 0] = d1 + b2, -d1, -b2  # d1 (x-1) y + b2 (y-1) x
    B = np.zeros((2, 2))
    B[1, 1], B[1, 0], B[0, 1] = d2 + b1, -d2, -b1  # d2 (y-1) x + b1 (x-1) y
    return A, B


def _resultant(kq, lin):
    """Res of quadratic kq = (k0, k1, k2) and linear lin = (l0, l1), coefficients polynomial."""
    k0, k1, k2 = kq
    l0, l1 = lin
    return P.polyadd(P.polysub(P.polymul(k2, P.polymul(l0, l0)), P.polymul(k1, P.polymul(l0, l1))),
                     P.polymul(k0, P.polymul(l1, l1)))


def sylvester_resultant(kq, lin):
    """Sylvester determinant of numeric quadratic and linear polynomials (ascending)."""
    k0, k1, k2 = kq
    l0, l1 = lin
    return np.linalg.det(np.array([[k2, k1, k0], [l1, l0, 0], [0, l1, l0]], dtype=complex))


def _divide_exact(num, den, label):
    q, r = P.polydiv(num, den)
    if np.max(np.abs(r), initial=0) > 1e-10 * max(1.0, np.max(np.abs(num))):
        raise ArithmeticError(f"{label}: resultant does not factor as expected")
    return q


def resultant_polys(kern: KernelPolynomials):
    """Q(y), Qt(x), T(y) with Res_x(R,A) = y(y-1)Q, Res_y(R,A) = b2 x(x-1)Qt, Res_x(R,B) = b1 y(y-1)T."""
    A, B = _boundary_polys(kern.coeffs)
    b1, b2 = kern.coeffs.b
    in_x = [kern.coef[i, :] for i in range(3)]  # R as quadratic in x, coefficients in y
    in_y = [kern.coef[:, j] for j in range(3)]
    yy1 = np.array([0.0, -1.0, 1.0])  # y (y - 1)
    Q = _divide_exact(_resultant(in_x, [A[0, :], A[1, :]]), yy1, "Res_x(R,A)")
    Qt = _divide_exact(_resultant(in_y, [A[:, 0], A[:, 1]]), b2 * yy1, "Res_y(R,A)")
    Tp = _divide_exact(_resultant(in_x, [B[0, :], B[1, :]]), b1 * yy1, "Res_x(R,B)")
    return Q, Qt, Tp


def boundary_A(coeffs: Coefficients, x, y):
    """A(x, y) * xy / T."""
    (a1, a2), (b1, b2) = coeffs.a, coeffs.b
    return (b1 - a1) * (x - 1) * y + b2 * (y - 1) * x


def boundary_B(coeffs: Coefficients, x, y):
    (a1, a2), (b1, b2) = coeffs.a, coeffs.b
    return (b2 - a2) * (y - 1) * x + b1 * (x - 1) * y


def winding_number(f):
    """Turns of closed sampled curve f around 0."""
    g = np.append(f, f[0])
    return (np.unwrap(np.angle(g))[-1] - np.angle(g[0])) / (2 * np.pi)


@dataclass
class PoleData:
    xbar: float | None
    r: int
    Q: np.ndarray
    Qt: np.ndarray
    T: np.ndarray
    qt_roots: np.ndarray
    min_abs_B: float
    winding_A: int
    winding_B: int


def pole_scan(kern: KernelPolynomials, c: Contour, tol=1e-8) -> PoleData:
    """Zero xbar of A(x, Y0(x)) in the part of the contour interior outside the unit disc."""
    coeffs = kern.coeffs
    Q, Qt, Tp = resultant_polys(kern)
    roots = P.polyroots(Qt) if np.any(Qt[1:] != 0) else np.array([])
    x = c.points
    y = kern.root_Y0(x)
    wa = int(np.round(winding_number(boundary_A(coeffs, x, y))))
    Bv = boundary_B(coeffs, x, y)
    wb = int(np.round(winding_number(Bv)))
    xbar = None
    for rt in roots:
        if abs(rt.imag) > 1e-9 or not 1 < rt.real < c.beta0:
            continue
        xr = float(rt.real)
        yr = kern.root_Y0(xr)
        if abs(yr) <= 1 + 1e-12 and abs(boundary_A(coeffs, xr, yr)) < tol:
            xbar = xr
    r = int(xbar is not None)
    if r != wa - wb:
        log.warning("pole count %d disagrees with winding difference %d", r, wa - wb)
    return PoleData(xbar, r, Q, Qt, Tp, roots, float(np.min(np.abs(Bv))), wa, wb)


def zero_index_conditions(coeffs: Coefficients):
    """The two derivative-sign conditions for a zero index, as inequalities on lam."""
    T, (a1, a2), (b1, b2), (d1, d2), (l1, l2) = coeffs.T, coeffs.a, coeffs.b, coeffs.d, coeffs.lam
    return bool(l1 < T * a1 + d1 * l2 / b2), bool(l2 < T * a2 + d2 * l1 / b1)


@dataclass
class IndexInfo:
    chi: int
    raw: float
    conditions: tuple


def index_chi(kern: KernelPolynomials, c: Contour, poles: PoleData) -> IndexInfo:
    coeffs = kern.coeffs
    x = c.points
    y = kern.root_Y0(x)
    U = boundary_A(coeffs, x, y) / boundary_B(coeffs, x, y)
    if poles.r:
        U = U / (x - poles.xbar)
    raw = winding_number(U)
    return IndexInfo(int(np.round(raw)), float(raw), zero_index_conditions(coeffs))


# ---------------------------------------------------------------- solutions

def _schwarz(values, scale):
    """Coefficients of the disc-analytic F with Re F = values on |z|=1 (times `scale`)."""
    n = len(values)
    fk = np.fft.fft(values) / n
    s = fk[: n // 2].copy()
    s[1:] *= 2
    return scale * s


@dataclass
class HalfSolution:
    """H(x, 0) on one side (x side, or y side through relabelling)."""
    case: str
    h00: float
    h10: float
    h1p: float  # dH(x,0)/dx at x = 1
    evaluate: Callable
    map: ConformalMap
    poles: PoleData | None = None
    index: IndexInfo | None = None
    boundary_data: np.ndarray | None = None  # f (Dirichlet) or arg U (RH) on the grid


def _side_setup(coeffs, grid_size, tol):
    kern = build_kernel(coeffs)
    c = contour(kern, "M", grid_size)
    gmap = theodorsen_solve(c, grid_size, tol)
    return kern, c, gmap


def solve_rh(coeffs: Coefficients, grid_size=DEFAULT_GRID, tol=THEODORSEN_TOL, _retry=True) -> HalfSolution:
    kern, c, gmap = _side_setup(coeffs, grid_size, tol)
    poles = pole_scan(kern, c)
    idx = index_chi(kern, c, poles)
    if idx.chi != 0:
        if all(idx.conditions) and _retry:
            return solve_rh(coeffs, 2 * grid_size, tol, _retry=False)
        raise UnsupportedIndexError(f"index {idx.chi} (zero-index conditions {idx.conditions})")
    T, (a1, a2), (b1, b2), (d1, d2), (l1, l2) = coeffs.T, coeffs.a, coeffs.b, coeffs.d, coeffs.lam
    xb = gmap.boundary
    yb = kern.root_Y0(xb)
    xbar, r = poles.xbar, poles.r
    U = boundary_A(coeffs, xb, yb) / boundary_B(coeffs, xb, yb)
    if r:
        U = U / (xb - xbar)
    theta = np.unwrap(np.angle(U))
    s = _schwarz(theta, -1j)
    gamma = lambda z: P.polyval(z, s)
    dgamma = lambda z: P.polyval(z, P.polyder(s))
    z0, gp1 = gmap.z0, gmap.gamma_prime_1
    n0 = (d2 * l1 + b1 * (T * a2 - l2)) / (T * (b1 * b2 - d1 * d2))
    kappa = a1 * d2 / (d1 * d2 - b1 * b2)
    pole_fac = (lambda x: ((1 - xbar) / (x - xbar)) ** r) if r else (lambda x: 1.0)
    g_at = lambda z, x: n0 * pole_fac(x) * np.exp(gamma(z) - gamma(z0))
    h00 = float((g_at(0.0, 0.0) / (1 + kappa)).real)
    h10 = n0 - kappa * h00
    h1p = float((n0 * (-r / (1 - xbar) if r else 0.0) + n0 * dgamma(z0) * gp1).real)

    def evaluate(x):
        x = np.asarray(x, complex)
        return g_at(gmap.inverse(x), x) - kappa * h00

    return HalfSolution("rh", h00, float(h10), h1p, evaluate, gmap, poles, idx, theta)


def solve_dirichlet(coeffs: Coefficients, grid_size=DEFAULT_GRID, tol=THEODORSEN_TOL) -> HalfSolution:
    rho = coeffs.rho
    if rho >= 1:
        raise InstabilityError(f"rho = {rho:.6g} >= 1")
    kern, c, gmap = _side_setup(coeffs, grid_size, tol)
    poles = pole_scan(kern, c)
    T, (a1, a2), (b1, b2), (d1, d2), (l1, l2) = coeffs.T, coeffs.a, coeffs.b, coeffs.d, coeffs.lam
    h00 = 1 - rho
    xb = gmap.boundary
    yb = kern.root_Y0(xb)
    u, v = 1 - 1 / xb, 1 - 1 / yb
    A = d1 * u + b2 * v
    C = -(d1 * u + d2 * v)
    xbar = poles.xbar
    res = 0.0
    if xbar is not None:
        # H has a simple pole at xbar: split off its principal part
        a_fn = lambda x: (d1 * (1 - 1 / x) + b2 * (1 - 1 / kern.root_Y0(x))).real
        h = 1e-6 * xbar
        da = (a_fn(xbar + h) - a_fn(xbar - h)) / (2 * h)
        c_bar = -(d1 * (1 - 1 / xbar) + d2 * (1 - 1 / kern.root_Y0(xbar).real))
        res = -c_bar * h00 / da
    pole = (lambda x: res / (x - xbar)) if xbar is not None else (lambda x: 0.0)
    dpole = (lambda x: -res / (x - xbar) ** 2) if xbar is not None else (lambda x: 0.0)
    f = np.imag(-(C / A) * h00) - np.imag(pole(xb))
    s = _schwarz(f, 1j)
    F = lambda z: P.polyval(z, s)
    dF = lambda z: P.polyval(z, P.polyder(s))
    c0 = h00 - (F(0.0) + pole(0.0)).real
    z0, gp1 = gmap.z0, gmap.gamma_prime_1
    h10 = float((F(z0) + c0 + pole(1.0)).real)
    h1p = float((dF(z0) * gp1 + dpole(1.0)).real)

    def evaluate(x):
        x = np.asarray(x, complex)
        return F(gmap.inverse(x)) + c0 + pole(x)

    return HalfSolution("dirichlet", h00, h10, h1p, evaluate, gmap, poles, None, f)


@dataclass
class BvpSolution:
    case: str
    h00: float
    h10: float
    h01: float
    E: np.ndarray
    D: np.ndarray
    x_side: HalfSolution
    y_side: HalfSolution
    coeffs: Coefficients
    residuals: tuple = field(default=(np.nan, np.nan))

    @property
    def chi(self):
        return 0 if self.x_side.index is None else self.x_side.index.chi


def check_supported(coeffs: Coefficients):
    T, a, b, lam = coeffs.T, coeffs.a, coeffs.b, coeffs.lam
    if not StabilityRegion.from_rates(T, a, b).contains(*lam):
        raise InstabilityError(f"arrival rates {lam} outside the stability region")
    if np.any(lam >= T * b):
        raise UnsupportedRegionError(
            f"lam = {lam} not below T*b = {T * b}; x = 1 lies outside the contour")


def moments(coeffs: Coefficients, h1p):
    """Mean queue length of relay 1 from dH(x,0)/dx at 1."""
    T, (b1, _), (d1, _), (l1, _) = coeffs.T, coeffs.b, coeffs.d, coeffs.lam
    return (l1 + T * d1 * h1p) / (T * b1 - l1)


def solve(coeffs: Coefficients, grid_size=DEFAULT_GRID, tol=THEODORSEN_TOL, dump_dir=None) -> BvpSolution:
    """Boundary unknowns, mean queue lengths and delays of both relays."""
    check_supported(coeffs)
    case = classify_case(coeffs)
    solver = solve_dirichlet if case.kind == "dirichlet" else solve_rh
    sx = solver(coeffs, grid_size, tol)
    sy = solver(coeffs.swapped(), grid_size, tol)
    h00 = sx.h00
    h10, h01 = sx.h10, sy.h10
    E = np.array([moments(coeffs, sx.h1p), moments(coeffs.swapped(), sy.h1p)])
    lam = coeffs.lam
    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.where(lam > 0, E / lam, np.nan)
    res = conservation_residuals(coeffs, h00, h10, h01)
    if dump_dir is not None:
        _dump(dump_dir, sx, sy)
    log.debug("case %s: H00=%.12g H10=%.12g H01=%.12g E=%s", case.kind, h00, h10, h01, E)
    return BvpSolution(case.kind, h00, h10, h01, E, D, sx, sy, coeffs, res)


def moments_and_delay(sol: BvpSolution):
    return sol.E[0], sol.E[1], sol.D[0], sol.D[1]


def _dump(path, sx, sy):
    import pathlib
    p = pathlib.Path(path)
    p.mkdir(parents=True, exist_ok=True)
    for tag, s in (("x", sx), ("y", sy)):
        s.map.to_csv(p / f"map_{tag}.csv")
        with open(p / f"boundary_{tag}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi_rad", "value"])
            for a, b in zip(s.map.phi, s.boundary_data):
                w.writerow([repr(float(a)), repr(float(b))])


def pgf_coefficients(half: HalfSolution, n=20, radius=None, samples=256):
    """First n power-series coefficients of H(x, 0) by trapezoid inversion on a circle."""
    if radius is None:
        radius = 0.95 * min(1.0, float(np.min(half.map.rho)))
    th = 2 * np.pi * np.arange(samples) / samples
    vals = half.evaluate(radius * np.exp(1j * th))
    k = np.arange(n)
    return (np.exp(-1j * np.outer(k, th)) @ vals).real / samples / radius ** k

