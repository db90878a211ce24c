"""Kernel of the functional equation, its algebraic roots, branch points and contours."""
from __future__ import annotations

import csv
from dataclasses import dataclass
import numpy as np
from numpy.polynomial import polynomial as P

from .model import Coefficients


class KernelAssumptionError(ValueError):
    """Parameters fall outside the regime where the kernel has the expected root structure."""


class ContourError(RuntimeError):
    pass


@dataclass(frozen=True)
class KernelPolynomials:
    """R(x, y) = sum coef[i, j] x^i y^j, quadratic in each variable.

    R = a(x) y^2 + b(x) y + c(x) = ahat(y) x^2 + bhat(y) x + chat(y).
    """
    coef: np.ndarray
    coeffs: Coefficients

    @property
    def c1(self):
        lh1, lh2 = self.coeffs.lam_hat
        return lh1 * (1 + lh2) + self.coeffs.L[0]

    @property
    def c2(self):
        lh1, lh2 = self.coeffs.lam_hat
        return lh2 * (1 + lh1) + self.coeffs.L[1]

    @property
    def c3(self):
        lh1, lh2 = self.coeffs.lam_hat
        return self.coeffs.L[2] - lh1 * lh2

    @property
    def S(self):
        return self.coef[1, 1]

    @property
    def Tb(self):
        return self.coeffs.T * self.coeffs.b

    # coefficient sequences (ascending powers of the inner variable)
    def x_polys(self):
        """(a, b, c) as polynomials in x."""
        return self.coef[:, 2], self.coef[:, 1], self.coef[:, 0]

    def y_polys(self):
        """(ahat, bhat, chat) as polynomials in y."""
        return self.coef[2, :], self.coef[1, :], self.coef[0, :]

    def abc(self, x):
        return tuple(P.polyval(x, p) for p in self.x_polys())

    def abc_hat(self, y):
        return tuple(P.polyval(y, p) for p in self.y_polys())

    def __call__(self, x, y):
        return P.polyval2d(x, y, self.coef)

    def pgf_form(self, x, y):
        """(x*y - Psi(x, y)) / Z(x, y), with Psi a probability generating function."""
        c = self.coeffs
        (lh1, lh2), (L1, L2, L3), T, (b1, b2) = c.lam_hat, c.L, c.T, c.b
        Z = 1.0 / ((1 + lh1 * (1 - x)) * (1 + lh2 * (1 - y)))
        psi = Z * (x * y * (1 + L3 * (x * y - 1)) + y * (1 - x) * (T * b1 - L1 * x)
                   + x * (1 - y) * (T * b2 - L2 * y))
        return (x * y - psi) / Z

    def discriminant_x(self):
        a, b, c = self.x_polys()
        return P.polysub(P.polymul(b, b), 4 * P.polymul(a, c))

    def discriminant_y(self):
        a, b, c = self.y_polys()
        return P.polysub(P.polymul(b, b), 4 * P.polymul(a, c))

    def swapped(self):
        return build_kernel(self.coeffs.swapped())

    def root_Y0(self, x):
        return _small_root(*self.abc(np.asarray(x, complex)))

    def root_X0(self, y):
        return _small_root(*self.abc_hat(np.asarray(y, complex)))


def build_kernel(c: Coefficients) -> KernelPolynomials:
    (lh1, lh2), (L1, L2, L3), T, (b1, b2) = c.lam_hat, c.L, c.T, c.b
    k = np.zeros((3, 3))
    k[1, 2] = -(lh2 * (1 + lh1) + L2)
    k[2, 2] = -(L3 - lh1 * lh2)
    k[0, 1] = -T * b1
    k[1, 1] = lh1 + lh2 + lh1 * lh2 + T * (b1 + b2) + L1 + L2 + L3
    k[2, 1] = -(lh1 * (1 + lh2) + L1)
    k[1, 0] = -T * b2
    return KernelPolynomials(k, c)


def _small_root(a, b, c):
    """Root of a z^2 + b z + c with the smallest modulus, cancellation free."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, complex) for v in (a, b, c)))
    s = np.sqrt(b * b - 4 * a * c)
    sg = np.where(np.real(np.conj(b) * s) >= 0, 1.0, -1.0)
    q = -(b + sg * s) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(a != 0, q / a, np.inf)
        r2 = np.where(q != 0, c / q, np.where(b != 0, -c / b, 0))
    out = np.where(np.abs(r1) < np.abs(r2), r1, r2)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class BranchPoints:
    x: np.ndarray
    y: np.ndarray


def _ordered_real_roots(poly, label):
    r = P.polyroots(np.trim_zeros(poly, "b"))
    if len(r) != 4 or np.any(np.abs(r.imag) > 1e-9 * (1 + np.abs(r.real))):
        raise KernelAssumptionError(f"{label}: expected four real branch points, got {r}")
    r = np.sort(r.real)
    # Newton polish on the quartic
    dp = P.polyder(poly)
    for _ in range(3):
        step = P.polyval(r, poly) / P.polyval(r, dp)
        r = r - np.where(np.isfinite(step), step, 0)
    if not (0 < r[0] < r[1] <= 1 + 1e-12 and 1 < r[2] < r[3]):
        raise KernelAssumptionError(f"{label}: branch points {r} violate 0<r1<r2<=1<r3<r4")
    return r


def branch_points(kern: KernelPolynomials) -> BranchPoints:
    return BranchPoints(_ordered_real_roots(kern.discriminant_x(), "D_x"),
                        _ordered_real_roots(kern.discriminant_y(), "D_y"))


@dataclass(frozen=True)
class Contour:
    """Closed contour traced by X0(y) as y runs over the cut [y1, y2].

    Samples are in polar form x = rho * exp(i phi), with `cut_points` the
    point of the cut each sample comes from. On the contour |x|^2 equals
    Tb1 / (c1 + c3 y); `m(delta)` and `zeta(delta)` express the same relation
    through the real part delta = Re x, which is single valued only while
    Re X0 is monotone along the cut.
    """
    which: str
    kernel: KernelPolynomials
    cut: tuple
    beta0: float
    beta1: float
    phi: np.ndarray
    rho: np.ndarray
    delta: np.ndarray
    cut_points: np.ndarray

    @property
    def points(self):
        return self.rho * np.exp(1j * self.phi)

    def zeta(self, delta):
        """Point of the cut on the small-root branch of the real-part relation."""
        k = self.kernel
        delta = np.asarray(delta, float)
        k1 = k.c2 + 2 * delta * k.c3
        k2 = k.S - 2 * delta * k.c1
        disc = np.sqrt(np.maximum(k2 * k2 - 4 * k.Tb[1] * k1, 0.0))
        # stable form of (k2 - disc) / (2 k1)
        return 2 * k.Tb[1] / (k2 + disc)

    def modulus_sq(self, y):
        """|X0(y)|^2 for y on the cut."""
        k = self.kernel
        return k.Tb[0] / (k.c1 + k.c3 * np.asarray(y, float))

    def m(self, delta):
        return self.modulus_sq(self.zeta(delta))

    def real_part_relation(self, delta, y):
        """Residual of the quadratic tying Re x = delta to the cut point y."""
        k = self.kernel
        return (k.c2 + 2 * delta * k.c3) * y * y - (k.S - 2 * delta * k.c1) * y + k.Tb[1]

    def _polar(self, y):
        """(|arg X0(y)|, Re X0(y)) at cut points."""
        a, b, c = self.kernel.abc_hat(np.asarray(y, float))
        im = np.sqrt(np.maximum(4 * a * c - b * b, 0.0)) / (2 * np.abs(a))
        re = -b / (2 * a)
        return np.arctan2(im, re), re

    def cut_point(self, phi, iters=64):
        """Cut point whose image has argument +-phi.

        |arg X0| falls monotonically from pi at y1 to 0 at y2 and behaves like
        a square root at both ends, so bisect in u with
        y = y1 + (y2 - y1) (1 - cos u) / 2, where the angle is smooth.
        """
        ang = np.abs(np.angle(np.exp(1j * np.atleast_1d(np.asarray(phi, float)))))
        y1, y2 = self.cut
        to_y = lambda u: y1 + (y2 - y1) * 0.5 * (1 - np.cos(u))
        lo = np.zeros(ang.shape)
        hi = np.full(ang.shape, np.pi)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            above = self._polar(to_y(mid))[0] > ang
            lo, hi = np.where(above, mid, lo), np.where(above, hi, mid)
        return to_y(0.5 * (lo + hi))

    def real_part(self, phi):
        return self._polar(self.cut_point(phi))[1]

    def radius(self, phi):
        """Polar radius of the contour at the given angles."""
        return np.sqrt(self.modulus_sq(self.cut_point(phi)))

    def to_csv(self, path):
        x = self.points
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi_rad", "rho", "re", "im", "cut_point"])
            for row in zip(self.phi, self.rho, x.real, x.imag, self.cut_points):
                w.writerow([repr(float(v)) for v in row])


def contour(kern: KernelPolynomials, which="M", grid_size=512) -> Contour:
    """Contour M (x plane) or L (y plane, from the relabelled kernel)."""
    if which == "L":
        kern = kern.swapped()
    elif which != "M":
        raise ValueError(f"unknown contour {which!r}")
    ys = _ordered_real_roots(kern.discriminant_y(), "D_y")
    y1, y2 = ys[0], ys[1]

    def ratio(y):
        a, _, c = kern.abc_hat(y)
        return c / a

    beta0 = float(np.sqrt(ratio(y2)))
    beta1 = float(-np.sqrt(ratio(y1)))
    empty = np.array([])
    c = Contour(which, kern, (y1, y2), beta0, beta1, empty, empty, empty, empty)
    phi = 2 * np.pi * np.arange(grid_size) / grid_size
    y = c.cut_point(phi)
    ang, re = c._polar(y)
    rho = np.sqrt(c.modulus_sq(y))
    # at the branch points the discriminant is pure roundoff, so the angle
    # carries sqrt(eps) noise there while rho stays exact
    err = np.abs(ang - np.abs(np.angle(np.exp(1j * phi))))
    if np.any(err > 1e-6):
        raise ContourError(f"angle inversion failed: max error {err.max():.3g}")
    return Contour(which, kern, (y1, y2), beta0, beta1, phi, rho, re, y)


def unit_circle_check(kern: KernelPolynomials, n=720):
    """max |X0(y)| over |y|=1, y != 1, and |X0(1) - 1|."""
    th = 2 * np.pi * np.arange(1, n) / n
    return float(np.max(np.abs(kern.root_X0(np.exp(1j * th))))), abs(kern.root_X0(1.0) - 1)
