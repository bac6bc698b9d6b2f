"""One-cut equilibrium measures for polynomial potentials.

For a polynomial V the density on [a, b] is

    psi_V(x) = sqrt((b - x)(x - a)) h(x),
    h(x) = (1 / 2pi) * polynomial part of V'(x) / sqrt((x - a)(x - b)) at infinity,

and the endpoints solve the two moment conditions

    int V'(x) / sqrt((b - x)(x - a)) dx = 0,
    (1 / 2pi) int x V'(x) / sqrt((b - x)(x - a)) dx = 1.

With x = c + d cos(theta) both integrals are finite sums, so the endpoint
equations are polynomial in (c, d) and h is an exact polynomial.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import mpmath

from . import numkit
from .errors import DomainError, NotOneCutError, UnsupportedError

@dataclass(frozen=True)
class PotentialSpec:
    """V(x) = sum_k coeffs[k] x^k with even degree >= 2 and positive leading coefficient."""

    coeffs: Tuple

    def __post_init__(self):
        cs = list(self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        deg = len(cs) - 1
        if deg < 2 or deg % 2:
            raise DomainError("V must be a polynomial of even degree >= 2")
        cs = [numkit.exact(c) for c in cs]
        if not cs[-1] > 0:
            raise DomainError("the leading coefficient of V must be positive")
        object.__setattr__(self, "coeffs", tuple(cs))

    @staticmethod
    def parse(text: str) -> "PotentialSpec":
        """'c0,c1,c2,...' (low degree first)."""
        try:
            cs = [Fraction(p.strip()) for p in text.split(",") if p.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse potential coefficients {text!r}") from exc
        return PotentialSpec(tuple(cs))

    @staticmethod
    def gaussian() -> "PotentialSpec":
        """V(x) = 2 x^2, whose equilibrium measure is the semicircle on [-1, 1]."""
        return PotentialSpec((0, 0, 2))

    @staticmethod
    def shifted_gaussian(u) -> "PotentialSpec":
        """V(x) = 2 (x + u)^2."""
        u = numkit.exact(u)
        return PotentialSpec((2 * u * u, 4 * u, 2))

    def poly(self, ctx) -> numkit.PolySeries:
        return numkit.PolySeries([numkit.to_ctx(c, ctx) for c in self.coeffs])

    def V(self, x, ctx):
        return self.poly(ctx)(ctx.convert(x))

    def dV(self, ctx) -> numkit.PolySeries:
        return self.poly(ctx).derivative()

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])


def _cos_moments(k: int, c, d, ctx):
    """I_j = (1/pi) int_0^pi (c + d cos t)^j dt for j = 0..k."""
    out = []
    for j in range(k + 1):
        acc = ctx.mpf(0)
        for m in range(0, j + 1, 2):
            acc += math.comb(j, m) * c ** (j - m) * d ** m * ctx.mpf(math.comb(m, m // 2)) / 2 ** m
        out.append(acc)
    return out


def _endpoint_equations(dv: Sequence, c, d, ctx):
    k = len(dv)
    I = _cos_moments(k, c, d, ctx)
    f1 = sum(dv[j] * I[j] for j in range(k))
    f2 = sum(dv[j] * I[j + 1] for j in range(k)) / 2 - 1
    # derivatives: dI_j/dc = j I_{j-1}, dI_j/dd = j (I_j - c I_{j-1}) / d
    dIc = [0] + [j * I[j - 1] for j in range(1, k + 1)]
    dId = [0] + [j * (I[j] - c * I[j - 1]) / d for j in range(1, k + 1)]
    J = [
        [sum(dv[j] * dIc[j] for j in range(k)), sum(dv[j] * dId[j] for j in range(k))],
        [sum(dv[j] * dIc[j + 1] for j in range(k)) / 2, sum(dv[j] * dId[j + 1] for j in range(k)) / 2],
    ]
    return (f1, f2), J


def _solve_endpoints(V: PotentialSpec, ctx, max_iter: int = 200):
    dv = list(V.dV(ctx).coeffs)
    tol = ctx.ldexp(1, -ctx.prec + 12)

    def newton(c, d):
        for _ in range(max_iter):
            (f1, f2), J = _endpoint_equations(dv, c, d, ctx)
            det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
            if det == 0:
                return None
            dc = (f1 * J[1][1] - f2 * J[0][1]) / det
            dd = (J[0][0] * f2 - J[1][0] * f1) / det
            lam = ctx.mpf(1)
            # damping keeps d positive
            while d - lam * dd <= 0 and lam > ctx.mpf(2) ** -30:
                lam /= 2
            c, d = c - lam * dc, d - lam * dd
            if abs(dc) + abs(dd) <= tol * (abs(c) + abs(d)):
                (f1, f2), _ = _endpoint_equations(dv, c, d, ctx)
                return c, d
        return None

    for d0 in (1, 2, 0.5, 4, 0.25, 8):
        res = newton(ctx.mpf(0), ctx.mpf(d0))
        if res is not None:
            return res
    raise NotOneCutError("Newton iteration for the endpoints did not converge")


def _h_poly(V: PotentialSpec, a, b, ctx) -> numkit.PolySeries:
    """(1/2pi) times the polynomial part of V'(x) / sqrt((x-a)(x-b)) at infinity."""
    dv = list(V.dV(ctx).coeffs)
    n = len(dv)
    # 1/sqrt((x-a)(x-b)) = sum_k e_k x^{-1-k}
    ea = numkit.binomial_series(ctx.mpf(-1) / 2, n, ctx.prec, sign=-1)
    eb = numkit.binomial_series(ctx.mpf(-1) / 2, n, ctx.prec, sign=-1)
    ea = numkit.PolySeries([ea[k] * a ** k for k in range(n + 1)], n)
    eb = numkit.PolySeries([eb[k] * b ** k for k in range(n + 1)], n)
    e = (ea * eb).coeffs
    out = []
    for m in range(n - 1):
        out.append(sum(dv[j] * e[j - 1 - m] for j in range(m + 1, n)) / (2 * ctx.pi))
    return numkit.PolySeries(out)


@dataclass(frozen=True)
class EquilibriumMeasure:
    V: PotentialSpec
    a: object
    b: object
    h: numkit.PolySeries
    psi0: object
    ell: object
    bits: int = numkit.DEFAULT_BITS

    @property
    def ctx(self):
        return numkit.context(self.bits)

    def psi(self, x):
        """Density psi_V(x) (zero off [a, b])."""
        ctx = self.ctx
        x = ctx.convert(x)
        if not (self.a < x < self.b):
            return ctx.mpf(0)
        return ctx.sqrt((self.b - x) * (x - self.a)) * self.h(x)

    def mass(self):
        ctx = self.ctx
        return numkit.quad(self.psi, self.a, self.b, scheme="endpoint-singular", bits=self.bits)

    def log_potential(self, x):
        """2 int log|x - y| dmu(y)."""
        ctx = self.ctx
        x = ctx.convert(x)
        f = lambda y: ctx.log(abs(x - y)) * ctx.sqrt(abs((self.b - y) * (y - self.a))) * self.h(y)
        pts = [x] if self.a < x < self.b else []
        return 2 * numkit.quad(f, self.a, self.b, scheme="endpoint-singular", bits=self.bits, points=pts)

    def slack(self, x):
        """V(x) - ell - 2 int log|x - y| dmu(y) for x off the support.

        Uses |d/dx slack| = 2 pi h(x) sqrt((x - a)(x - b)), integrated from
        the nearest endpoint (sqrt taken positive), which avoids the logarithmic
        integral.
        """
        ctx = self.ctx
        x = ctx.convert(x)
        if self.a <= x <= self.b:
            return ctx.mpf(0)
        g = lambda t: 2 * ctx.pi * self.h(t) * ctx.sqrt((t - self.a) * (t - self.b))
        if x > self.b:
            return numkit.quad(g, self.b, x, scheme="endpoint-singular", bits=self.bits)
        return numkit.quad(g, x, self.a, scheme="endpoint-singular", bits=self.bits)


def solve_one_cut(V: PotentialSpec, bits: int = numkit.DEFAULT_BITS, check_points: int = 24) -> EquilibriumMeasure:
    """Endpoints, density factor h, psi_V(0) and the Lagrange constant ell."""
    wb = bits + 32
    ctx = numkit.context(wb)
    c, d = _solve_endpoints(V, ctx)
    a, b = c - d, c + d
    if not (a < 0 < b):
        raise UnsupportedError(f"support [{mpmath.nstr(a, 8)}, {mpmath.nstr(b, 8)}] does not contain 0 in its interior")
    h = _h_poly(V, a, b, ctx)
    # a zero of h lost in rounding still marks a critical (non-regular) potential
    floor = ctx.ldexp(1, -bits // 2) * h.max_abs()
    for j in range(check_points + 1):
        x = a + (b - a) * j / check_points
        if not h(x) > floor:
            raise NotOneCutError(f"h vanishes or is negative at x = {mpmath.nstr(x, 8)}: not one-cut regular")
    out = numkit.context(bits)
    hp = numkit.PolySeries([+out.convert(cf) for cf in h.coeffs])
    psi0 = out.sqrt(-a * b) * hp(0)
    # ell from the equality at the right endpoint
    tmp = EquilibriumMeasure(V, +out.convert(a), +out.convert(b), hp, +psi0, 0, bits)
    ell = V.V(tmp.b, out) - tmp.log_potential(tmp.b)
    meas = EquilibriumMeasure(V, tmp.a, tmp.b, hp, tmp.psi0, ell, bits)
    width = meas.b - meas.a
    for k in range(1, 7):
        for x in (meas.b + width * k / 4, meas.a - width * k / 4):
            if not meas.slack(x) > 0:
                raise NotOneCutError(f"variational inequality fails at x = {mpmath.nstr(x, 8)}")
    return meas


def el_residual(meas: EquilibriumMeasure, x):
    """Equality residual on the support, inequality violation (>= 0) off it."""
    ctx = meas.ctx
    x = ctx.convert(x)
    if meas.a <= x <= meas.b:
        return abs(meas.log_potential(x) - meas.V.V(x, ctx) + meas.ell)
    return max(ctx.mpf(0), -meas.slack(x))


@dataclass(frozen=True)
class ScalingParams:
    n: int
    t: object
    z0: object
    s_nt: object
    s_hat_nt: object
    tau_nt: object


def scaling(meas: EquilibriumMeasure, n: int, t, bits: int = None) -> ScalingParams:
    """s_{n,t}, its linearisation s_hat and tau_{n,t} = 16 pi^2 psi_V(0)^2 n^2 t."""
    bits = bits or meas.bits
    ctx = numkit.context(bits)
    t = ctx.convert(t)
    if t == 0:
        z = ctx.mpf(0)
        return ScalingParams(n, t, z, z, z, z)
    z0 = ctx.sqrt(t) if t > 0 else ctx.mpc(0, ctx.sqrt(-t))
    if abs(z0) >= min(-meas.a, meas.b):
        raise DomainError("|t| is too large: [-z0, z0] leaves the support")
    a, b = meas.a, meas.b

    def f(x):
        # x runs over [-1, 1]; s = x z0
        s = x * z0
        return meas.h(s) * ctx.sqrt((s - a) * (b - s)) * z0

    integral = numkit.quad(f, -1, 1, bits=bits)
    s_nt = -2j * ctx.pi * n * integral
    if t < 0:
        s_nt = ctx.re(s_nt)
    else:
        s_nt = ctx.mpc(0, ctx.im(s_nt))
    s_hat = -4j * ctx.pi * n * z0 * meas.psi0
    if t < 0:
        s_hat = ctx.re(s_hat)
    else:
        s_hat = ctx.mpc(0, ctx.im(s_hat))
    tau = 16 * ctx.pi ** 2 * meas.psi0 ** 2 * n * n * t
    return ScalingParams(n, t, z0, s_nt, s_hat, tau)
