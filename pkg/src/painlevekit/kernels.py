"""Limiting correlation kernels: sine, Bessel and the Painleve V kernel.

The Painleve V kernel is built from the pair (Phi_1, Phi_2), itself read off
X_alpha at z = 1/2 - 2iu/s (tau < 0, s = sqrt(-tau)) or z = 2u/|s| + 1/2
(tau > 0, s = -i sqrt(tau)).  Only integer alpha (tau < 0) and even alpha
(tau > 0) are available; other alpha need a numerical RH solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import mpmath

from . import numkit, schlesinger
from .errors import DomainError, InternalConsistencyError, UnsupportedError


def sine_kernel(u, v, bits: int = numkit.DEFAULT_BITS):
    """sin(pi (u - v)) / (pi (u - v)), equal to 1 on the diagonal."""
    ctx = numkit.context(bits)
    d = ctx.pi * (ctx.convert(u) - ctx.convert(v))
    if d == 0:
        return ctx.mpf(1)
    return ctx.sin(d) / d


def _bessel_hat(nu, x, ctx):
    return numkit.bessel_j_scaled(nu, x, ctx.prec)


def bessel_kernel(alpha, u, v, bits: int = numkit.DEFAULT_BITS):
    """pi sqrt(uv) [J_{a+1/2}(pi u) J_{a-1/2}(pi v) - J_{a-1/2}(pi u) J_{a+1/2}(pi v)] / (2 (u - v)).

    Written through the entire functions J_nu(x) / (x/2)^nu, so that

        K = pi (pi/2)^{2a} (uv)^a [u Jh_{a+1/2}(pi u) Jh_{a-1/2}(pi v)
                                   - v Jh_{a-1/2}(pi u) Jh_{a+1/2}(pi v)] / (2 (u - v)).

    This form is used for every u, v != 0 with (uv)^a read as |uv|^a, which is
    the continuation matching the tau -> 0 limit of the Painleve V kernel when
    u and v have opposite signs.  Close to the diagonal the bracket is
    evaluated with extra bits, and on the diagonal through its derivative.
    """
    ctx = numkit.context(bits)
    u = ctx.convert(u)
    v = ctx.convert(v)
    a = ctx.convert(alpha)
    if a <= -0.5:
        raise DomainError("alpha must exceed -1/2")
    if u == 0 or v == 0:
        raise DomainError("the Bessel kernel is evaluated off u = 0 and v = 0")
    diff = abs(u - v)
    extra = 0 if diff == 0 else max(0, int(-ctx.log(diff / max(abs(u), 1), 2)) + 8)
    w = numkit.context(bits + 16 + extra)
    u, v, a = w.convert(u), w.convert(v), w.convert(a)
    pref = w.pi * (w.pi / 2) ** (2 * a) * abs(u * v) ** a / 2
    if u == v:
        # d/dv of the bracket at v = u, with Jh'(x) = -x Jh_{nu+1}(x) / 2
        x = w.pi * u
        jp = _bessel_hat(a + 0.5, x, w)
        jm = _bessel_hat(a - 0.5, x, w)
        djp = -x * _bessel_hat(a + 1.5, x, w) / 2
        djm = -x * _bessel_hat(a + 0.5, x, w) / 2
        # bracket(v) = u Jp(u) Jm(v) - v Jm(u) Jp(v); K = pref * bracket / (u - v)
        dbr = u * jp * w.pi * djm - jm * jp - u * jm * w.pi * djp
        val = -pref * dbr
    else:
        xu, xv = w.pi * u, w.pi * v
        br = u * _bessel_hat(a + 0.5, xu, w) * _bessel_hat(a - 0.5, xv, w) - v * _bessel_hat(
            a - 0.5, xu, w
        ) * _bessel_hat(a + 0.5, xv, w)
        val = pref * br / (u - v)
    return +ctx.convert(w.re(val) if isinstance(val, mpmath.mpc) else val)


# ---------------------------------------------------------------------------
# Phi pair


def _check_alpha_tau(alpha, tau):
    alpha = numkit.exact(alpha)
    if int(alpha) != alpha or alpha < 0:
        raise UnsupportedError("non-integer alpha requires a numerical RH solver")
    if tau == 0:
        raise DomainError("tau = 0 has no Phi pair; the kernel there is the Bessel kernel")
    if tau > 0 and int(alpha) % 2:
        raise UnsupportedError("tau > 0 needs even alpha")


@dataclass(frozen=True)
class PhiPair:
    """u -> (Phi_1(u; tau), Phi_2(u; tau)) for integer alpha."""

    alpha: int
    tau: object
    bits: int = numkit.DEFAULT_BITS
    _x: object = field(default=None, repr=False, compare=False)

    @staticmethod
    def create(alpha, tau, bits: int = numkit.DEFAULT_BITS) -> "PhiPair":
        ctx = numkit.context(bits)
        tau = ctx.convert(tau)
        _check_alpha_tau(alpha, tau)
        alpha = int(alpha)
        s = ctx.sqrt(-tau) if tau < 0 else ctx.mpc(0, -ctx.sqrt(tau))
        x = schlesinger.build(alpha, s, bits + 16)
        return PhiPair(alpha, tau, bits, x)

    @property
    def s(self):
        return self._x.s

    def singular_points(self):
        """u-values where Phi is singular on the real line (tau > 0 only)."""
        if self.tau < 0:
            return ()
        c = numkit.context(self.bits).sqrt(self.tau) / 4
        return (-c, c)

    def _locate(self, u):
        """(z, dz/du, side, column vector) for the real point u."""
        w = self._x.ctx
        u = w.convert(u)
        s = self._x.s
        a = self.alpha
        if self.tau < 0:
            dz = -2j / s
            # u > 0 is the lower half plane; u = 0 is reached from there
            if u >= 0:
                vec = (w.expjpi(-w.mpf(a) / 2), -w.expjpi(w.mpf(a) / 2))
            else:
                vec = (w.expjpi(w.mpf(a) / 2), -w.expjpi(-w.mpf(a) / 2))
            if u == 0:
                return w.mpf(1) / 2, dz, "-", vec
            return w.mpc(w.mpf(1) / 2, -2 * u / s), dz, None, vec
        mod = abs(s)
        z = 2 * u / mod + w.mpf(1) / 2
        dz = 2 / mod
        if z == 0 or z == 1:
            raise DomainError(f"u = {mpmath.nstr(u, 12)} is a singular point of the Phi pair")
        if 0 < z < 1:
            return z, dz, "+", (w.mpf(1), w.mpf(-1))
        sign = -1 if (a // 2) % 2 else 1
        return z, dz, None, (w.mpf(sign), w.mpf(-sign))

    def __call__(self, u):
        z, _, side, vec = self._locate(u)
        X = schlesinger.evaluate(self._x, z, side)
        ctx = numkit.context(self.bits)
        return tuple(+ctx.convert(X[i][0] * vec[0] + X[i][1] * vec[1]) for i in range(2))

    def with_derivative(self, u):
        """((Phi_1, Phi_2), (Phi_1', Phi_2')) at working precision."""
        z, dz, side, vec = self._locate(u)
        X, dX = schlesinger.evaluate_with_derivative(self._x, z, side)
        phi = tuple(X[i][0] * vec[0] + X[i][1] * vec[1] for i in range(2))
        dphi = tuple((dX[i][0] * vec[0] + dX[i][1] * vec[1]) * dz for i in range(2))
        return phi, dphi


def phi_pair(alpha, tau, u, bits: int = numkit.DEFAULT_BITS):
    """(Phi_1(u; tau), Phi_2(u; tau))."""
    return PhiPair.create(alpha, tau, bits)(u)


# ---------------------------------------------------------------------------
# Painleve V kernel


def _imag_check(val, ctx, scale):
    tol = ctx.ldexp(1, -ctx.prec // 2) * max(scale, 1)
    if abs(ctx.im(val)) > tol:
        raise InternalConsistencyError(f"kernel value has imaginary part {mpmath.nstr(ctx.im(val), 5)}")
    return ctx.re(val)


def pv_kernel(alpha, tau, u, v, bits: int = numkit.DEFAULT_BITS):
    """[Phi_1(pi v) Phi_2(pi u) - Phi_1(pi u) Phi_2(pi v)] / (2 pi i (u - v)).

    The pi scaling of the arguments is applied here.  For tau = 0 the value is
    the Bessel kernel.  Near the diagonal the cancellation is absorbed by
    extra working bits; on the diagonal the derivative of Phi is used.
    """
    ctx = numkit.context(bits)
    tau = ctx.convert(tau)
    if tau == 0:
        return bessel_kernel(alpha, u, v, bits)
    u = ctx.convert(u)
    v = ctx.convert(v)
    diff = abs(u - v)
    extra = 0 if diff == 0 else max(0, int(-ctx.log(diff / max(abs(u), abs(v), 1), 2)))
    wb = bits + 16 + extra
    pp = PhiPair.create(alpha, tau, wb)
    w = pp._x.ctx
    pi = w.pi
    if diff == 0:
        (p1, p2), (d1, d2) = pp.with_derivative(pi * u)
        val = (p1 * d2 - d1 * p2) / 2j
    else:
        (a1, a2), _ = pp.with_derivative(pi * u)
        (b1, b2), _ = pp.with_derivative(pi * v)
        val = (b1 * a2 - a1 * b2) / (2j * pi * (u - v))
    val = _imag_check(w.convert(val), w, 1)
    return +ctx.convert(val)


@dataclass(frozen=True)
class KernelEval:
    """A kernel of a given kind with its parameters bound."""

    kind: str
    alpha: object = 0
    tau: object = 0
    bits: int = numkit.DEFAULT_BITS
    evaluator: Callable = field(default=None, repr=False, compare=False)

    def __call__(self, u, v):
        return self.evaluator(u, v)


def kernel(kind: str, alpha=0, tau=0, bits: int = numkit.DEFAULT_BITS) -> KernelEval:
    if kind == "sine":
        return KernelEval("sine", 0, 0, bits, lambda u, v: sine_kernel(u, v, bits))
    if kind == "bessel":
        return KernelEval("bessel", alpha, 0, bits, lambda u, v: bessel_kernel(alpha, u, v, bits))
    if kind == "pv":
        if tau != 0:
            _check_alpha_tau(alpha, numkit.context(bits).convert(tau))
        return KernelEval("pv", alpha, tau, bits, lambda u, v: pv_kernel(alpha, tau, u, v, bits))
    raise DomainError(f"unknown kernel kind {kind!r}")
