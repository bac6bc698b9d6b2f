"""The Painleve V functions sigma_alpha^-(s) and sigma_alpha^+(s).

Three evaluation routes are offered:

* closed forms for alpha in {0, 1, 2};
* the Schlesinger recursion, sigma = s*q(s) - alpha*s/2, for integer alpha on
  the real ray and even alpha on the negative imaginary ray;
* a Taylor-series integrator for the sigma-form, seeded from the large-s
  behaviour, for other alpha.

Derivatives of recursion values are Taylor coefficients read off a small
circle of samples around s (the recursion is analytic in s), so no real
finite differences are involved.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath

from . import numkit, schlesinger
from .errors import DomainError, IntegrationFailedError, PrecisionExhaustedError, UnsupportedError
from .numkit import PolySeries

log = logging.getLogger(__name__)

FAMILIES = ("minus", "plus")


def _check_family(family: str) -> None:
    if family not in FAMILIES:
        raise DomainError(f"family must be 'minus' or 'plus', got {family!r}")


def _check_ray(family: str, s, ctx) -> None:
    s = ctx.convert(s)
    if family == "minus" and not (ctx.im(s) == 0 and ctx.re(s) > 0):
        raise DomainError("family 'minus' needs s > 0")
    if family == "plus" and not (ctx.re(s) == 0 and ctx.im(s) < 0):
        raise DomainError("family 'plus' needs s on the negative imaginary axis")


def on_ray(family: str, magnitude, bits: int = numkit.DEFAULT_BITS):
    """The point of the family's ray at distance ``magnitude`` from 0."""
    ctx = numkit.context(bits)
    m = ctx.convert(magnitude)
    return m if family == "minus" else ctx.mpc(0, -m)


# ---------------------------------------------------------------------------
# Taylor coefficients from samples on a circle


def taylor_from_circle(
    func: Callable, s, order: int, bits: int, rho=None, nodes: int = 32, max_nodes: int = 256
) -> List[PolySeries]:
    """Taylor coefficients through ``order`` of each component of ``func`` at ``s``.

    The trapezoid rule on |xi - s| = rho gives the coefficients; the same
    samples with every other node dropped give an error estimate for the
    coarse rule, whose square bounds the fine rule's error under geometric
    convergence.  The node count doubles until that bound meets the target.
    """
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    if rho is None:
        rho = min(abs(s) / 4, ctx.mpf(1) / 2)
    rho = ctx.convert(rho)
    tol = ctx.ldexp(1, -(bits * 7) // 8)
    cache = {}

    def sample(j, n):
        key = ctx.mpf(j) / n
        if key not in cache:
            v = func(s + rho * ctx.expjpi(2 * key))
            cache[key] = v if isinstance(v, (tuple, list)) else (v,)
        return cache[key]

    n = nodes
    while True:
        vals = [sample(j, n) for j in range(n)]
        m = len(vals[0])

        def coeffs(stride):
            nn = n // stride
            out = []
            for comp in range(m):
                cs = []
                for k in range(order + 1):
                    acc = 0
                    for j in range(nn):
                        acc += vals[j * stride][comp] * ctx.expjpi(-2 * ctx.mpf(j * k) / nn)
                    cs.append(acc / nn / rho ** k)
                out.append(cs)
            return out

        fine = coeffs(1)
        coarse = coeffs(2)
        err = 0
        for comp in range(m):
            scale = max(max(abs(c) * rho ** k for k, c in enumerate(fine[comp])), 1)
            for k in range(order + 1):
                err = max(err, abs(fine[comp][k] - coarse[comp][k]) * rho ** k / scale)
        # geometric convergence: the fine rule's error is about the square of
        # the coarse rule's, which is what err measures
        if err * err <= tol or n >= max_nodes:
            if err * err > tol:
                log.warning("circle Taylor coefficients settled only to %s", mpmath.nstr(err, 3))
            return [PolySeries(fine[comp], order) for comp in range(m)]
        n *= 2


def _real_if_real(values, s, ctx):
    """Drop rounding-level imaginary parts when s is real and positive."""
    if ctx.im(ctx.convert(s)) != 0:
        return values
    return tuple(ctx.re(v) for v in values)


# ---------------------------------------------------------------------------
# closed forms


def sigma_closed(alpha: int, family: str, s, bits: int = numkit.DEFAULT_BITS):
    """(sigma, sigma', sigma'') from the explicit formulas for alpha = 0, 1, 2."""
    _check_family(family)
    if alpha not in (0, 1, 2):
        raise UnsupportedError("closed forms exist for alpha in {0, 1, 2} only")
    if alpha == 1 and family == "plus":
        raise UnsupportedError("sigma_1^+ has no closed form (odd alpha on the imaginary ray)")
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    _check_ray(family, s, ctx)
    if alpha == 0:
        z = ctx.mpf(0)
        return (z, z, z)
    g = 24 + (int(math.ceil(8 * math.log2(4.0 / float(abs(s))))) if abs(s) < 4 else 0)
    w = numkit.context(bits + g)
    s = w.convert(s)
    E = w.exp(s)
    if alpha == 1:
        D = E - 1
        sig = s / D
        d1 = 1 / D - s * E / D ** 2
        d2 = E / D ** 3 * ((s - 2) * E + 2 + s)
    else:
        N = -2 + E * (2 - 2 * s + s * s)
        N1 = E * s * s
        N2 = E * (s * s + 2 * s)
        D = 1 - E * (2 + s * s) + E * E
        D1 = -E * (2 + 2 * s + s * s) + 2 * E * E
        D2 = -E * (4 + 4 * s + s * s) + 4 * E * E
        F, F1, F2 = s * N, N + s * N1, 2 * N1 + s * N2
        sig = F / D
        d1 = (F1 * D - F * D1) / D ** 2
        d2 = (F2 * D - F * D2) / D ** 2 - 2 * D1 * (F1 * D - F * D1) / D ** 3
    out = tuple(+ctx.convert(v) for v in (sig, d1, d2))
    return _real_if_real(out, s, ctx)


# ---------------------------------------------------------------------------
# recursion route


def sigma_from_recursion(alpha: int, s, bits: int = numkit.DEFAULT_BITS, family: str = "any"):
    """sigma = s q(s) - alpha s / 2 with q read off X_alpha at infinity."""
    x = schlesinger.build(alpha, s, bits, family=family)
    ctx = x.ctx
    q = schlesinger.infinity_data(x).q
    val = x.s * q - ctx.mpf(alpha) * x.s / 2
    return +numkit.context(bits).convert(val)


def sigma_recursive(alpha: int, family: str, s, bits: int = numkit.DEFAULT_BITS):
    """(sigma, sigma', sigma'') of sigma_alpha^family at s via the recursion."""
    _check_family(family)
    alpha = numkit.exact(alpha)
    if int(alpha) != alpha or alpha < 0:
        raise UnsupportedError("the recursion needs integer alpha >= 0")
    alpha = int(alpha)
    if family == "plus" and alpha % 2:
        raise UnsupportedError("sigma_alpha^+ from the recursion needs even alpha")
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    _check_ray(family, s, ctx)
    if alpha == 0:
        z = ctx.mpf(0)
        return (z, z, z)
    wb = bits + 32
    # a small circle keeps the node count low; the agreement test still guards accuracy
    rho = min(abs(s) / 16, ctx.mpf(1) / 8)
    (ser,) = taylor_from_circle(lambda xi: sigma_from_recursion(alpha, xi, wb), s, 2, wb, rho=rho, nodes=32)
    out = (+ctx.convert(ser[0]), +ctx.convert(ser[1]), +ctx.convert(2 * ser[2]))
    return _real_if_real(out, s, ctx)


# ---------------------------------------------------------------------------
# solution objects


@dataclass(frozen=True)
class SigmaSolution:
    """Evaluator s -> (sigma, sigma', sigma'') with its provenance."""

    alpha: object
    family: str
    provenance: str
    bits: int
    evaluator: Callable = field(repr=False, compare=False)
    domain: Optional[Tuple] = None
    value_evaluator: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __call__(self, s):
        return self.evaluator(s)

    def value(self, s):
        """sigma alone, skipping derivative work where the route allows it."""
        if self.value_evaluator is not None:
            return self.value_evaluator(s)
        return self.evaluator(s)[0]


def sigma_solution(alpha, family: str, bits: int = numkit.DEFAULT_BITS, provenance: str = "auto") -> SigmaSolution:
    """Pick the best exact route for (alpha, family)."""
    _check_family(family)
    alpha = numkit.exact(alpha)
    integral = alpha == int(alpha) and alpha >= 0
    if provenance == "auto":
        if integral and int(alpha) in (0, 1, 2) and not (family == "plus" and int(alpha) == 1):
            provenance = "closed-form"
        elif integral and (family == "minus" or int(alpha) % 2 == 0):
            provenance = "recursion"
        else:
            raise UnsupportedError(
                f"no exact route for alpha={alpha}, family={family}; use integrate_sigma for an ODE solution"
            )
    if provenance == "closed-form":
        a = int(alpha)
        return SigmaSolution(a, family, provenance, bits, lambda s: sigma_closed(a, family, s, bits))
    if provenance == "recursion":
        a = int(alpha)
        return SigmaSolution(
            a,
            family,
            provenance,
            bits,
            lambda s: sigma_recursive(a, family, s, bits),
            value_evaluator=lambda s: _real_if_real((sigma_from_recursion(a, s, bits, family=family),), s, numkit.context(bits))[0],
        )
    raise DomainError(f"unknown provenance {provenance!r}")


def sigma_form_residual(sol, s, alpha=None):
    """|(s s'')^2 - (sig - s sig' + 2 sig'^2 + 2 alpha sig')^2 + 4 sig'^2 (sig' + alpha)^2|.

    ``sol`` is a :class:`SigmaSolution` or a (sigma, sigma', sigma'') triple
    (then ``alpha`` is required).
    """
    if isinstance(sol, SigmaSolution):
        alpha = sol.alpha
        sig, d1, d2 = sol(s)
        bits = sol.bits
    else:
        sig, d1, d2 = sol
        bits = numkit.DEFAULT_BITS
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    a = ctx.convert(alpha)
    lhs = (s * d2) ** 2
    rhs = (sig - s * d1 + 2 * d1 * d1 + 2 * a * d1) ** 2 - 4 * d1 * d1 * (d1 + a) ** 2
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Lax pair


@dataclass(frozen=True)
class LaxData:
    """Lax-pair functions u(s), v(s) built from the recursion's q, r, p."""

    alpha: int
    family: str
    bits: int = numkit.DEFAULT_BITS

    def jets(self, s):
        """Taylor series (in the offset from s) of u and v, plus q, r, p at s."""
        if self.alpha == 0:
            raise UnsupportedError("the Lax parametrisation degenerates at alpha = 0 (p vanishes identically)")
        wb = self.bits + 32
        ctx = numkit.context(wb)
        s = ctx.convert(s)
        fam = "any"

        def qrp(xi):
            x = schlesinger.build(self.alpha, xi, wb, family=fam)
            d = schlesinger.infinity_data(x)
            return (d.q, d.r, d.p)

        Q, R, P = taylor_from_circle(qrp, s, 4, wb)
        S = PolySeries([s, 1], 4)
        dP = P.derivative()
        denom = (PolySeries([1 - s, -1], 4) * P + S * dP).truncate(3)
        u = 1 + (S * P).truncate(3) * denom.reciprocal(3)
        v = ctx.mpf(self.alpha) / 2 - Q - S * R * P
        return u, v, (Q[0], R[0], P[0])

    def uv(self, s):
        u, v, _ = self.jets(s)
        return u[0], v[0]


def lax_data(alpha: int, family: str = "minus", bits: int = numkit.DEFAULT_BITS) -> LaxData:
    _check_family(family)
    alpha = numkit.exact(alpha)
    if int(alpha) != alpha or alpha < 0:
        raise UnsupportedError("Lax data from the recursion needs integer alpha")
    if family == "plus" and alpha % 2:
        raise UnsupportedError("the imaginary ray needs even alpha")
    if alpha == 0:
        raise UnsupportedError("the Lax parametrisation degenerates at alpha = 0 (p vanishes identically)")
    return LaxData(int(alpha), family, bits)


def lax_residuals(ld: LaxData, s):
    """Residuals of s u' = s u + (alpha - 2v)(u-1)^2, s v' = v (u - 1/u)(v - alpha)
    and of the Painleve V equation for u."""
    ctx = numkit.context(ld.bits + 32)
    s = ctx.convert(s)
    _check_ray(ld.family, s, ctx)
    u, v, _ = ld.jets(s)
    a = ctx.mpf(ld.alpha)
    u0, u1, u2 = u[0], u[1], 2 * u[2]
    v0, v1 = v[0], v[1]
    r_u = s * u1 - s * u0 - (a - 2 * v0) * (u0 - 1) ** 2
    r_v = s * v1 - v0 * (u0 - 1 / u0) * (v0 - a)
    rhs = (
        (1 / (2 * u0) + 1 / (u0 - 1)) * u1 ** 2
        - u1 / s
        + (1 - u0) ** 2 / s ** 2 * (a ** 2 / 2 * (u0 - 1 / u0))
        + u0 / s
        - u0 * (u0 + 1) / (2 * (u0 - 1))
    )
    r_pv = u2 - rhs
    out = numkit.context(ld.bits)
    return tuple(+out.convert(abs(r)) for r in (r_u, r_v, r_pv))


# ---------------------------------------------------------------------------
# identities at z = 0


@dataclass(frozen=True)
class FrameIdentityResult:
    log_derivative: object  # (G^-1 G')_22(0)
    predicted_log_derivative: object  # s/2 + sigma/alpha - alpha/2
    conjugation: object  # (G sigma3 G^-1)_22(0)
    predicted_conjugation: object  # 2v/alpha - 1

    @property
    def residual(self):
        return max(
            abs(self.log_derivative - self.predicted_log_derivative),
            abs(self.conjugation - self.predicted_conjugation),
        )


def frame_identity_details(alpha: int, s, bits: int = numkit.DEFAULT_BITS) -> FrameIdentityResult:
    alpha = numkit.exact(alpha)
    if int(alpha) != alpha or alpha < 1:
        raise UnsupportedError("the identity is checked for integer alpha >= 1")
    alpha = int(alpha)
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    _check_ray("minus", s, ctx)
    x = schlesinger.build(alpha, s, bits)
    w = x.ctx
    G0, G1 = schlesinger.local_frame_at_zero(x)
    Gi = schlesinger._mat_inv(G0)
    L = schlesinger._mat_mul(Gi, G1)
    C = schlesinger._mat_mul(schlesinger._mat_mul(G0, [[1, 0], [0, -1]]), Gi)
    d = schlesinger.infinity_data(x)
    sigma = x.s * d.q - w.mpf(alpha) * x.s / 2
    v = w.mpf(alpha) / 2 - d.q - x.s * d.r * d.p
    a = w.mpf(alpha)
    return FrameIdentityResult(L[1][1], x.s / 2 + sigma / a - a / 2, C[1][1], 2 * v / a - 1)


def frame_identity_check(alpha: int, s, bits: int = numkit.DEFAULT_BITS):
    """Largest residual of the two identities for G_alpha at z = 0."""
    res = frame_identity_details(alpha, s, bits)
    return +numkit.context(bits).convert(res.residual)


# ---------------------------------------------------------------------------
# ODE route


def _large_s_series(alpha, K: int, ctx) -> List:
    """Coefficients c_k of g in sigma ~ e^{-s} s^{2 alpha - 1} g(s), g = sum c_k s^{-k}.

    Solves the sigma-form with the quadratic (exponentially small) terms
    dropped, order by order in x = 1/s.
    """
    a = ctx.convert(alpha)
    c = [1 / ctx.gamma(a) ** 2]
    order = K + 3

    def residual(coeffs):
        g = PolySeries(coeffs, order)
        dx = g.derivative()
        x1 = PolySeries([0, 1], order)
        x2 = PolySeries([0, 0, 1], order)
        gs = -(x2 * dx)  # d/ds = -x^2 d/dx
        gss = -(x2 * gs.derivative())
        m = 2 * a - 1
        A = -g + x1 * g * m + gs
        B = g - x1 * g * (2 * m) - 2 * gs + x2 * g * (m * (m - 1)) + x1 * gs * (2 * m) + gss
        xg = x1 * g
        return B * B - (xg - A) * (xg - A + x1 * A * (4 * a))

    for k in range(1, K + 1):
        r0 = residual(c + [0])
        r1 = residual(c + [1])
        j = None
        for idx in range(order + 1):
            if abs(r1[idx] - r0[idx]) > ctx.ldexp(1, -ctx.prec // 2):
                j = idx
                break
        if j is None:
            raise PrecisionExhaustedError("large-s series coefficient is undetermined")
        c.append(-r0[j] / (r1[j] - r0[j]))
    return c


def large_s_seed(alpha, family: str, s, bits: int, terms: int = 24):
    """(sigma, sigma') at a large point of the ray from the asymptotic laws."""
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    a = ctx.convert(alpha)
    if family == "minus":
        c = _large_s_series(alpha, terms, ctx)
        # truncate the divergent series at its smallest term
        best = len(c)
        for k in range(1, len(c)):
            if abs(c[k] / s ** k) > abs(c[k - 1] / s ** (k - 1)) and k > 2:
                best = k
                break
        g = sum(c[k] / s ** k for k in range(best))
        gs = sum(-k * c[k] / s ** (k + 1) for k in range(best))
        F = ctx.exp(-s) * s ** (2 * a - 1)
        sig = F * g
        d1 = F * ((-1 + (2 * a - 1) / s) * g + gs)
        return sig, d1
    return a * a / 2 - a * s / 2, -a / 2


@dataclass
class _Segment:
    s0: object
    direction: object
    length: object
    coeffs: list

    def eval(self, t, ctx):
        e = t * self.direction
        sig = 0
        d1 = 0
        d2 = 0
        n = len(self.coeffs)
        for k in range(n - 1, -1, -1):
            sig = sig * e + self.coeffs[k]
        for k in range(n - 1, 0, -1):
            d1 = d1 * e + k * self.coeffs[k]
        for k in range(n - 1, 1, -1):
            d2 = d2 * e + k * (k - 1) * self.coeffs[k]
        return sig, d1, d2


def _rhs_series(S, s0, alpha, order):
    """R = (sig - s sig' + 2 sig'^2 + 2 alpha sig')^2 - 4 sig'^2 (sig' + alpha)^2 as a series."""
    sp = S.derivative().truncate(order)
    sv = S.truncate(order)
    sser = PolySeries([s0, 1], order)
    inner = sv - sser * sp + sp * sp * 2 + sp * (2 * alpha)
    return inner * inner - sp * sp * (sp + alpha) * (sp + alpha) * 4


def _taylor_step(alpha, s0, y0, y1, pred2, K: int, ctx):
    """Taylor coefficients a_0..a_K of sigma at s0 with the branch of s sigma''
    nearest ``pred2``."""
    a = [y0, y1]
    root = None
    for k in range(2, K + 1):
        S = PolySeries(a + [0], k)
        R = _rhs_series(S, s0, alpha, k - 2)
        if root is None:
            r0 = ctx.sqrt(R[0])
            cands = (r0, -r0)
            target = pred2 * s0
            root = min(cands, key=lambda r: abs(r - target))
            gap = abs(2 * r0)
            scale = max(abs(target), abs(y0), abs(s0 * y1))
            if gap <= ctx.ldexp(1, -ctx.prec // 3) * scale:
                raise IntegrationFailedError(
                    f"branch of s*sigma'' is ambiguous near s = {mpmath.nstr(s0, 12)} (s sigma'' ~ 0)", location=s0
                )
        if R[0] == 0:
            raise IntegrationFailedError(f"s*sigma'' vanishes at s = {mpmath.nstr(s0, 12)}", location=s0)
        sq = R.sqrt(root, k - 2)
        inv = PolySeries([s0, 1], k - 2).reciprocal(k - 2)
        d2 = sq * inv
        a.append(d2[k - 2] / (k * (k - 1)))
    return a


def integrate_sigma(
    alpha,
    family: str,
    s_start,
    s_end,
    boundary: str = "large-s",
    bits: int = numkit.DEFAULT_BITS,
    target_digits: Optional[int] = None,
    order: int = 28,
    max_steps: int = 20000,
) -> SigmaSolution:
    """Integrate the sigma-form from ``s_start`` to ``s_end`` along the family's ray.

    With ``boundary="large-s"`` the start value comes from the large-s law
    (exponentially small tail for the minus family, alpha^2/2 - alpha s/2 for
    the plus family).  ``boundary="small-s"`` starts at sigma = alpha^2 with
    sigma' from the value s=0 limit and is only a rough device for alpha > 1/2.
    The returned solution interpolates the Taylor segments of the integrator.
    """
    _check_family(family)
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    if a <= -0.5:
        raise DomainError("alpha must exceed -1/2")
    s_start = ctx.convert(s_start)
    s_end = ctx.convert(s_end)
    _check_ray(family, s_start, ctx)
    _check_ray(family, s_end, ctx)
    if a == 0:
        z = ctx.mpf(0)
        return SigmaSolution(alpha, family, "ode", bits, lambda s: (z, z, z), (s_start, s_end))
    digits = target_digits if target_digits is not None else numkit.bits_to_digits(bits) - 12
    wb = bits + 32
    w = numkit.context(wb)
    a = w.convert(alpha)
    if boundary == "large-s":
        y0, y1 = large_s_seed(alpha, family, s_start, wb)
        y0, y1 = w.convert(y0), w.convert(y1)
        if family == "minus":
            # the seed drops terms of relative size e^{-s} s^{2 alpha}
            dropped = w.exp(-s_start) * s_start ** (2 * a)
            if dropped > w.mpf(10) ** (-digits):
                log.warning(
                    "large-s seed at s=%s is accurate only to about %s relative; start further out",
                    mpmath.nstr(s_start, 6),
                    mpmath.nstr(dropped, 3),
                )
            sq = w.sqrt((y0 - s_start * y1) * (y0 - s_start * y1 + 4 * a * y1))
            pred2 = sq / s_start
        else:
            pred2 = w.mpf(0)
    elif boundary == "small-s":
        y0, y1 = a * a, w.mpf(0)
        pred2 = w.mpf(0)
    else:
        raise DomainError(f"unknown boundary {boundary!r}")
    total = s_end - s_start
    length = abs(total)
    direction = total / length
    tol = w.mpf(10) ** (-digits)
    segments: List[_Segment] = []
    pos = w.mpf(0)
    s0 = w.convert(s_start)
    steps = 0
    while pos < length:
        steps += 1
        if steps > max_steps:
            raise IntegrationFailedError(f"no convergence after {max_steps} steps", location=s0)
        coeffs = _taylor_step(a, s0, y0, y1, pred2, order, w)
        # relative control: the minus tails are exponentially small
        scale = max(abs(y0), abs(y1)) or w.mpf(1)
        h = None
        for k in (order - 1, order):
            ck = abs(coeffs[k])
            if ck > 0:
                hk = (tol * scale / ck) ** (w.mpf(1) / k)
                h = hk if h is None else min(h, hk)
        if h is None:
            h = length - pos
        h = h * w.exp(-w.mpf(7) / (10 * (order - 1)))
        if not w.isfinite(h) or h < w.ldexp(length, -wb // 2):
            raise IntegrationFailedError(f"step size collapsed near s = {mpmath.nstr(s0, 12)}", location=s0)
        h = min(h, length - pos)
        seg = _Segment(s0, direction, h, coeffs)
        segments.append(seg)
        y0, y1, pred2 = seg.eval(h, w)
        if not (w.isfinite(abs(y0)) and abs(y0) < w.mpf(10) ** 50):
            raise IntegrationFailedError(f"solution blew up near s = {mpmath.nstr(s0, 12)}", location=s0)
        pos += h
        s0 = s_start + direction * pos
    starts = [w.mpf(0)]
    for seg in segments[:-1]:
        starts.append(starts[-1] + seg.length)
    real = family == "minus"

    def evaluator(s):
        s = w.convert(s)
        t = (s - s_start) / direction
        if abs(w.im(t)) > w.ldexp(length, -bits // 2) or w.re(t) < -w.ldexp(length, -bits // 2) or w.re(t) > length * (1 + w.ldexp(1, -bits // 2)):
            raise DomainError("s lies outside the integrated segment")
        t = w.re(t)
        i = max(0, bisect.bisect_right(starts, t) - 1)
        vals = segments[i].eval(t - starts[i], w)
        vals = tuple(+ctx.convert(v) for v in vals)
        return tuple(ctx.re(v) for v in vals) if real else vals

    log.debug("integrate_sigma: %d Taylor steps from %s to %s", len(segments), s_start, s_end)
    return SigmaSolution(alpha, family, "ode", bits, evaluator, (s_start, s_end))
