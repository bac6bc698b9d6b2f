"""Asymptotic predictions built from the Painleve V functions.

* the change of the Hankel partition function log Z_n(t) - log Z_n(0);
* explicit Toeplitz expansions with an emerging or merging singularity;
* Krasovsky's formula for moments of GUE characteristic polynomials;
* the Barnes-G connection constant and the constants C_1, C_2, C_3.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import mpmath

from . import equilibrium, numkit, painleve
from .errors import DomainError, InternalConsistencyError, UnsupportedError

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# sigma integrals


def _guard_small(s, bits):
    return bits + 20 + (int(8 * math.log2(4 / float(abs(s)))) if abs(s) < 4 else 0)


def sigma_integral_closed(alpha: int, s, bits: int = numkit.DEFAULT_BITS):
    """int_0^s (sigma_alpha(x) - alpha^2) / x dx for alpha in {0, 1, 2}, in closed form.

    The logarithms are combined into log of a function that is positive on
    both rays, so no branch of log s enters.
    """
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    if alpha == 0:
        return ctx.mpf(0)
    if s == 0:
        return ctx.mpf(0)
    w = numkit.context(_guard_small(s, bits))
    s = w.convert(s)
    if alpha == 1:
        if w.im(s) != 0:
            raise UnsupportedError("sigma_1 is only available on the positive ray")
        val = w.log(w.expm1(s) / s) - s
    elif alpha == 2:
        ratio = (4 * w.sinh(s / 2) ** 2 - s * s) / s ** 4
        ratio = w.re(ratio) if isinstance(ratio, mpmath.mpc) else ratio
        val = w.log(ratio) - s + w.log(12)
    else:
        raise UnsupportedError("closed forms exist for alpha in {0, 1, 2} only")
    return +ctx.convert(val)


def sigma_integral(sol: painleve.SigmaSolution, s, bits: int = None, panel_width: float = 4.0):
    """int_0^s (sigma(x) - alpha^2) / x dx along the straight segment, by Gauss-Legendre panels.

    The integrand is analytic at 0 for integer alpha.  For ODE solutions the
    piece below the integrated range is approximated by (sigma - alpha^2) at
    its lower end, which is the first-order term of a smooth integrand.
    """
    bits = bits or sol.bits
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    if s == 0:
        return ctx.mpf(0)
    a2 = ctx.convert(sol.alpha) ** 2
    lo = ctx.mpf(0)
    head = ctx.mpf(0)
    if sol.provenance == "ode" and sol.domain is not None:
        ends = sorted((abs(ctx.convert(e)) for e in sol.domain))
        if abs(s) < ends[0] or abs(s) > ends[1] * (1 + ctx.ldexp(1, -bits // 2)):
            raise DomainError("s lies outside the range covered by the ODE solution")
        lo = ends[0] / abs(s)
        head = sol.value(s * lo) - a2
        log.info("sigma integral below |s| = %s approximated to first order", mpmath.nstr(ends[0], 5))

    def f(lam):
        return (sol.value(s * lam) - a2) / lam

    m = max(1, int(math.ceil(float(abs(s)) * float(1 - lo) / panel_width)))
    pts = [lo + (1 - lo) * ctx.mpf(k) / m for k in range(1, m)]
    val = numkit.quad(f, lo, 1, bits=bits, points=pts)
    return head + val


# ---------------------------------------------------------------------------
# partition-function prediction


@dataclass(frozen=True)
class PredictionReport:
    predicted_value: object
    components: Dict[str, object]
    error_budget: str
    scaling: Optional[equilibrium.ScalingParams] = None
    closed_form_gap: Optional[object] = None

    def to_json(self, digits: int = 30) -> dict:
        def fmt(x):
            return mpmath.nstr(x, digits) if x is not None else None

        out = {
            "predicted_value": fmt(self.predicted_value),
            "components": {k: fmt(v) for k, v in self.components.items()},
            "error_budget": self.error_budget,
        }
        if self.scaling is not None:
            sp = self.scaling
            out["scaling"] = {
                "n": sp.n,
                "t": fmt(sp.t),
                "s_nt": fmt(sp.s_nt),
                "s_hat_nt": fmt(sp.s_hat_nt),
                "tau_nt": fmt(sp.tau_nt),
            }
        if self.closed_form_gap is not None:
            out["closed_form_gap"] = fmt(self.closed_form_gap)
        return out


def predict_delta_logZ(
    alpha,
    V,
    n: int,
    t,
    sigma: Optional[painleve.SigmaSolution] = None,
    bits: int = numkit.DEFAULT_BITS,
    use_s_hat: bool = False,
    check_closed_form: bool = True,
) -> PredictionReport:
    """Predicted log Z_n(t) - log Z_n(0):

        int_0^{s_nt} (sigma(s) - alpha^2)/s ds + alpha s_nt / 2 + (n alpha / 2)(V(z0) + V(-z0) - 2 V(0)).

    ``V`` is a PotentialSpec or an EquilibriumMeasure.  With ``use_s_hat``
    the linearised s_hat replaces s_nt.
    """
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    t = ctx.convert(t)
    meas = V if isinstance(V, equilibrium.EquilibriumMeasure) else equilibrium.solve_one_cut(V, bits)
    sp = equilibrium.scaling(meas, n, t, bits)
    budget = "O(|t|^(1/2)) + O(1/n)"
    zero = ctx.mpf(0)
    if a == 0 or t == 0:
        comps = {"sigma_integral": zero, "alpha_s_term": zero, "potential_term": zero}
        return PredictionReport(zero, comps, budget, sp)
    if a <= -0.5:
        raise DomainError("alpha must exceed -1/2")
    if t > 0 and a < 0:
        raise UnsupportedError("t > 0 with -1/2 < alpha < 0 lies outside the proven regime")
    family = "minus" if t < 0 else "plus"
    if sigma is None:
        sigma = painleve.sigma_solution(alpha, family, bits)
    elif sigma.family != family:
        raise DomainError(f"t = {mpmath.nstr(t, 6)} needs the {family!r} family")
    s = sp.s_hat_nt if use_s_hat else sp.s_nt
    if use_s_hat and t < 0:
        budget += " + O(n |t|^(3/2))"
    integral = sigma_integral(sigma, s, bits)
    gap = None
    integer = a == int(a) and int(a) in (1, 2) and not (family == "plus" and int(a) == 1)
    if check_closed_form and integer:
        closed = sigma_integral_closed(int(a), s, bits)
        gap = abs(closed - integral)
        if gap > ctx.mpf(10) ** -20 * max(1, abs(closed)):
            raise InternalConsistencyError(f"sigma integral disagrees with its closed form by {mpmath.nstr(gap, 3)}")
    alpha_term = a * s / 2
    z0 = sp.z0
    Vp = meas.V
    pot = n * a / 2 * (Vp.V(z0, ctx) + Vp.V(-z0, ctx) - 2 * Vp.V(0, ctx))
    total = integral + alpha_term + pot
    tol = ctx.ldexp(1, -bits // 2) * max(1, abs(total))
    for name, x in (("sigma part", integral + alpha_term), ("potential term", pot)):
        if abs(ctx.im(x)) > tol:
            raise InternalConsistencyError(f"{name} is not real: imaginary part {mpmath.nstr(ctx.im(x), 5)}")
    comps = {
        "sigma_integral": integral,
        "alpha_s_term": alpha_term,
        "potential_term": ctx.re(pot),
    }
    return PredictionReport(ctx.re(total), comps, budget, sp, gap)


# ---------------------------------------------------------------------------
# Toeplitz expansions


def _fourier_sums(Vk: Mapping[int, object], t, ctx, decay: bool):
    """sum_k k V_k V_-k and sum_k (V_k + V_-k) e^{-tk} over k >= 1."""
    keys = {abs(int(k)) for k in Vk if int(k) != 0}
    s1 = ctx.mpf(0)
    s2 = ctx.mpf(0)
    for k in keys:
        vp = ctx.convert(Vk.get(k, 0))
        vm = ctx.convert(Vk.get(-k, 0))
        s1 += k * vp * vm
        if decay:
            s2 += (vp + vm) * ctx.exp(-t * k)
    return s1, s2


def symbol_value(Vk: Mapping[int, object], theta, ctx):
    """V(e^{i theta}) = sum V_k e^{ik theta}."""
    return sum(ctx.convert(v) * ctx.expj(int(k) * theta) for k, v in Vk.items())


def toeplitz_expansion(alpha: int, mode: str, Vk: Mapping[int, object], n: int, t, bits: int = numkit.DEFAULT_BITS):
    """log D_n(f_t) up to o(1) as n -> oo, t -> 0, for the explicit cases.

    emerging: alpha in {0, 1, 2}, singularities at e^{+-t};
    merging: alpha in {0, 2}, singularities at e^{+-it}.
    alpha = 0 gives the strong Szego value n V_0 + sum k V_k V_-k.
    """
    ctx = numkit.context(bits)
    t = ctx.convert(t)
    V0 = ctx.convert(Vk.get(0, 0))
    if mode not in ("emerging", "merging"):
        raise DomainError(f"unknown mode {mode!r}")
    if not t > 0:
        raise DomainError("t must be positive")
    kvv, decay = _fourier_sums(Vk, t, ctx, decay=True)
    base = n * V0 + kvv
    if alpha == 0:
        return base
    if mode == "emerging":
        if alpha == 1:
            return base - decay + ctx.log(ctx.sinh(n * t) / ctx.sinh(t)) + t
        if alpha == 2:
            return base - 2 * decay + 4 * t - 2 * ctx.log(2 * ctx.sinh(t) ** 2) + ctx.log(ctx.sinh(n * t) ** 2 - (n * t) ** 2)
        raise UnsupportedError("emerging expansions are explicit for alpha in {1, 2}")
    if alpha != 2:
        raise UnsupportedError("the merging expansion is explicit for alpha = 2")
    edge = symbol_value(Vk, t, ctx) + symbol_value(Vk, -t, ctx) - 2 * V0
    val = base - 2 * ctx.log(2 * t * ctx.sin(t)) + ctx.log((n * t) ** 2 - ctx.sin(n * t) ** 2) - edge
    return val


# ---------------------------------------------------------------------------
# Krasovsky's formula


def log_krasovsky_F(n: int, points: Sequence[Tuple[object, object]], bits: int = numkit.DEFAULT_BITS):
    """log F(n, (u_j, alpha_j)) for k = 1 or 2 points."""
    ctx = numkit.context(bits)
    if len(points) not in (1, 2):
        raise DomainError("Krasovsky's formula is used with one or two points")
    pts = [(ctx.convert(u), ctx.convert(a)) for u, a in points]
    total = ctx.mpf(0)
    for u, a in pts:
        if not abs(u) < 1:
            raise DomainError("points must lie inside (-1, 1)")
        if not a > -0.25:
            raise DomainError("each alpha_j must exceed -1/4")
        logC = 2 * a * a * ctx.log(2) + 2 * numkit.log_barnes_g(a + 1, bits) - numkit.log_barnes_g(2 * a + 1, bits)
        total += logC + a * a / 2 * ctx.log(1 - u * u) + a * a * ctx.log(ctx.mpf(n) / 2)
        total += (2 * u * u - 1 - 2 * ctx.log(2)) * a * n
    if len(pts) == 2:
        (u1, a1), (u2, a2) = pts
        if u1 == u2:
            raise DomainError("coincident points make the pair factor singular")
        total += -2 * a1 * a2 * ctx.log(2 * abs(u1 - u2))
    return total


def krasovsky_F(n: int, points: Sequence[Tuple[object, object]], bits: int = numkit.DEFAULT_BITS):
    return numkit.context(bits).exp(log_krasovsky_F(n, points, bits))


# ---------------------------------------------------------------------------
# connection constant


def connection_constant(alpha, bits: int = numkit.DEFAULT_BITS):
    """log( G(1 + alpha/2)^4 G(1 + 2 alpha) / G(1 + alpha)^4 )."""
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    if not a > -0.5:
        raise DomainError("alpha must exceed -1/2")
    lg = lambda z: numkit.log_barnes_g(z, bits)
    return 4 * lg(1 + a / 2) + lg(1 + 2 * a) - 4 * lg(1 + a)


def connection_lhs(alpha, y, sigma: Optional[painleve.SigmaSolution] = None, bits: int = numkit.DEFAULT_BITS):
    """int_0^s (sigma^+ - alpha^2)/x dx + alpha s/2 + (alpha^2/2) log|s| at s = -i y.

    Computed by quadrature of the given solution (default: the best exact
    route for even alpha).  The value is real, so it has no 2 pi i ambiguity.
    """
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    y = ctx.convert(y)
    if sigma is None:
        sigma = painleve.sigma_solution(alpha, "plus", bits)
    s = ctx.mpc(0, -y)
    val = sigma_integral(sigma, s, bits) + a * s / 2 + a * a / 2 * ctx.log(y)
    if abs(ctx.im(val)) > ctx.ldexp(1, -bits // 2) * max(1, abs(val)):
        raise InternalConsistencyError("connection left-hand side is not real")
    return ctx.re(val)


# ---------------------------------------------------------------------------
# constants C_1, C_2, C_3


def c3_integrand(alpha, v, route="closed", bits: int = 128):
    """exp( int_0^{-2iv} (sigma^+(s) - alpha^2)/s ds - i alpha v ).

    ``route`` is "closed" (alpha = 2 only), "recursion" (even alpha) or a
    SigmaSolution of the plus family.
    """
    ctx = numkit.context(bits)
    v = ctx.convert(v)
    a = ctx.convert(alpha)
    if v == 0:
        return ctx.mpf(1)
    s = ctx.mpc(0, -2 * v)
    if route == "closed":
        if a != 2:
            raise UnsupportedError("the closed route is available for alpha = 2")
        val = sigma_integral_closed(2, s, bits)
    else:
        sol = route if isinstance(route, painleve.SigmaSolution) else painleve.sigma_solution(alpha, "plus", bits, provenance=route)
        val = sigma_integral(sol, s, bits)
    out = ctx.exp(val - 1j * a * v)
    if abs(ctx.im(out)) > ctx.ldexp(1, -bits // 2) * max(1, abs(out)):
        raise InternalConsistencyError("C3 integrand is not real")
    return ctx.re(out)


def _sigma_plus_value(alpha, route, bits):
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    if route == "closed":
        if a != 2:
            raise UnsupportedError("the closed route is available for alpha = 2")
        return lambda s: painleve.sigma_closed(2, "plus", s, bits)[0]
    sol = route if isinstance(route, painleve.SigmaSolution) else painleve.sigma_solution(alpha, "plus", bits, provenance=route)
    return sol.value


def c3_v_integral(alpha, route="closed", bits: int = 128, v_max=200, degree: int = 32):
    """int_0^oo exp( int_0^{-2iv} (sigma^+ - alpha^2)/s ds - i alpha v ) dv.

    Chebyshev panels of unit width carry the inner integral forward; beyond
    ``v_max`` the integrand is replaced by its limit e^L (2v)^{-alpha^2/2},
    L the connection constant.  Returns (value, tail).
    """
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    if not a * a > 2:
        raise DomainError("the v-integral converges for alpha^2 > 2 only")
    sig = _sigma_plus_value(alpha, route, bits)

    def g(w):
        return (sig(ctx.mpc(0, -2 * w)) - a * a) / w

    total = ctx.mpf(0)
    F = ctx.mpc(0)
    v_max = int(v_max)
    for k in range(v_max):
        panel = numkit.ChebyshevPanel(g, k, k + 1, degree, ctx)
        base = F

        def h(v, panel=panel, base=base):
            return ctx.exp(base + panel.integral_to(v) - 1j * a * v)

        outer = numkit.ChebyshevPanel(h, k, k + 1, degree, ctx)
        total += outer.total()
        F = base + panel.total()
    L = connection_constant(alpha, bits)
    p = a * a / 2
    tail = ctx.exp(L) * 2 ** (-p) * ctx.mpf(v_max) ** (1 - p) / (p - 1)
    total = total + tail
    if abs(ctx.im(total)) > ctx.mpf(10) ** (-bits // 8):
        raise InternalConsistencyError("C3 v-integral is not real")
    return ctx.re(total), tail


@dataclass(frozen=True)
class CorollaryConstants:
    alpha: object
    theta: object
    C1: Optional[object]
    C2: Optional[object]
    C3: Optional[object]
    details: Dict[str, object] = field(default_factory=dict)


def corollary_constants(alpha, theta, rho: Callable = None, bits: int = 96, c3_route="auto", v_max: int = 200) -> CorollaryConstants:
    """C_1 (alpha^2 < 2), C_2 (alpha^2 = 2) or C_3 (alpha^2 > 2); the others are None."""
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    th = ctx.convert(theta)
    if not a > 0:
        raise DomainError("alpha must be positive")
    if not 0 < th < 1:
        raise DomainError("theta must lie in (0, 1)")
    rho = rho or (lambda u: 1)
    lg = lambda z: numkit.log_barnes_g(z, bits)
    a2 = a * a
    details = {}
    C1 = C2 = C3 = None
    tol = ctx.ldexp(1, -bits // 2)
    digits = numkit.bits_to_digits(bits) // 2
    if abs(a2 - 2) <= tol:
        pref = 2 * ctx.exp(4 * lg(1 + 1 / ctx.sqrt(2)) - 2 * lg(1 + ctx.sqrt(2)))
        integ = numkit.quad(lambda u: ctx.sqrt(1 - u * u) * rho(u) ** 2, -th, th, scheme="endpoint-singular", bits=bits, target_digits=digits)
        C2 = pref * integ
        details["rho_integral"] = integ
    elif a2 < 2:
        pref = ctx.exp(4 * lg(1 + a / 2) - 2 * lg(1 + a))
        beta = a2 / 2

        def inner(u1):
            f = lambda u2: ((1 - u1 * u1) * (1 - u2 * u2)) ** (a2 / 8) / abs(u1 - u2) ** beta * rho(u2)
            return numkit.quad(f, -th, th, scheme="endpoint-singular", bits=bits, points=[u1], target_digits=digits) * rho(u1)

        integ = numkit.quad(inner, -th, th, scheme="endpoint-singular", bits=bits, target_digits=digits - 4)
        C1 = pref * integ
        details["double_integral"] = integ
    else:
        pref = 2 ** a2 * ctx.exp(2 * lg(a + 1) - lg(2 * a + 1))
        integ = numkit.quad(
            lambda u: (1 - u * u) ** ((a2 - 1) / 2) * rho(u) ** 2, -th, th, scheme="endpoint-singular", bits=bits, target_digits=digits
        )
        route = c3_route
        if route == "auto":
            route = "closed" if a == 2 else "recursion"
        vint, tail = c3_v_integral(alpha, route, bits, v_max=v_max)
        C3 = pref * integ * vint
        details.update({"rho_integral": integ, "v_integral": vint, "v_tail": tail})
    return CorollaryConstants(a, th, C1, C2, C3, details)
