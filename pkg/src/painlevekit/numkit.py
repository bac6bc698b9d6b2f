"""Arbitrary-precision substrate: contexts, truncated series, quadrature and
the few special functions the rest of the package needs.

Precision is never set globally.  Every routine takes ``bits`` and works in a
private :class:`mpmath.MPContext` obtained from :func:`context`; the contexts
are cached per thread and must be treated as read-only.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import mpmath

from .errors import DomainError, InternalConsistencyError, PrecisionExhaustedError, QuadratureFailedError

DEFAULT_BITS = 256
MAX_BITS = 1 << 15

_local = threading.local()


def context(bits: int = DEFAULT_BITS) -> mpmath.MPContext:
    """Return this thread's cached context running at ``bits`` of precision."""
    bits = int(bits)
    if bits < 16:
        raise DomainError(f"precision of {bits} bits is too small")
    if bits > MAX_BITS:
        raise PrecisionExhaustedError(f"precision of {bits} bits exceeds the cap of {MAX_BITS}")
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(bits)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.prec = bits
        cache[bits] = ctx
    return ctx


def digits_to_bits(digits: float) -> int:
    return int(math.ceil(digits * math.log2(10)))


def bits_to_digits(bits: int) -> int:
    return int(math.floor(bits * math.log10(2)))


def eps(bits: int):
    return context(bits).ldexp(1, 1 - bits)


def exact(value):
    """Fraction for ints, decimal strings and floats (their binary value); other values unchanged."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            return value
    return value


def to_ctx(value, ctx):
    """Convert ints, Fractions, strings and mp numbers at the precision of ``ctx``."""
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if isinstance(value, str):
        return ctx.mpmathify(value)
    return ctx.convert(value)


# ---------------------------------------------------------------------------
# truncated power series / exact polynomials


class PolySeries:
    """Power series in z stored as a coefficient tuple (index = power).

    ``order`` is the truncation order: coefficients of z**k for k > order are
    unknown.  ``order=None`` marks an exact polynomial.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: Optional[int] = None):
        c = list(coeffs)
        if order is not None:
            if order < 0:
                raise DomainError("truncation order must be non-negative")
            c = c[: order + 1]
            c += [0] * (order + 1 - len(c))
        if not c:
            c = [0]
        self.coeffs = tuple(c)
        self.order = order

    @classmethod
    def constant(cls, c, order: Optional[int] = None) -> "PolySeries":
        return cls([c], order)

    @property
    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k] != 0:
                return k
        return -1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int):
        if k < 0:
            raise IndexError(k)
        if k < len(self.coeffs):
            return self.coeffs[k]
        if self.order is not None and k > self.order:
            raise IndexError(f"coefficient {k} is beyond truncation order {self.order}")
        return 0

    def _merge_order(self, other: "PolySeries") -> Optional[int]:
        if self.order is None:
            return other.order
        if other.order is None:
            return self.order
        return min(self.order, other.order)

    def __add__(self, other):
        if not isinstance(other, PolySeries):
            other = PolySeries([other])
        order = self._merge_order(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PolySeries([x + y for x, y in zip(a, b)], order)

    __radd__ = __add__

    def __neg__(self):
        return PolySeries([-x for x in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolySeries):
            return PolySeries([x * other for x in self.coeffs], self.order)
        order = self._merge_order(other)
        n = len(self.coeffs) + len(other.coeffs) - 1
        if order is not None:
            n = min(n, order + 1)
        out = [0] * n
        for i, x in enumerate(self.coeffs):
            if x == 0 or i >= n:
                continue
            for j, y in enumerate(other.coeffs):
                if i + j >= n:
                    break
                out[i + j] += x * y
        return PolySeries(out, order)

    __rmul__ = __mul__

    def truncate(self, order: int) -> "PolySeries":
        if self.order is not None and order > self.order:
            raise DomainError(f"cannot extend a series known to order {self.order} to order {order}")
        return PolySeries(self.coeffs, order)

    def shift_down(self, k: int, tol=None) -> "PolySeries":
        """Divide by z**k; the first k coefficients must vanish (checked against ``tol``)."""
        if tol is not None:
            for j in range(min(k, len(self.coeffs))):
                if abs(self.coeffs[j]) > tol:
                    raise InternalConsistencyError(
                        f"coefficient of z^{j} is {mpmath.nstr(abs(self.coeffs[j]), 5)}, expected 0 before dividing by z^{k}"
                    )
        order = None if self.order is None else self.order - k
        if order is not None and order < 0:
            raise DomainError("shift exceeds truncation order")
        return PolySeries(self.coeffs[k:], order)

    def derivative(self) -> "PolySeries":
        order = None if self.order is None else max(self.order - 1, 0)
        return PolySeries([k * c for k, c in enumerate(self.coeffs)][1:] or [0], order)

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def compose_affine(self, a, b) -> "PolySeries":
        """Exact polynomial p(a + b*w) as a polynomial in w."""
        if self.order is not None:
            raise DomainError("affine substitution needs an exact polynomial")
        out = PolySeries([0])
        lin = PolySeries([a, b])
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def divmod_poly(self, divisor: "PolySeries"):
        """Polynomial long division of exact polynomials."""
        if self.order is not None or divisor.order is not None:
            raise DomainError("long division needs exact polynomials")
        d = divisor.degree
        if d < 0:
            raise DomainError("division by the zero polynomial")
        lead = divisor.coeffs[d]
        rem = list(self.coeffs)
        nq = max(len(rem) - d, 1)
        quo = [0] * nq
        for k in range(len(rem) - 1, d - 1, -1):
            c = rem[k] / lead
            quo[k - d] = c
            if c != 0:
                for j in range(d + 1):
                    rem[k - d + j] -= c * divisor.coeffs[j]
        return PolySeries(quo), PolySeries(rem[:d] or [0])

    def reciprocal(self, order: Optional[int] = None) -> "PolySeries":
        """1/p as a series; needs a nonzero constant term."""
        n = self.order if order is None else order
        if n is None:
            raise DomainError("reciprocal of an exact polynomial needs a truncation order")
        a = self.coeffs
        if a[0] == 0:
            raise DomainError("series with zero constant term has no reciprocal")
        out = [1 / a[0]]
        for k in range(1, n + 1):
            acc = 0
            for j in range(1, min(k, len(a) - 1) + 1):
                acc += a[j] * out[k - j]
            out.append(-acc * out[0])
        return PolySeries(out, n)

    def sqrt(self, root0, order: Optional[int] = None) -> "PolySeries":
        """Square root series whose constant term is ``root0`` (a chosen square root of p(0))."""
        n = self.order if order is None else order
        if n is None:
            raise DomainError("square root of an exact polynomial needs a truncation order")
        if root0 == 0:
            raise DomainError("square root series needs a nonzero constant term")
        a = self.coeffs
        out = [root0]
        for k in range(1, n + 1):
            acc = a[k] if k < len(a) else 0
            for j in range(1, k):
                acc -= out[j] * out[k - j]
            out.append(acc / (2 * root0))
        return PolySeries(out, n)

    def integrate(self, constant=0) -> "PolySeries":
        order = None if self.order is None else self.order + 1
        return PolySeries([constant] + [c / (k + 1) for k, c in enumerate(self.coeffs)], order)

    def max_abs(self):
        return max(abs(c) for c in self.coeffs)

    def __repr__(self) -> str:
        body = ", ".join(mpmath.nstr(c, 8) if not isinstance(c, int) else str(c) for c in self.coeffs)
        return f"PolySeries([{body}], order={self.order})"


def exp_series(c, order: int, bits: int = DEFAULT_BITS) -> PolySeries:
    """Taylor coefficients of exp(c*z) through z**order."""
    if order < 0:
        raise DomainError("order must be non-negative")
    ctx = context(bits)
    c = ctx.convert(c)
    coeffs = [ctx.mpf(1)]
    for k in range(1, order + 1):
        coeffs.append(coeffs[-1] * c / k)
    return PolySeries(coeffs, order)


def binomial_series(a, order: int, bits: int = DEFAULT_BITS, sign: int = 1) -> PolySeries:
    """Coefficients of (1 + sign*z)**a through z**order."""
    ctx = context(bits)
    a = ctx.convert(a)
    coeffs = [ctx.mpf(1)]
    for k in range(1, order + 1):
        coeffs.append(coeffs[-1] * (a - k + 1) / k * sign)
    return PolySeries(coeffs, order)


# ---------------------------------------------------------------------------
# Bessel functions


def _half_integer_order(nu) -> Optional[int]:
    """Return n when nu = n + 1/2 with n >= -1, else None."""
    two_nu = 2 * nu
    if two_nu == int(two_nu) and int(two_nu) % 2 == 1 and int(two_nu) >= -1:
        return (int(two_nu) - 1) // 2
    return None


def _bessel_half_integer(n: int, x, bits: int):
    # finite trigonometric form of J_{n+1/2}; small x needs guard bits against cancellation
    guard = 20 + (int(2 * n * math.log2(max(2.0, (2 * n + 2) / float(x)))) if n > 0 else 0)
    ctx = context(bits + guard)
    x = ctx.convert(x)
    pref = ctx.sqrt(2 / (ctx.pi * x))
    if n == -1:
        return +context(bits).convert(pref * ctx.cos(x))
    phase = x - n * ctx.pi / 2
    s_part = 0
    c_part = 0
    a = ctx.mpf(1)
    for k in range(n + 1):
        if k > 0:
            a = a * (n + k) * (n - k + 1) / (2 * k)
        term = a / x ** k
        if k % 2 == 0:
            s_part += (-1) ** (k // 2) * term
        else:
            c_part += (-1) ** ((k - 1) // 2) * term
    val = pref * (ctx.sin(phase) * s_part + ctx.cos(phase) * c_part)
    return +context(bits).convert(val)


def bessel_j_scaled(nu, x, bits: int = DEFAULT_BITS):
    """Entire function J_nu(x) / (x/2)**nu = sum_k (-x^2/4)^k / (k! Gamma(nu+k+1)).

    Valid for any real or complex x; used where the kernel needs both signs of x.
    """
    xf = float(abs(mpmath.mpmathify(x)))
    guard = 24 + int(xf * 1.4427) + 1
    ctx = context(bits + guard)
    nu = ctx.convert(nu)
    x = ctx.convert(x)
    if nu + 1 <= 0 and nu == ctx.floor(nu):
        raise DomainError("order must satisfy nu > -1 for the scaled series")
    w = -(x * x) / 4
    term = ctx.rgamma(nu + 1)
    total = term
    tol = ctx.ldexp(1, -(bits + 8))
    k = 0
    kmax = 200 + 4 * int(xf)
    while True:
        k += 1
        term = term * w / (k * (nu + k))
        total += term
        if k > xf / 2 and abs(term) <= tol * abs(total):
            break
        if k > kmax:
            raise PrecisionExhaustedError(f"Bessel series did not converge after {kmax} terms")
    return +context(bits).convert(total)


def bessel_j(nu, x, bits: int = DEFAULT_BITS, route: str = "auto"):
    """J_nu(x) for real x > 0 and nu >= -1/2.

    Half-integer orders use the finite trigonometric (spherical Bessel) form;
    other orders, or ``route="series"``, use the ascending series.
    """
    ctx = context(bits)
    x = ctx.convert(x)
    if ctx.im(x) != 0 or x <= 0:
        raise DomainError("bessel_j needs a positive real argument")
    nu = ctx.convert(nu)
    if nu < -0.5:
        raise DomainError("bessel_j needs nu >= -1/2")
    n = _half_integer_order(nu)
    if route == "auto" and n is not None:
        return _bessel_half_integer(n, x, bits)
    if route not in ("auto", "series"):
        raise DomainError(f"unknown route {route!r}")
    scaled = bessel_j_scaled(nu, x, bits + 8)
    c2 = context(bits + 8)
    return +ctx.convert(scaled * (c2.convert(x) / 2) ** c2.convert(nu))


# ---------------------------------------------------------------------------
# Barnes G


def _superfactorial_g(n: int) -> int:
    """G(n) = prod_{k=1}^{n-2} k! for integer n >= 1."""
    out = 1
    f = 1
    for k in range(1, n - 1):
        f *= k
        out *= f
    return out


def _log_g_one_plus(z, ctx, bits: int):
    """log G(1+z) for 0 < z < 1 from the Weierstrass product with an explicit tail."""
    N = 16
    total = (z / 2) * ctx.log(2 * ctx.pi) - (z + z * z * (1 + ctx.euler)) / 2
    for k in range(1, N + 1):
        total += k * ctx.log1p(z / k) - z + z * z / (2 * k)
    # sum_{k>N} [k log(1+z/k) - z + z^2/(2k)] = sum_{m>=3} (-1)^{m+1} z^m/m * zeta(m-1, N+1)
    tol = ctx.ldexp(1, -(bits + 10))
    tail = 0
    m = 3
    ratio = z / (N + 1)
    while True:
        term = (-1) ** (m + 1) * z ** m / m * ctx.zeta(m - 1, N + 1)
        tail += term
        # remaining terms are bounded by a geometric series of ratio z/(N+1)
        if abs(term) * ratio / (1 - ratio) < tol:
            break
        m += 1
        if m > 10 * bits:
            raise PrecisionExhaustedError("Barnes G tail did not converge")
    return total + tail


def barnes_g(z, bits: int = DEFAULT_BITS):
    """Barnes G-function for real z > 0."""
    ctx = context(bits)
    z = ctx.convert(z)
    if ctx.im(z) != 0 or z <= 0:
        raise DomainError("barnes_g needs a real argument z > 0")
    if z == ctx.floor(z):
        return ctx.mpf(_superfactorial_g(int(z)))
    wctx = context(bits + 20)
    z = wctx.convert(z)
    k = int(wctx.floor(z))
    f = z - k
    g = wctx.exp(_log_g_one_plus(f, wctx, bits + 20))  # G(1+f)
    if k == 0:
        g = g / wctx.gamma(f)
    else:
        for j in range(1, k):
            g = g * wctx.gamma(f + j)
    return +ctx.convert(g)


def log_barnes_g(z, bits: int = DEFAULT_BITS):
    ctx = context(bits)
    z = ctx.convert(z)
    if z > 0 and z == ctx.floor(z):
        return ctx.log(_superfactorial_g(int(z)))
    wctx = context(bits + 20)
    z = wctx.convert(z)
    if z <= 0:
        raise DomainError("log_barnes_g needs z > 0")
    k = int(wctx.floor(z))
    f = z - k
    lg = _log_g_one_plus(f, wctx, bits + 20)
    if k == 0:
        lg -= wctx.loggamma(f)
    else:
        for j in range(1, k):
            lg += wctx.loggamma(f + j)
    return +ctx.convert(lg)


# ---------------------------------------------------------------------------
# quadrature

_METHODS = {"gauss-legendre": "gauss-legendre", "endpoint-singular": "tanh-sinh"}


def tanh_sinh_vector(fs, a, b, ctx, tol, max_level):
    """Double-exponential rule on [a, b] for a function returning a list of values.

    Nodes are placed from the nearest endpoint so that |x - e|^beta
    behaviour with beta > -1 is resolved.  Returns (values, error) with
    error None when two levels never agreed to ``tol``.
    """
    half = (b - a) / 2
    tiny = ctx.ldexp(1, -ctx.prec - 30)
    # below this distance a node would round onto the endpoint itself
    resolvable = ctx.ldexp(max(abs(a), abs(b)), 4 - ctx.prec) / abs(half)
    tiny = max(tiny, resolvable)
    prev = None
    total = None
    # level 0 uses step 1; each later level adds the odd multiples of the new step
    for level in range(0, max_level + 1):
        h = ctx.ldexp(1, -level)
        step = 1 if level == 0 else 2
        j = 0 if level == 0 else 1
        acc = None
        while True:
            t = j * h
            u = ctx.pi / 2 * ctx.sinh(t)
            comp = 2 / (ctx.exp(2 * u) + 1)
            w = ctx.pi / 2 * ctx.cosh(t) / ctx.cosh(u) ** 2
            if comp < tiny:
                break
            if j == 0:
                vals = [w * v for v in fs(a + half)]
            else:
                vals = [w * (p + q) for p, q in zip(fs(a + half * comp), fs(b - half * comp))]
            acc = vals if acc is None else [x + y for x, y in zip(acc, vals)]
            j += step
        if acc is not None:
            total = acc if total is None else [x + y for x, y in zip(total, acc)]
        value = [x * h * half for x in total]
        if prev is not None:
            err = max(abs(x - y) for x, y in zip(value, prev))
            if err <= tol:
                return value, err
        prev = value
    return prev, None


def _tanh_sinh_panel(f, a, b, ctx, tol, max_level):
    val, err = tanh_sinh_vector(lambda x: [f(x)], a, b, ctx, tol, max_level)
    return val[0], err


def quad(
    f: Callable,
    a,
    b=None,
    scheme: str = "gauss-legendre",
    target_digits: Optional[float] = None,
    bits: int = DEFAULT_BITS,
    points: Sequence = (),
    max_degree: Optional[int] = None,
    relative: bool = True,
):
    """Integrate ``f`` over [a, b] (endpoints may be infinite).

    ``points`` lists interior break points; the integral is split there before
    the chosen rule is applied.  ``scheme="endpoint-singular"`` uses the
    double-exponential substitution on every finite panel, with nodes placed
    by their distance to the nearest endpoint so |x-e|**beta behaviour with
    beta > -1 is resolved.  The error estimate must not exceed
    10**(-target_digits) (relative to max(1, |value|) unless ``relative`` is
    false), otherwise :class:`QuadratureFailedError` is raised.
    """
    if scheme not in _METHODS:
        raise DomainError(f"unknown quadrature scheme {scheme!r}")
    ctx = context(bits)
    if b is None:
        nodes = [ctx.convert(x) for x in a]
    else:
        inner = sorted(ctx.convert(p) for p in points)
        nodes = [ctx.convert(a)] + inner + [ctx.convert(b)]
    if target_digits is None:
        target_digits = bits_to_digits(bits) - 10
    finite = all(ctx.isfinite(x) for x in nodes)
    if scheme == "endpoint-singular" and finite:
        wctx = context(2 * bits + 32)
        tol = wctx.mpf(10) ** (-target_digits - 2)
        levels = max_degree if max_degree is not None else 12
        total = 0
        for lo, hi in zip(nodes[:-1], nodes[1:]):
            val, err = _tanh_sinh_panel(f, wctx.convert(lo), wctx.convert(hi), wctx, tol, levels)
            if err is None:
                raise QuadratureFailedError(
                    f"double-exponential rule did not settle on [{mpmath.nstr(lo, 8)}, {mpmath.nstr(hi, 8)}]",
                    error_estimate=None,
                )
            total += val
        return +ctx.convert(total)
    degree = max_degree if max_degree is not None else max(6, int(math.log2(max(bits, 64))) + 1)
    value, err = ctx.quad(f, nodes, method=_METHODS[scheme], error=True, maxdegree=degree)
    scale = max(ctx.mpf(1), abs(value)) if relative else ctx.mpf(1)
    limit = scale * ctx.mpf(10) ** (-target_digits)
    if not (err <= limit):
        value2, err2 = ctx.quad(f, nodes, method=_METHODS[scheme], error=True, maxdegree=degree + 2)
        if err2 <= limit or abs(value2 - value) <= limit:
            return value2
        raise QuadratureFailedError(
            f"quadrature reached error estimate {mpmath.nstr(err2, 3)}, target 1e-{target_digits}",
            error_estimate=err2,
        )
    return value


# ---------------------------------------------------------------------------
# periodic functions and Chebyshev panels


def fourier_coefficients(f: Callable, kmax: int, bits: int = DEFAULT_BITS, nodes: int = 64, max_nodes: int = 1 << 14):
    """c_k = (1/2pi) int_0^{2pi} f(theta) e^{-ik theta} d theta for |k| <= kmax.

    Trapezoid rule (spectrally accurate for smooth periodic f); the node count
    doubles until two successive rules agree to the working precision.
    Returns a dict k -> c_k.
    """
    ctx = context(bits)
    tol = ctx.ldexp(1, -bits + 16)
    n = max(nodes, 2 * kmax + 2)
    samples = {}
    prev = None
    while True:
        for j in range(n):
            key = Fraction(j, n)
            if key not in samples:
                samples[key] = f(2 * ctx.pi * ctx.mpf(j) / n)
        vals = [samples[Fraction(j, n)] for j in range(n)]
        roots = [ctx.expjpi(-2 * ctx.mpf(m) / n) for m in range(n)]
        out = {}
        for k in range(-kmax, kmax + 1):
            acc = 0
            for j in range(n):
                acc += vals[j] * roots[(k * j) % n]
            out[k] = acc / n
        if prev is not None:
            scale = max(max(abs(v) for v in out.values()), 1)
            if max(abs(out[k] - prev[k]) for k in out) <= tol * scale:
                return out
        if n >= max_nodes:
            raise QuadratureFailedError(f"Fourier coefficients did not settle with {n} nodes", error_estimate=None)
        prev = out
        n *= 2


class ChebyshevPanel:
    """Chebyshev interpolant of g on [lo, hi] at first-kind nodes, with its antiderivative.

    First-kind nodes never touch the endpoints, so g only has to be finite
    inside the panel.
    """

    def __init__(self, g: Callable, lo, hi, degree: int, ctx):
        self.ctx = ctx
        self.lo = ctx.convert(lo)
        self.hi = ctx.convert(hi)
        n = degree
        self.n = n
        half = (self.hi - self.lo) / 2
        mid = (self.hi + self.lo) / 2
        thetas = [ctx.pi * (j + ctx.mpf(1) / 2) / n for j in range(n)]
        self.nodes = [mid + half * ctx.cos(t) for t in thetas]
        vals = [g(x) for x in self.nodes]
        self.values = vals
        coeffs = []
        for k in range(n):
            acc = 0
            for j in range(n):
                acc += vals[j] * ctx.cos(k * thetas[j])
            coeffs.append(acc * 2 / n)
        coeffs[0] /= 2
        self.coeffs = coeffs
        # antiderivative in the panel variable x in [-1, 1], zero at x = -1
        c = coeffs + [0, 0]
        a = [0] * (n + 1)
        for k in range(1, n + 1):
            ck_1 = c[k - 1] * (2 if k - 1 == 0 else 1)
            a[k] = (ck_1 - c[k + 1]) / (2 * k)
        a = [x * half for x in a]
        # fix a[0] so the antiderivative vanishes at x = -1
        a[0] = -sum(a[k] * (-1) ** k for k in range(1, n + 1))
        self.anti = a

    def _x(self, t):
        return (2 * self.ctx.convert(t) - self.lo - self.hi) / (self.hi - self.lo)

    @staticmethod
    def _clenshaw(coeffs, x):
        b1 = b2 = 0
        for c in reversed(coeffs[1:]):
            b1, b2 = 2 * x * b1 - b2 + c, b1
        return x * b1 - b2 + coeffs[0]

    def __call__(self, t):
        return self._clenshaw(self.coeffs, self._x(t))

    def integral_to(self, t):
        """int_lo^t g."""
        return self._clenshaw(self.anti, self._x(t))

    def total(self):
        return self.integral_to(self.hi)

    def tail_coefficient(self):
        """|last two coefficients|, a convergence indicator."""
        return max(abs(self.coeffs[-1]), abs(self.coeffs[-2]))
