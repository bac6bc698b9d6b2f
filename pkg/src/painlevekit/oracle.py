"""Exact finite-n ground truth: moments, Hankel and Toeplitz determinants, CD kernels.

Everything here is plain linear algebra at high precision.  Hankel matrices
lose about one digit per row to conditioning, so the default budget is 15
digits per row and results are recomputed at a higher precision until two
runs agree.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath
from mpmath.calculus.quadrature import GaussLegendre

from . import equilibrium, numkit
from .errors import DomainError, PrecisionExhaustedError, QuadratureFailedError, UnsupportedError

log = logging.getLogger(__name__)

ORACLE_MAX_BITS = 4096
DIGITS_PER_ROW = 15


@dataclass(frozen=True)
class WeightSpec:
    """w_n(x) = exp(-n V(x)) |x^2 - t|^alpha on the real line."""

    V: equilibrium.PotentialSpec
    alpha: object
    t: object
    n: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", numkit.exact(self.alpha))
        object.__setattr__(self, "t", numkit.exact(self.t))
        if not self.alpha > Fraction(-1, 2):
            raise DomainError("alpha must exceed -1/2 for the weight to be integrable")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be a positive integer")

    @property
    def is_even(self) -> bool:
        return self.V.is_even

    @property
    def polynomial_factor(self) -> bool:
        """True when |x^2 - t|^alpha is the polynomial (x^2 - t)^alpha."""
        a = self.alpha
        if a != int(a):
            return False
        return self.t <= 0 or int(a) % 2 == 0

    def __call__(self, x, ctx):
        x = ctx.convert(x)
        val = ctx.exp(-self.n * self.V.V(x, ctx))
        if self.alpha != 0:
            val *= abs(x * x - numkit.to_ctx(self.t, ctx)) ** numkit.to_ctx(self.alpha, ctx)
        return val


# ---------------------------------------------------------------------------
# moments


def _gaussian_moments(beta, kmax: int, ctx) -> List:
    """int x^k exp(-beta x^2) dx for k = 0..kmax."""
    out = []
    for k in range(kmax + 1):
        if k % 2:
            out.append(ctx.mpf(0))
        else:
            m = k // 2
            out.append(ctx.gamma(m + ctx.mpf(1) / 2) / beta ** (m + ctx.mpf(1) / 2))
    return out


def _moments_exact(w: WeightSpec, kmax: int, ctx) -> List:
    c = w.V.coeffs
    beta = w.n * numkit.to_ctx(c[2], ctx)
    scale = ctx.exp(-w.n * numkit.to_ctx(c[0], ctx))
    a = int(w.alpha)
    mu = _gaussian_moments(beta, kmax + 2 * a, ctx)
    t = numkit.to_ctx(w.t, ctx)
    out = []
    for k in range(kmax + 1):
        acc = ctx.mpf(0)
        for j in range(a + 1):
            acc += math.comb(a, j) * (-t) ** (a - j) * mu[k + 2 * j]
        out.append(scale * acc)
    return out


def _truncation(w: WeightSpec, kmax: int, ctx) -> Tuple:
    """[L, R] outside which every integrand is below 2^-prec relative to its peak."""
    target = ctx.prec * math.log(2) + 40
    V = lambda x: w.V.V(x, ctx)
    grid = [ctx.mpf(j) / 16 for j in range(-160, 161)]
    vmin = min(V(x) for x in grid)

    def far(x):
        val = w.n * (V(x) - vmin) - kmax * ctx.log(max(abs(x), 1))
        if w.alpha > 0:
            val -= numkit.to_ctx(w.alpha, ctx) * ctx.log(max(abs(x * x - numkit.to_ctx(w.t, ctx)), 1))
        return val > target

    ends = []
    for sgn in (1, -1):
        r = ctx.mpf(1)
        while not (far(sgn * r) and far(sgn * 2 * r)):
            r *= 2
            if r > 2 ** 20:
                raise QuadratureFailedError("cannot truncate the moment integrals", None)
        ends.append(sgn * 2 * r)
    return ends[1], ends[0]


def _vector_panel(fs, a, b, ctx, rule, tol, max_degree=10):
    if rule == "tanh-sinh":
        vals, err = numkit.tanh_sinh_vector(fs, a, b, ctx, tol, max_degree + 2)
        if err is None:
            raise QuadratureFailedError(f"moment quadrature on [{mpmath.nstr(a, 5)}, {mpmath.nstr(b, 5)}] did not converge", None)
        return vals
    prev = None
    for degree in range(3, max_degree + 1):
        nodes = rule.get_nodes(a, b, degree, ctx.prec)
        vals = [ctx.mpf(0)] * len(fs(a + (b - a) / 2))
        for x, wt in nodes:
            for i, fx in enumerate(fs(x)):
                vals[i] += wt * fx
        if prev is not None:
            err = max(abs(p - q) for p, q in zip(vals, prev))
            if err <= tol:
                return vals
        prev = vals
    raise QuadratureFailedError(f"moment quadrature on [{mpmath.nstr(a, 5)}, {mpmath.nstr(b, 5)}] did not converge", err)


def _moments_quadrature(w: WeightSpec, kmax: int, ctx) -> List:
    t = numkit.to_ctx(w.t, ctx)
    a = numkit.to_ctx(w.alpha, ctx)
    L, R = _truncation(w, kmax, ctx)
    cuts = {L, R, ctx.mpf(0)}
    singular = set()
    if w.t > 0 and w.alpha != 0:
        r = ctx.sqrt(t)
        cuts |= {r, -r}
        singular = {r, -r}
    width = 2 / ctx.sqrt(w.n)
    pts = sorted(cuts)
    panels = []
    for lo, hi in zip(pts, pts[1:]):
        m = max(1, int(ctx.ceil((hi - lo) / width)))
        edges = [lo] + [lo + (hi - lo) * j / m for j in range(1, m)] + [hi]
        panels.extend(zip(edges, edges[1:]))
    gl = GaussLegendre(ctx)
    ts = "tanh-sinh"

    def fs(x):
        base = ctx.exp(-w.n * w.V.V(x, ctx))
        if w.alpha != 0:
            base *= abs(x * x - t) ** a
        out = [base]
        for _ in range(kmax):
            out.append(out[-1] * x)
        return out

    # absolute tolerance against the size of the even moments
    scale = _gaussian_moments(ctx.mpf(w.n), kmax, ctx)
    tol = ctx.ldexp(1, -ctx.prec + 24) * min(abs(s) for s in scale[::2])
    total = [ctx.mpf(0)] * (kmax + 1)
    for lo, hi in panels:
        touches = (lo in singular or hi in singular) and w.alpha != int(w.alpha)
        rule = ts if touches else gl
        vals = _vector_panel(fs, lo, hi, ctx, rule, tol)
        total = [p + q for p, q in zip(total, vals)]
    return total


def moments(w: WeightSpec, kmax: int, bits: int = numkit.DEFAULT_BITS) -> List:
    """m_k = int x^k w_n(x) dx for k = 0..kmax.

    Exact Gaussian sums when V is quadratic and even and the |x^2 - t|^alpha
    factor is a polynomial; quadrature split at 0 and +-sqrt(t) otherwise.
    Odd moments of even weights are set to zero.
    """
    ctx = numkit.context(bits)
    c = w.V.coeffs
    quadratic_even = w.V.degree == 2 and c[1] == 0
    if w.alpha == 0:
        # t never enters
        w = WeightSpec(w.V, 0, 0, w.n)
    if quadratic_even and w.polynomial_factor:
        out = _moments_exact(w, kmax, ctx)
    else:
        out = _moments_quadrature(w, kmax, ctx)
    if w.is_even:
        out = [ctx.mpf(0) if k % 2 else m for k, m in enumerate(out)]
    return out


# ---------------------------------------------------------------------------
# Hankel factorisation


def _cholesky(H, ctx):
    n = len(H)
    L = [[ctx.mpf(0)] * n for _ in range(n)]
    for j in range(n):
        d = H[j][j] - sum(L[j][k] ** 2 for k in range(j))
        if not d > 0:
            raise PrecisionExhaustedError(f"non-positive pivot at row {j}: raise the precision")
        L[j][j] = ctx.sqrt(d)
        for i in range(j + 1, n):
            L[i][j] = (H[i][j] - sum(L[i][k] * L[j][k] for k in range(j))) / L[j][j]
    return L


def _hankel(m, size):
    return [[m[i + j] for j in range(size)] for i in range(size)]


@dataclass(frozen=True)
class MomentSystem:
    """Moments, Hankel log-determinants and orthonormal polynomials p_0..p_N."""

    weight: WeightSpec
    size: int
    bits: int
    moments: Tuple
    logdets: Tuple  # log D_1 .. log D_{size+1}
    kappa: Tuple  # kappa_0 .. kappa_size
    a: Tuple  # a_1 .. a_size (a[0] unused)
    b: Tuple  # b_0 .. b_{size-1}

    @property
    def ctx(self):
        return numkit.context(self.bits)

    def log_det(self, k: int):
        """log D_k, D_k the k x k Hankel determinant."""
        return self.logdets[k - 1]

    def polys(self, x, upto: Optional[int] = None, derivative: bool = False):
        """[p_0(x), ..., p_upto(x)] by the three-term recurrence (and the derivatives)."""
        ctx = self.ctx
        x = ctx.convert(x)
        N = self.size if upto is None else upto
        p = [self.kappa[0]]
        dp = [ctx.mpf(0)]
        prev, dprev = ctx.mpf(0), ctx.mpf(0)
        for j in range(N):
            aj = self.a[j] if j else 0
            nxt = ((x - self.b[j]) * p[j] - aj * prev) / self.a[j + 1]
            if derivative:
                dnxt = (p[j] + (x - self.b[j]) * dp[j] - aj * dprev) / self.a[j + 1]
                dprev = dp[j]
                dp.append(dnxt)
            prev = p[j]
            p.append(nxt)
        return (p, dp) if derivative else p

    def kappa_crosscheck(self):
        """max_j |kappa_j^2 D_{j+1} / D_j - 1| with D_j from independent LU determinants."""
        ctx = self.ctx
        worst = ctx.mpf(0)
        prev = ctx.mpf(1)
        for j in range(self.size + 1):
            D = ctx.det(ctx.matrix(_hankel(self.moments, j + 1)))
            worst = max(worst, abs(self.kappa[j] ** 2 * D / prev - 1))
            prev = D
        return worst


def build_moment_system(w: WeightSpec, size: Optional[int] = None, bits: Optional[int] = None) -> MomentSystem:
    """Gram (Cholesky) factorisation of the (size+1) x (size+1) Hankel matrix."""
    size = w.n if size is None else size
    bits = bits or numkit.digits_to_bits(DIGITS_PER_ROW * (size + 1) + 20)
    ctx = numkit.context(bits)
    m = moments(w, 2 * size, bits)
    L = _cholesky(_hankel(m, size + 1), ctx)
    logdets = []
    acc = ctx.mpf(0)
    for j in range(size + 1):
        acc += 2 * ctx.log(L[j][j])
        logdets.append(acc)
    # C = L^{-1}: row j holds the coefficients of p_j
    N = size + 1
    C = [[ctx.mpf(0)] * N for _ in range(N)]
    for j in range(N):
        C[j][j] = 1 / L[j][j]
        for k in range(j - 1, -1, -1):
            C[j][k] = -sum(L[j][i] * C[i][k] for i in range(k, j)) / L[j][j]
    kappa = tuple(C[j][j] for j in range(N))
    a = [ctx.mpf(0)] + [kappa[j - 1] / kappa[j] for j in range(1, N)]
    b = []
    for j in range(size):
        hi = C[j + 1][j] / C[j + 1][j + 1]
        lo = C[j][j - 1] / C[j][j] if j else 0
        b.append(lo - hi)
    if w.is_even:
        b = [ctx.mpf(0)] * size
    return MomentSystem(w, size, bits, tuple(m), tuple(logdets), kappa, tuple(a), tuple(b))


def _escalate(compute, bits0: int, target_digits: float, label: str):
    """Run ``compute(bits)`` at growing precision until two runs agree to ``target_digits``."""
    bits = bits0
    prev = compute(bits)
    while True:
        nxt_bits = int(bits * 1.5)
        if nxt_bits > ORACLE_MAX_BITS:
            raise PrecisionExhaustedError(f"{label}: no agreement to {target_digits} digits below {ORACLE_MAX_BITS} bits")
        cur = compute(nxt_bits)
        diff = abs(cur - prev)
        if diff <= mpmath.mpf(10) ** (-target_digits) * max(1, abs(cur)):
            return cur, nxt_bits
        log.info("%s: %s and %s bits differ by %s, escalating", label, bits, nxt_bits, mpmath.nstr(diff, 3))
        bits, prev = nxt_bits, cur


def log_partition(w: WeightSpec, n_size: Optional[int] = None, target_digits: int = 30, bits: Optional[int] = None):
    """log Z_hat = log n! + log det (m_{i+j})_{i,j<n}, escalated until stable.

    Returns (value, bits_used).  With ``bits`` the value is computed once at
    that precision.
    """
    n_size = w.n if n_size is None else n_size
    if n_size < 1:
        raise DomainError("n_size must be positive")

    def compute(b):
        ctx = numkit.context(b)
        m = moments(w, 2 * n_size - 2, b)
        L = _cholesky(_hankel(m, n_size), ctx)
        return ctx.loggamma(n_size + 1) + 2 * ctx.fsum(ctx.log(L[j][j]) for j in range(n_size))

    if bits is not None:
        return compute(bits), bits
    bits0 = numkit.digits_to_bits(DIGITS_PER_ROW * n_size + target_digits)
    return _escalate(compute, bits0, target_digits, f"log_partition(n={n_size})")


def delta_log_partition(V, alpha, n: int, t, target_digits: int = 30):
    """log Z_hat_n(t) - log Z_hat_n(0) for the weight exp(-nV) |x^2 - t|^alpha."""
    z1, b1 = log_partition(WeightSpec(V, alpha, t, n), target_digits=target_digits)
    z0, b0 = log_partition(WeightSpec(V, alpha, 0, n), target_digits=target_digits)
    return z1 - z0, max(b0, b1)


# ---------------------------------------------------------------------------
# kernels


def cd_kernel(sys: MomentSystem, x, y):
    """Christoffel-Darboux kernel K_n(x, y) with n = sys.size, including sqrt(w(x) w(y))."""
    ctx = sys.ctx
    w = sys.weight
    x, y = ctx.convert(x), ctx.convert(y)
    n = sys.size
    ratio = sys.kappa[n - 1] / sys.kappa[n]
    if x == y:
        p, dp = sys.polys(x, derivative=True)
        core = ratio * (dp[n] * p[n - 1] - dp[n - 1] * p[n])
        return w(x, ctx) * core
    px = sys.polys(x)
    py = sys.polys(y)
    core = ratio * (px[n] * py[n - 1] - px[n - 1] * py[n]) / (x - y)
    return ctx.sqrt(w(x, ctx) * w(y, ctx)) * core


def cd_kernel_sum(sys: MomentSystem, x, y):
    """sqrt(w(x) w(y)) sum_{j<n} p_j(x) p_j(y), an independent route to K_n."""
    ctx = sys.ctx
    w = sys.weight
    x, y = ctx.convert(x), ctx.convert(y)
    px = sys.polys(x, sys.size - 1)
    py = sys.polys(y, sys.size - 1)
    return ctx.sqrt(w(x, ctx) * w(y, ctx)) * ctx.fsum(p * q for p, q in zip(px, py))


@dataclass
class ScaledKernel:
    """(u, v) -> (1/(cn)) K_n(u/(cn), v/(cn)), c = psi_V(0) from the equilibrium solver."""

    system: MomentSystem
    psi0: object

    def __call__(self, u, v):
        ctx = self.system.ctx
        cn = ctx.convert(self.psi0) * self.system.weight.n
        return cd_kernel(self.system, ctx.convert(u) / cn, ctx.convert(v) / cn) / cn


def scaled_kernel_system(w: WeightSpec, bits: Optional[int] = None, meas: Optional[equilibrium.EquilibriumMeasure] = None) -> ScaledKernel:
    meas = meas or equilibrium.solve_one_cut(w.V)
    return ScaledKernel(build_moment_system(w, w.n, bits), meas.psi0)


def scaled_kernel(sys: MomentSystem, u, v, psi0=None):
    """(1/(cn)) K_n(u/(cn), v/(cn)) with n the weight's n."""
    if psi0 is None:
        psi0 = equilibrium.solve_one_cut(sys.weight.V).psi0
    return ScaledKernel(sys, psi0)(u, v)


# ---------------------------------------------------------------------------
# Toeplitz determinants


def _log_det_lu(A, ctx):
    """log det by LU with partial pivoting; the determinant must be positive."""
    n = len(A)
    A = [row[:] for row in A]
    total = ctx.mpf(0)
    sign = 1
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(A[i][k]))
        if A[piv][k] == 0:
            raise PrecisionExhaustedError(f"zero pivot at column {k}")
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        pk = A[k][k]
        total += ctx.log(pk)
        rowk = A[k]
        for i in range(k + 1, n):
            f = A[i][k] / pk
            if f != 0:
                rowi = A[i]
                for j in range(k + 1, n):
                    rowi[j] -= f * rowk[j]
    if sign < 0:
        total += ctx.mpc(0, ctx.pi)
    # log of a positive determinant: drop the branch bookkeeping
    if isinstance(total, mpmath.mpc) or hasattr(total, "imag"):
        re = ctx.re(total)
        im = ctx.im(total)
        turns = ctx.nint(im / (2 * ctx.pi))
        im -= 2 * ctx.pi * turns
        if abs(im) > ctx.ldexp(1, -ctx.prec // 2):
            raise DomainError("Toeplitz determinant is not positive")
        return re
    return total


def toeplitz_symbol(alpha, Vk: Mapping[int, object], t, mode: str, ctx):
    """theta -> f_t(e^{i theta}).

    emerging: e^{V} (2 cosh t - 2 cos theta)^alpha, the positive form of
    (z - e^t)^alpha (z - e^-t)^alpha z^-alpha e^{-pi i alpha};
    merging: e^{V} |2 cos theta - 2 cos t|^alpha.
    """
    a = ctx.convert(alpha)
    t = ctx.convert(t)
    items = [(int(k), ctx.convert(v)) for k, v in Vk.items()]

    def V(theta):
        val = ctx.fsum(v * ctx.expj(k * theta) for k, v in items) if items else ctx.mpf(0)
        return val

    if mode == "emerging":
        c = 2 * ctx.cosh(t)
        return lambda th: ctx.exp(V(th)) * (c - 2 * ctx.cos(th)) ** a
    if mode == "merging":
        c = 2 * ctx.cos(t)
        return lambda th: ctx.exp(V(th)) * abs(2 * ctx.cos(th) - c) ** a
    raise DomainError(f"unknown mode {mode!r}")


def _fourier_split(f, kmax, t, ctx):
    """Fourier coefficients of a symbol with kinks at +-t, panel-wise tanh-sinh."""
    ts = "tanh-sinh"
    cuts = [-ctx.pi, -t, t, ctx.pi]
    out = {k: ctx.mpc(0) for k in range(-kmax, kmax + 1)}
    tol = ctx.ldexp(1, -ctx.prec + 20)
    for lo, hi in zip(cuts, cuts[1:]):

        def fs(th):
            ft = f(th)
            e = ctx.expj(-th)
            vals = [ft]
            for _ in range(kmax):
                vals.append(vals[-1] * e)
            einv = 1 / e
            neg = [ft]
            for _ in range(kmax):
                neg.append(neg[-1] * einv)
            return vals + neg[1:]

        vals = _vector_panel(fs, lo, hi, ctx, ts, tol, max_degree=12)
        for k in range(kmax + 1):
            out[k] += vals[k] / (2 * ctx.pi)
        for k in range(1, kmax + 1):
            out[-k] += vals[kmax + k] / (2 * ctx.pi)
    return out


def toeplitz_det(alpha, Vk: Mapping[int, object], t, n_size: int, mode: str = "emerging", bits: int = 128):
    """log D_n(f_t) = log det (f_{j-k})_{j,k<n}.

    Smooth symbols use the periodic trapezoid rule; merging symbols with
    non-even alpha are split at the singular points.
    """
    ctx = numkit.context(bits)
    a = ctx.convert(alpha)
    if not a > -0.5:
        raise DomainError("alpha must exceed -1/2")
    t = ctx.convert(t)
    if mode == "emerging" and not t > 0 and a != 0:
        raise DomainError("emerging singularities need t > 0")
    if mode == "merging" and not (0 < t < ctx.pi) and a != 0:
        raise DomainError("merging singularities need t in (0, pi)")
    if n_size < 1:
        raise DomainError("n_size must be positive")
    f = toeplitz_symbol(alpha, Vk, t, mode, ctx)
    kmax = n_size - 1
    smooth = a == 0 or mode == "emerging" or (a == int(a) and int(a) % 2 == 0)
    if smooth:
        nodes = 64
        if mode == "emerging" and a != 0:
            nodes = max(64, 1 << int(math.ceil(math.log2(float(40 / t)))))
        coeffs = numkit.fourier_coefficients(f, kmax, bits, nodes=max(nodes, 2 * n_size))
    else:
        coeffs = _fourier_split(f, kmax, t, ctx)
    T = [[coeffs[j - k] for k in range(n_size)] for j in range(n_size)]
    return _log_det_lu(T, ctx)
