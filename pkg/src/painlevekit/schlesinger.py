"""Recursive construction of the model matrix X_alpha(z; s) for integer alpha.

X_alpha is stored as

    X_alpha(z) = (z(z-1))**(-alpha/2) * M(z) * exp(-s z sigma3 / 2)

with M a 2x2 matrix of exact polynomials of degree <= alpha.  One Schlesinger
step maps M_alpha to M_{alpha+1}; every cancellation the construction relies
on is checked at run time.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import mpmath

from . import numkit
from .errors import BranchAmbiguousError, DomainError, InternalConsistencyError, StepSingularError, UnsupportedError
from .numkit import PolySeries

log = logging.getLogger(__name__)

Matrix = List[List]  # 2x2 nested list of mp numbers


@dataclass(frozen=True)
class XRep:
    alpha: int
    s: object
    M: Tuple[Tuple[PolySeries, PolySeries], Tuple[PolySeries, PolySeries]]
    bits: int
    work_bits: int
    family: str = "minus"

    @property
    def ctx(self):
        return numkit.context(self.work_bits)


@dataclass(frozen=True)
class SchlesingerStep:
    alpha: int
    s: object
    P: Matrix
    Q: Matrix
    condition: float

    def W(self, z):
        """W(z) = I + P/z + Q/(z-1)."""
        return [[(1 if i == j else 0) + self.P[i][j] / z + self.Q[i][j] / (z - 1) for j in range(2)] for i in range(2)]


@dataclass(frozen=True)
class InfinityData:
    q: object
    r: object
    p: object


# ---------------------------------------------------------------------------
# helpers


def _mat_mul(A, B):
    return [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]


def _mat_inv(A):
    d = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    return [[A[1][1] / d, -A[0][1] / d], [-A[1][0] / d, A[0][0] / d]]


def _det(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def _poly(coeffs) -> PolySeries:
    return PolySeries(coeffs)


def family_of(s, ctx) -> str:
    s = ctx.convert(s)
    if ctx.im(s) == 0 and ctx.re(s) > 0:
        return "minus"
    if ctx.re(s) == 0 and ctx.im(s) < 0:
        return "plus"
    return "off-ray"


def guard_bits(alpha: int, s) -> int:
    """Extra working precision for the recursion at (alpha, s).

    Small |s| costs about alpha*(alpha+1)/2 * log2(1/|s|) bits through near-singular
    step systems; large |s| costs about alpha*|Re s|*log2(e) through exponentially
    large coefficients.
    """
    a = abs(complex(s))
    g = 24 + 4 * alpha
    if a < 4:
        g += int(math.ceil((alpha * (alpha + 1) // 2 + alpha + 2) * math.log2(4.0 / a)))
    g += int(math.ceil(1.45 * (alpha + 1) * abs(complex(s).real)))
    # odd steps degenerate where e^s = 1, i.e. s = 2*pi*i*k
    k = round(complex(s).imag / (2 * math.pi))
    if k != 0:
        d = abs(complex(s) - 2j * math.pi * k)
        if d < 1:
            g += int(math.ceil(2 * (alpha + 2) * math.log2(1.0 / max(d, 1e-300))))
    return g


def _tol(ctx, scale):
    return ctx.ldexp(1, -ctx.prec // 2) * max(scale, 1)


# ---------------------------------------------------------------------------
# construction


def x0(s, bits: int = numkit.DEFAULT_BITS, work_bits: Optional[int] = None) -> XRep:
    """X_0(z) = exp(-s z sigma3 / 2), i.e. M = I."""
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    if s == 0:
        raise DomainError("s = 0 is a degenerate parameter")
    wb = work_bits or bits
    s = numkit.context(wb).convert(s)
    one, zero = _poly([1]), _poly([0])
    return XRep(0, s, ((one, zero), (zero, one)), bits, wb, family_of(s, numkit.context(wb)))


def local_series_at_zero(x: XRep, order: Optional[int] = None):
    """Series of G_alpha(z) around z = 0 as a 2x2 matrix of PolySeries.

    G(z) = X(z) [[1,0],[-(-1)^alpha,1]] z^(-alpha sigma3/2); the first column
    of M(z) E(z) L must vanish to order z^alpha, which is asserted.
    """
    ctx = x.ctx
    a = x.alpha
    K = (a + 4) if order is None else order
    wb = x.work_bits
    em = numkit.exp_series(-x.s / 2, K, wb)
    ep = numkit.exp_series(x.s / 2, K, wb)
    sgn = -1 if a % 2 == 0 else 1  # -(-1)^alpha
    M = [[PolySeries(m.coeffs, K) for m in row] for row in x.M]
    col1 = [M[i][0] * em + M[i][1] * ep * sgn for i in range(2)]
    col2 = [M[i][1] * ep for i in range(2)]
    scale = max(max(M[i][j].max_abs() for i in range(2) for j in range(2)), 1)
    tol = _tol(ctx, scale)
    col1 = [c.shift_down(a, tol) for c in col1]
    col2 = [c.truncate(K - a) for c in col2]
    pref = numkit.binomial_series(ctx.mpf(-a) / 2, K - a, wb, sign=-1) * ctx.expjpi(-ctx.mpf(a) / 2)
    return [[col1[0] * pref, col2[0] * pref], [col1[1] * pref, col2[1] * pref]]


def local_frame_at_zero(x: XRep):
    """Return (G_alpha(0), G_alpha'(0))."""
    G = local_series_at_zero(x)
    G0 = [[G[i][j][0] for j in range(2)] for i in range(2)]
    G1 = [[G[i][j][1] for j in range(2)] for i in range(2)]
    return G0, G1


def solve_step(x: XRep) -> SchlesingerStep:
    ctx = x.ctx
    # only G(0) is needed here, so the series stops at z^alpha
    G = local_series_at_zero(x, order=x.alpha + 1)
    G0 = [[G[i][j][0] for j in range(2)] for i in range(2)]
    g11, g21 = G0[0][0], G0[1][0]
    es = ctx.exp(-x.s)
    # [g11, g21; e^{-s} g21, g11] (P21, P22)^T = (-g21, 0)^T
    det = g11 * g11 - es * g21 * g21
    norm = max(abs(g11), abs(g21), abs(es * g21))
    cond = float(norm * norm / abs(det)) if det != 0 else math.inf
    if det == 0 or cond > 2.0 ** (0.75 * ctx.prec):
        raise StepSingularError(
            f"Schlesinger step alpha={x.alpha} is singular at s={mpmath.nstr(x.s, 10)} (condition {cond:.3g})",
            condition=cond,
        )
    p21 = -g21 * g11 / det
    p22 = es * g21 * g21 / det
    P = [[ctx.mpf(0), ctx.mpf(0)], [p21, p22]]
    Q = [[-p22, -es * p21], [ctx.mpf(0), ctx.mpf(0)]]
    return SchlesingerStep(x.alpha, x.s, P, Q, cond)


def step(x: XRep, st: SchlesingerStep) -> XRep:
    """M_{alpha+1} = sigma3 adj(N) diag(z, z-1) M_alpha sigma3 / (z(z-1)),
    N(z) = z(z-1) I + (z-1) P + z Q."""
    ctx = x.ctx
    P, Q = st.P, st.Q
    zz = _poly([0, -1, 1])
    N = [[zz * (1 if i == j else 0) + _poly([-P[i][j], P[i][j]]) + _poly([0, Q[i][j]]) for j in range(2)] for i in range(2)]
    adj = [[N[1][1], -N[0][1]], [-N[1][0], N[0][0]]]
    D = [_poly([0, 1]), _poly([-1, 1])]
    DM = [[D[i] * x.M[i][j] for j in range(2)] for i in range(2)]
    R = [[adj[i][0] * DM[0][j] + adj[i][1] * DM[1][j] for j in range(2)] for i in range(2)]
    scale = max(R[i][j].max_abs() for i in range(2) for j in range(2))
    tol = _tol(ctx, scale)
    newM = []
    for i in range(2):
        row = []
        for j in range(2):
            q, r = R[i][j].divmod_poly(zz)
            if r.max_abs() > tol:
                raise InternalConsistencyError(
                    f"step alpha={x.alpha}: entry ({i},{j}) leaves remainder {mpmath.nstr(r.max_abs(), 5)} after division by z(z-1)"
                )
            q = PolySeries(q.coeffs[: x.alpha + 2])
            row.append(q if i == j else -q)
        newM.append(tuple(row))
    a1 = x.alpha + 1
    for i in range(2):
        for j in range(2):
            lead = newM[i][j][a1] if len(newM[i][j]) > a1 else 0
            if abs(lead - (1 if i == j else 0)) > tol:
                raise InternalConsistencyError(f"step alpha={x.alpha}: leading coefficient of M is not the identity")
    out = XRep(a1, x.s, (newM[0], newM[1]), x.bits, x.work_bits, x.family)
    defect = det_defect(out)
    if defect > _tol(ctx, scale):
        raise InternalConsistencyError(f"det M_{a1} differs from (z(z-1))^{a1} by {mpmath.nstr(defect, 5)}")
    return out


@functools.lru_cache(maxsize=512)
def _build_cached(alpha: int, s_key: Tuple[str, str], bits: int, work_bits: int) -> XRep:
    ctx = numkit.context(work_bits)
    s = ctx.mpc(ctx.mpf(s_key[0]), ctx.mpf(s_key[1]))
    if s.imag == 0:
        s = s.real
    x = x0(s, bits, work_bits)
    for _ in range(alpha):
        x = step(x, solve_step(x))
    return x


def _s_key(s, ctx):
    s = ctx.convert(s)
    return (mpmath.libmp.to_str(ctx.re(s)._mpf_, ctx.dps + 20), mpmath.libmp.to_str(ctx.im(s)._mpf_, ctx.dps + 20))


def build(alpha: int, s, bits: int = numkit.DEFAULT_BITS, family: Optional[str] = None, work_bits: Optional[int] = None) -> XRep:
    """X_alpha(.; s) by alpha Schlesinger steps from X_0.

    ``family`` is "minus" (s > 0), "plus" (s on the negative imaginary axis,
    even alpha only) or "any" for analytic continuation off the two rays, used
    internally by contour derivatives.
    """
    alpha = numkit.exact(alpha)
    if int(alpha) != alpha or alpha < 0:
        raise UnsupportedError("the recursion needs an integer alpha >= 0; non-integer alpha requires a numerical RH solver")
    alpha = int(alpha)
    ctx = numkit.context(bits)
    s = ctx.convert(s)
    if s == 0:
        raise DomainError("s = 0 is a degenerate parameter")
    fam = family_of(s, ctx)
    if family is None:
        family = fam
        if fam == "off-ray":
            raise DomainError("s must be positive real or negative imaginary")
    elif family in ("minus", "plus") and fam != family:
        raise DomainError(f"s = {mpmath.nstr(s, 8)} is not on the ray of family {family!r}")
    elif family not in ("minus", "plus", "any"):
        raise DomainError(f"unknown family {family!r}")
    if family == "plus" and alpha % 2 == 1:
        raise UnsupportedError("for s on the negative imaginary axis only even alpha gives the model problem")
    wb = work_bits if work_bits is not None else bits + guard_bits(alpha, s)
    x = _build_cached(alpha, _s_key(s, numkit.context(wb)), bits, wb)
    return x if x.family == family else XRep(x.alpha, x.s, x.M, x.bits, x.work_bits, family)


def infinity_data(x: XRep) -> InfinityData:
    """q, r, p from X e^{s z sigma3/2} = I + [[q, r], [p, -q]]/z + O(z^-2)."""
    ctx = x.ctx
    a = x.alpha
    if a == 0:
        z = ctx.mpf(0)
        return InfinityData(z, z, z)
    c = [[x.M[i][j][a - 1] for j in range(2)] for i in range(2)]
    half = ctx.mpf(a) / 2
    q = c[0][0] + half
    q2 = c[1][1] + half
    scale = max(abs(q), 1)
    if abs(q + q2) > _tol(ctx, scale):
        raise InternalConsistencyError("1/z coefficient at infinity is not trace-free")
    return InfinityData(q, c[0][1], c[1][0])


# ---------------------------------------------------------------------------
# evaluation


def _classify(z, ctx, side):
    if ctx.im(z) == 0:
        xr = ctx.re(z)
        if 0 <= xr <= 1:
            if xr == 0 or xr == 1:
                raise DomainError("X_alpha is singular at z = 0 and z = 1")
            if side not in ("+", "-"):
                raise BranchAmbiguousError("z lies on (0,1): pass side='+' or side='-'")
            return side
    return None


def prefactor(alpha: int, z, ctx, side=None):
    """(z(z-1))^(-alpha/2) as the product of principal branches, with boundary
    values on (0,1): side '+' is the upper bank."""
    z = ctx.convert(z)
    a = ctx.mpf(alpha) / 2
    sd = _classify(z, ctx, side)
    if sd is None:
        return ctx.power(z, -a) * ctx.power(z - 1, -a)
    xr = ctx.re(z)
    phase = ctx.expjpi(-a) if sd == "+" else ctx.expjpi(a)
    return ctx.power(xr, -a) * ctx.power(1 - xr, -a) * phase


def _E(s, z, ctx):
    return ctx.exp(-s * z / 2), ctx.exp(s * z / 2)


def evaluate(x: XRep, z, side: Optional[str] = None) -> Matrix:
    """X_alpha(z) off [0,1], or its boundary value on (0,1) from the given side."""
    ctx = x.ctx
    z = ctx.convert(z)
    f = prefactor(x.alpha, z, ctx, side)
    em, ep = _E(x.s, z, ctx)
    M = [[x.M[i][j](z) for j in range(2)] for i in range(2)]
    return [[f * M[i][0] * em, f * M[i][1] * ep] for i in range(2)]


def evaluate_with_derivative(x: XRep, z, side: Optional[str] = None):
    """(X(z), dX/dz) from the analytic product rule."""
    ctx = x.ctx
    z = ctx.convert(z)
    f = prefactor(x.alpha, z, ctx, side)
    dlogf = -ctx.mpf(x.alpha) / 2 * (1 / z + 1 / (z - 1))
    em, ep = _E(x.s, z, ctx)
    M = [[x.M[i][j](z) for j in range(2)] for i in range(2)]
    dM = [[x.M[i][j].derivative()(z) for j in range(2)] for i in range(2)]
    X = [[f * M[i][0] * em, f * M[i][1] * ep] for i in range(2)]
    h = x.s / 2
    dX = [
        [
            f * ((dlogf * M[i][0] + dM[i][0]) * em - h * M[i][0] * em),
            f * ((dlogf * M[i][1] + dM[i][1]) * ep + h * M[i][1] * ep),
        ]
        for i in range(2)
    ]
    return X, dX


def det_defect(x: XRep):
    """max |coefficient| of det M(z) - (z(z-1))^alpha."""
    d = x.M[0][0] * x.M[1][1] - x.M[0][1] * x.M[1][0]
    target = PolySeries([1])
    for _ in range(x.alpha):
        target = target * _poly([0, -1, 1])
    diff = d - target
    return diff.max_abs()


def symmetry_defect(x: XRep):
    """Coefficient-level check of X(z+1/2) = e^{-s sigma3/2} sigma1 X(1/2-z) sigma1:
    M(w) = (-1)^alpha e^{-s sigma3/2} sigma1 M(1-w) sigma1 e^{s sigma3/2}."""
    ctx = x.ctx
    sign = -1 if x.alpha % 2 else 1
    es = ctx.exp(-x.s)
    worst = ctx.mpf(0)
    for i in range(2):
        for j in range(2):
            flipped = x.M[1 - i][1 - j].compose_affine(1, -1)
            # conjugation by e^{-s sigma3/2}: entry (0,1) gets e^{-s}, entry (1,0) gets e^{s}
            fac = es if (i, j) == (0, 1) else (1 / es if (i, j) == (1, 0) else 1)
            diff = x.M[i][j] - flipped * (sign * fac)
            worst = max(worst, diff.max_abs() / max(x.M[i][j].max_abs(), 1))
    return worst


def to_json(x: XRep, digits: Optional[int] = None) -> dict:
    ctx = x.ctx
    n = digits or numkit.bits_to_digits(x.bits)
    s = ctx.convert(x.s)

    def c2s(c):
        c = ctx.convert(c)
        return {"re": mpmath.nstr(ctx.re(c), n), "im": mpmath.nstr(ctx.im(c), n)}

    return {
        "alpha": x.alpha,
        "s": c2s(s),
        "family": x.family,
        "M": [[[c2s(c) for c in x.M[i][j].coeffs] for j in range(2)] for i in range(2)],
    }


# ---------------------------------------------------------------------------
# closed forms for alpha = 1, 2 (independent cross-check)


def closed_form(alpha: int, z, s, bits: int = numkit.DEFAULT_BITS, side: Optional[str] = None) -> Matrix:
    """Explicit X_1 and X_2, written out by hand, with the same branch recipe."""
    g = 40 + (int(8 * math.log2(4 / abs(complex(s)))) if abs(complex(s)) < 4 else 0)
    ctx = numkit.context(bits + g)
    z = ctx.convert(z)
    s = ctx.convert(s)
    e = ctx.exp(s)
    em, ep = _E(s, z, ctx)
    if alpha == 0:
        return [[em, 0], [0, ep]]
    f = prefactor(alpha, z, ctx, side)
    if alpha == 1:
        d = e - 1
        m = [[1 + d * z, -1], [e, -e + z * d]]
        c = f / d
    elif alpha == 2:
        d = 1 - e * (2 + s * s) + e * e
        m11 = 1 + e * (s - 1) - 2 * z + e * z * (2 - 2 * s + s * s) + z * z - e * z * z * (2 + s * s - e)
        m21 = e * (-1 - s + e + z * (2 + s + e * (-2 + s)))
        m12 = 1 - e + e * s - z * (2 + s + e * (s - 2))
        m22 = e * (-1 - s + e) + z * e * (2 + 2 * s + s * s - 2 * e) + z * z + z * z * e * (-2 - s * s + e)
        m = [[m11, m12], [m21, m22]]
        c = f / d
    else:
        raise UnsupportedError("closed forms are only available for alpha <= 2")
    out = [[c * m[i][0] * em, c * m[i][1] * ep] for i in range(2)]
    bctx = numkit.context(bits)
    return [[+bctx.convert(v) for v in row] for row in out]
