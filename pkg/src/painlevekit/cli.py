"""Command-line interface.

Every command writes JSON or CSV.  Numbers are decimal strings at the
requested number of digits, so identical arguments give identical files.
JSON output carries a "header" object and CSV output starts with "# " lines
holding the command line, precision and version.

Exit codes: 0 success, 2 domain error (including bad flags), 3 precision
exhausted, 4 internal-consistency failure, 1 any other library error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import re
import sys
import time
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath

from . import __version__, acceptance, asymptotics, equilibrium, kernels, numkit, oracle, painleve, schlesinger
from .errors import ArtifactError, DomainError

log = logging.getLogger("painlevekit")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags already; keep stdout clean."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(2)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_number(text: str, ctx):
    """Real or complex decimal literal ('0.5', '-2j', '1-0.5j') at full precision."""
    t = text.strip().replace(" ", "")
    try:
        if not t.endswith("j"):
            return ctx.mpf(t)
        body = t[:-1]
        cut = -1
        for i in range(len(body) - 1, 0, -1):
            if body[i] in "+-" and body[i - 1] not in "eE":
                cut = i
                break
        if cut < 0:
            re, im = "0", body
        else:
            re, im = body[:cut], body[cut:]
        if im in ("", "+", "-"):
            im += "1"
        return ctx.mpc(ctx.mpf(re), ctx.mpf(im))
    except (ValueError, TypeError) as exc:
        raise DomainError(f"cannot parse number {text!r}") from exc


def parse_exact(text: str):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse {text!r} as an exact decimal or fraction") from exc


def parse_grid(text: str, ctx) -> List:
    """'u0:u1:n' -> n equally spaced points including both ends."""
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must look like 'u0:u1:n', got {text!r}")
    lo, hi = parse_number(parts[0], ctx), parse_number(parts[1], ctx)
    try:
        n = int(parts[2])
    except ValueError as exc:
        raise DomainError(f"grid size {parts[2]!r} is not an integer") from exc
    if n < 1:
        raise DomainError("grid needs at least one point")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * j / (n - 1) for j in range(n)]


def parse_fourier(text: str):
    """'k:V_k,...' -> {k: V_k}; empty string means V = 0."""
    out = {}
    for item in filter(None, (p.strip() for p in (text or "").split(","))):
        try:
            k, v = item.split(":")
            out[int(k)] = str(v)
        except ValueError as exc:
            raise DomainError(f"Fourier coefficient {item!r} must look like 'k:value'") from exc
    return out


# ---------------------------------------------------------------------------
# output


def fmt(x, digits: int):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {k: fmt(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v, digits) for v in x]
    if hasattr(x, "imag") and hasattr(x, "_mpc_"):
        if x.imag == 0:
            return mpmath.nstr(x.real, digits)
        return {"re": mpmath.nstr(x.real, digits), "im": mpmath.nstr(x.imag, digits)}
    return mpmath.nstr(x, digits)


def csv_cell(x, digits: int) -> str:
    v = fmt(x, digits)
    if isinstance(v, dict):
        return f"{v['re']}{'' if v['im'].startswith('-') else '+'}{v['im']}j"
    return str(v)


class Output:
    def __init__(self, args, argv: Sequence[str]):
        self.args = args
        self.header = {
            "command": "painlevekit " + " ".join(argv),
            "precision_bits": args.precision_bits,
            "digits": args.digits,
            "version": __version__,
        }

    def _write(self, text: str):
        if self.args.out:
            with open(self.args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    def json(self, payload: dict):
        body = {"header": self.header}
        body.update(fmt(payload, self.args.digits))
        self._write(json.dumps(body, indent=2) + "\n")

    def csv(self, columns: Sequence[str], rows):
        buf = io.StringIO()
        for k, v in self.header.items():
            buf.write(f"# {k}: {v}\n")
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(csv_cell(x, self.args.digits) for x in row) + "\n")
        self._write(buf.getvalue())


# ---------------------------------------------------------------------------
# commands


def _ray_point(family: str, text: str, ctx):
    s = parse_number(text, ctx)
    # a positive magnitude for the plus family means s = -i |s|
    if family == "plus" and ctx.im(ctx.convert(s)) == 0 and s > 0:
        s = ctx.mpc(0, -s)
    return s


def cmd_sigma(args, out: Output):
    bits = args.precision_bits
    ctx = numkit.context(bits)
    if args.provenance == "ode":
        start = _ray_point(args.family, args.start, ctx)
        end = _ray_point(args.family, args.end, ctx)
        sol = painleve.integrate_sigma(args.alpha_value, args.family, start, end, bits=bits)
    else:
        sol = painleve.sigma_solution(args.alpha_value, args.family, bits, provenance=args.provenance)
    points = [_ray_point(args.family, p, ctx) for p in args.s.split(",")] if args.s else []
    if args.grid:
        points += [_ray_point(args.family, str(p), ctx) for p in parse_grid(args.grid, ctx)]
    if not points:
        raise DomainError("give --s or --grid")
    rows = []
    for s in points:
        sig, d1, d2 = sol(s)
        rows.append((s, sig, d1, painleve.sigma_form_residual((sig, d1, d2), s, sol.alpha)))
    cols = ("s", "sigma", "dsigma", "residual")
    if args.format == "csv":
        out.csv(cols, rows)
    elif len(rows) == 1:
        payload = dict(zip(cols, rows[0]))
        payload.update({"alpha": args.alpha, "family": args.family, "provenance": sol.provenance})
        out.json(payload)
    else:
        out.json({"alpha": args.alpha, "family": args.family, "provenance": sol.provenance, "rows": [dict(zip(cols, r)) for r in rows]})


def cmd_xalpha(args, out: Output):
    ctx = numkit.context(args.precision_bits)
    s = parse_number(args.s, ctx)
    x = schlesinger.build(int(args.alpha_value), s, args.precision_bits)
    payload = schlesinger.to_json(x, args.digits)
    if args.z:
        z = parse_number(args.z, ctx)
        payload["X"] = schlesinger.evaluate(x, z, args.side)
        payload["z"] = z
    out.json(payload)


def _kernel_fn(args):
    bits = args.precision_bits
    ctx = numkit.context(bits)
    tau = parse_number(args.tau, ctx)
    return kernels.kernel(args.kind, args.alpha_value, tau, bits)


def cmd_kernel(args, out: Output):
    ctx = numkit.context(args.precision_bits)
    K = _kernel_fn(args)
    grid = parse_grid(args.grid, ctx)
    if args.format == "csv":
        out.csv(("u", "v", "K"), ((u, v, K(u, v)) for u in grid for v in grid))
    else:
        out.json({"kind": args.kind, "alpha": args.alpha, "tau": args.tau, "grid": grid, "K": [[K(u, v) for v in grid] for u in grid]})


def cmd_equilibrium(args, out: Output):
    bits = args.precision_bits
    ctx = numkit.context(bits)
    V = equilibrium.PotentialSpec.parse(args.potential)
    meas = equilibrium.solve_one_cut(V, bits)
    pts = [meas.a + (meas.b - meas.a) * j / 11 for j in range(1, 11)]
    res = max(equilibrium.el_residual(meas, x) for x in pts)
    out.json({"a": meas.a, "b": meas.b, "psi0": meas.psi0, "ell": meas.ell, "el_residual_max": res})


def cmd_predict(args, out: Output):
    V = equilibrium.PotentialSpec.parse(args.potential)
    rep = asymptotics.predict_delta_logZ(args.alpha_value, V, args.n, parse_exact(args.t), bits=args.precision_bits, use_s_hat=args.s_hat)
    sp = rep.scaling
    out.json(
        {
            "predicted_value": rep.predicted_value,
            "components": rep.components,
            "error_budget": rep.error_budget,
            "scaling": {"n": sp.n, "t": sp.t, "s_nt": sp.s_nt, "s_hat_nt": sp.s_hat_nt, "tau_nt": sp.tau_nt},
            "closed_form_gap": rep.closed_form_gap,
        }
    )


def cmd_toeplitz_predict(args, out: Output):
    Vk = parse_fourier(args.fourier)
    val = asymptotics.toeplitz_expansion(int(args.alpha_value), args.mode, Vk, args.n, args.t, bits=args.precision_bits)
    out.json({"alpha": args.alpha, "mode": args.mode, "n": args.n, "t": args.t, "prediction": val})


def cmd_constants(args, out: Output):
    bits = args.precision_bits
    payload = {"alpha": args.alpha, "connection_constant": asymptotics.connection_constant(args.alpha_value, bits)}
    if args.theta:
        cc = asymptotics.corollary_constants(args.alpha_value, args.theta, bits=min(bits, 128), v_max=args.v_max)
        payload.update({"theta": args.theta, "C1": cc.C1, "C2": cc.C2, "C3": cc.C3, "details": cc.details})
    out.json(payload)


def cmd_oracle(args, out: Output):
    V = equilibrium.PotentialSpec.parse(args.potential) if getattr(args, "potential", None) else None
    if args.oracle_cmd == "hankel":
        w = oracle.WeightSpec(V, parse_exact(args.alpha), parse_exact(args.t), args.n)
        val, used = oracle.log_partition(w, target_digits=args.digits)
        out.json({"n": args.n, "t": args.t, "alpha": args.alpha, "logZ": val, "working_bits": used})
    elif args.oracle_cmd == "kernel":
        ctx = numkit.context(args.precision_bits)
        w = oracle.WeightSpec(V, parse_exact(args.alpha), parse_exact(args.t), args.n)
        meas = equilibrium.solve_one_cut(V, args.precision_bits)
        sk = oracle.scaled_kernel_system(w, meas=meas)
        sp = equilibrium.scaling(meas, args.n, ctx.convert(w.t), args.precision_bits)
        grid = parse_grid(args.grid, ctx)
        alpha = args.alpha_value
        if alpha == 0:
            limit = lambda u, v: kernels.sine_kernel(u, v, args.precision_bits)
        elif sp.tau_nt == 0:
            limit = lambda u, v: kernels.bessel_kernel(alpha, u, v, args.precision_bits)
        else:
            limit = lambda u, v: kernels.pv_kernel(alpha, sp.tau_nt, u, v, args.precision_bits)
        rows = []
        for u in grid:
            for v in grid:
                e, l = sk(u, v), limit(u, v)
                rows.append((u, v, e, l, abs(e - l)))
        out.csv(("u", "v", "K_exact", "K_limit", "abs_err"), rows)
    else:
        Vk = parse_fourier(args.fourier)
        logD = oracle.toeplitz_det(args.alpha_value, Vk, args.t, args.n, args.mode, bits=min(args.precision_bits, 192))
        pred = asymptotics.toeplitz_expansion(int(args.alpha_value), args.mode, Vk, args.n, args.t, bits=args.precision_bits)
        out.json({"n": args.n, "t": args.t, "logD": logD, "prediction": pred, "gap": abs(logD - pred)})


def cmd_verify(args, out: Output) -> int:
    t0 = time.perf_counter()
    results = acceptance.run_suite(args.suite, args.filter)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    failed = [r.criterion_id for r in results if not r.passed]
    if args.format == "csv":
        out.csv(["id", "status", "wall_time", "title"], [(r.criterion_id, r.status, round(r.wall_time, 3), r.title) for r in results])
        return 1 if failed else 0
    out.json(
        {
            "suite": args.suite,
            "results": [r.to_json() for r in results],
            "failed": failed,
            "wall_time": round(time.perf_counter() - t0, 3),
        }
    )
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=256)
    common.add_argument("--digits", type=int, default=30)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work runs on one thread")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="painlevekit", description="Painleve V model problems, kernels and finite-n oracles")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("sigma", parents=[common], help="sigma_alpha^+- with derivatives and sigma-form residual")
    s.add_argument("--alpha", required=True)
    s.add_argument("--family", choices=painleve.FAMILIES, required=True)
    s.add_argument("--s", help="comma-separated points; for the plus family a positive value means s = -i|s|")
    s.add_argument("--grid", help="'s0:s1:n'")
    s.add_argument("--provenance", default="auto", choices=("auto", "closed-form", "recursion", "ode"))
    s.add_argument("--start", default="40", help="ODE: large-s starting point")
    s.add_argument("--end", default="0.5", help="ODE: end of the integration segment")
    s.set_defaults(func=cmd_sigma)

    x = sub.add_parser("xalpha", parents=[common], help="polynomial representation of X_alpha")
    x.add_argument("--alpha", required=True)
    x.add_argument("--s", required=True)
    x.add_argument("--z", help="also evaluate X_alpha at z")
    x.add_argument("--side", choices=("+", "-"), help="bank of (0,1) for z on the cut")
    x.set_defaults(func=cmd_xalpha)

    k = sub.add_parser("kernel", parents=[common], help="sine, Bessel or Painleve V kernel (pi scaling applied internally)")
    k.add_argument("--kind", choices=("sine", "bessel", "pv"), required=True)
    k.add_argument("--alpha", default="0")
    k.add_argument("--tau", default="0")
    k.add_argument("--grid", required=True, help="'u0:u1:n'")
    k.set_defaults(func=cmd_kernel)

    e = sub.add_parser("equilibrium", parents=[common], help="one-cut equilibrium measure")
    e.add_argument("--potential", required=True, help="'c0,c1,c2,...' low degree first")
    e.set_defaults(func=cmd_equilibrium)

    pr = sub.add_parser("predict", parents=[common], help="predicted log Z_n(t) - log Z_n(0)")
    pr.add_argument("--alpha", required=True)
    pr.add_argument("--potential", default="0,0,2")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--t", required=True)
    pr.add_argument("--s-hat", action="store_true", help="use the linearised s_hat")
    pr.set_defaults(func=cmd_predict)

    tp = sub.add_parser("toeplitz-predict", parents=[common], help="explicit Toeplitz expansion")
    tp.add_argument("--alpha", required=True)
    tp.add_argument("--mode", choices=("emerging", "merging"), default="emerging")
    tp.add_argument("--fourier", default="", help="'k:V_k,...'")
    tp.add_argument("--n", type=int, required=True)
    tp.add_argument("--t", required=True)
    tp.set_defaults(func=cmd_toeplitz_predict)

    c = sub.add_parser("constants", parents=[common], help="connection constant and C_1, C_2, C_3")
    c.add_argument("--alpha", required=True)
    c.add_argument("--theta", help="theta in (0,1); rho is taken identically 1")
    c.add_argument("--v-max", type=int, default=200)
    c.set_defaults(func=cmd_constants)

    o = sub.add_parser("oracle", help="exact finite-n computations")
    osub = o.add_subparsers(dest="oracle_cmd", required=True, parser_class=_Parser)
    oh = osub.add_parser("hankel", parents=[common])
    ok = osub.add_parser("kernel", parents=[common])
    for q in (oh, ok):
        q.add_argument("--alpha", required=True)
        q.add_argument("--potential", default="0,0,2")
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--t", required=True)
    ok.add_argument("--grid", required=True)
    ot = osub.add_parser("toeplitz", parents=[common])
    ot.add_argument("--alpha", required=True)
    ot.add_argument("--mode", choices=("emerging", "merging"), default="emerging")
    ot.add_argument("--fourier", default="")
    ot.add_argument("--n", type=int, required=True)
    ot.add_argument("--t", required=True)
    for q in (oh, ok, ot):
        q.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", parents=[common], help="run the unit invariants and/or acceptance criteria")
    v.add_argument("--suite", choices=("unit", "acceptance", "all"), default="acceptance")
    v.add_argument("--filter", default=None)
    v.set_defaults(func=cmd_verify)
    return p


_NEGATIVE = re.compile(r"^-(\d|\.\d)")


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """'--t -1/1024' -> '--t=-1/1024'; argparse would take -1/1024 for a flag."""
    out: List[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if hasattr(args, "alpha"):
            args.alpha_value = parse_exact(args.alpha)
            if args.alpha_value.denominator == 1:
                args.alpha_value = int(args.alpha_value)
        out = Output(args, argv)
        code = args.func(args, out)
        return int(code or 0)
    except ArtifactError as exc:
        sys.stderr.write(f"error ({type(exc).__name__}): {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
