"""Command-line entry point.

    ctcbilliard [--output-dir DIR] [--quiet] [--workers N] <command> ...

Exit status: 0 success, 1 numerical failure (non-convergence, accuracy,
blow-up, failed sweep points), 2 invalid input.
"""

import argparse
import concurrent.futures
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import nls, selfcons, specfun, stability
from .errors import (AccuracyError, BlowUpError, DegenerateCouplingError, DivergenceError,
                     DomainError, NoRootError, PreconditionError)
from .kernel import kernel_closed, kernel_quadrature
from .model import GaussianPacket, KernelParams, normalize
from .quadrature import QuadratureSpec

WORKERS_ENV = "CTCBILLIARD_WORKERS"


class ConfigError(DomainError):
    """Malformed configuration; the message names the offending field."""


class _Failed(Exception):
    # numerical failure after artifacts were written; carries the summary line
    pass


# ---------------------------------------------------------------------------
# output helpers


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _write(ctx, name, text, binary=False):
    out = Path(ctx.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    if binary:
        path.write_bytes(text)
    else:
        path.write_text(text, encoding="utf-8")
    return path


def _say(ctx, line):
    if not ctx.quiet:
        print(line)


# ---------------------------------------------------------------------------
# configuration and validation


def _load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config: file not found: {path}")
    try:
        cfg = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    return cfg


def _section(cfg, key):
    sec = cfg.get(key, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{key}: expected an object")
    return sec


def _num(sec, key, default=None, where="", positive=False, integer=False, minimum=None):
    name = f"{where}.{key}" if where else key
    if key not in sec or sec[key] is None:
        if default is None:
            raise ConfigError(f"{name}: required field missing")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{name}: must be finite")
    if integer:
        if int(v) != v:
            raise ConfigError(f"{name}: expected an integer, got {v}")
        v = int(v)
    if positive and not v > 0:
        raise ConfigError(f"{name}: must be positive, got {v}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{name}: must be >= {minimum}, got {v}")
    return v


def _override(sec, **flags):
    out = dict(sec)
    for k, v in flags.items():
        if v is not None:
            out[k] = v
    return out


def _packet(cfg, **flags):
    sec = _override(_section(cfg, "packet"), **flags)
    _num(sec, "a", where="packet", positive=True)
    for key in ("b_x", "b_y", "c_re", "c_im"):
        _num(sec, key, 0.0, where="packet")
    try:
        packet = GaussianPacket.from_dict(sec)
    except DomainError as exc:
        raise ConfigError(f"packet: {exc}") from None
    if sec.get("normalize", False):
        packet = normalize(packet)
    return packet


def _kernel_params(cfg, **flags):
    sec = _override(_section(cfg, "kernel"), **flags)
    _num(sec, "coupling", 1.0, where="kernel")
    eps = _num(sec, "epsilon", 0.1, where="kernel")
    if not 0 < eps < 1:
        raise ConfigError(f"kernel.epsilon: must lie in (0, 1), got {eps}")
    variant = sec.get("variant", "coulomb")
    if variant not in ("coulomb", "yukawa"):
        raise ConfigError(f"kernel.variant: expected 'coulomb' or 'yukawa', got {variant!r}")
    mass = _num(sec, "yukawa_mass", 0.0, where="kernel")
    if variant == "yukawa" and not mass > 0:
        raise ConfigError("kernel.yukawa_mass: must be positive for the yukawa variant")
    if variant == "coulomb" and mass != 0:
        raise ConfigError("kernel.yukawa_mass: only allowed with variant 'yukawa'")
    return KernelParams.from_dict(sec)


def _quad_spec(cfg, default=None):
    sec = _section(cfg, "quadrature")
    if not sec:
        return default
    d = default or QuadratureSpec()
    try:
        return QuadratureSpec(
            panels=_num(sec, "panels", d.panels, "quadrature", integer=True, minimum=8),
            upper_cut=_num(sec, "upper_cut", None, "quadrature", positive=True) if "upper_cut" in sec else d.upper_cut,
            pole_window=_num(sec, "pole_window", None, "quadrature", positive=True) if "pole_window" in sec else d.pole_window,
            nodes=_num(sec, "nodes", d.nodes, "quadrature", integer=True, minimum=1),
            tol=_num(sec, "tol", d.tol, "quadrature", positive=True),
        )
    except DomainError as exc:
        raise ConfigError(f"quadrature: {exc}") from None


def _vec(v, name):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(f"{name}: expected a 2-vector")
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ConfigError(f"{name}: entries must be finite numbers")
    return (float(v[0]), float(v[1]))


# ---------------------------------------------------------------------------
# eval


def _int_arg(s):
    v = float(s)
    if v != int(v):
        raise ValueError(f"expected an integer, got {s}")
    return int(v)


EVAL_FUNCS = {
    "ln_gamma": (specfun.ln_gamma, (float,)),
    "gamma": (specfun.gamma, (float,)),
    "beta": (specfun.beta, (float, float)),
    "i0": (specfun.bessel_i0, (float,)),
    "i0e": (specfun.bessel_i0e, (float,)),
    "kummer": (specfun.kummer_phi, (float, float, float)),
    "legendre": (specfun.legendre_p, (_int_arg, float)),
    "double_factorial": (specfun.double_factorial, (_int_arg,)),
    "binomial": (specfun.binomial, (_int_arg, _int_arg)),
    "c_nu": (specfun.c_nu, (_int_arg, float, float)),
}


def cmd_eval(ctx, args):
    if args.function not in EVAL_FUNCS:
        raise ConfigError(f"function: unknown name {args.function!r}; choose from {', '.join(sorted(EVAL_FUNCS))}")
    func, types = EVAL_FUNCS[args.function]
    if len(args.args) != len(types):
        raise ConfigError(f"args: {args.function} takes {len(types)} argument(s), got {len(args.args)}")
    try:
        vals = [t(s) for t, s in zip(types, args.args)]
    except ValueError as exc:
        raise ConfigError(f"args: {exc}") from None
    out = complex(func(*vals))
    # the value is the output of this command, so print it even with --quiet
    print(fmt(out.real) if out.imag == 0 else f"{fmt(out.real)} {fmt(out.imag)}")
    return 0


# ---------------------------------------------------------------------------
# kernel-eval

KERNEL_COLUMNS = ["k_prime", "p_x", "p_y", "q_x", "q_y", "re_closed", "im_closed",
                  "pv_part", "re_pole", "im_pole"]


def cmd_kernel_eval(ctx, args):
    cfg = _load_config(args.config)
    packet = _packet(cfg)
    if packet.c.imag != 0:
        raise ConfigError("packet.c_im: must be 0 for kernel-eval, the pv_part column is real only for real c")
    params = _kernel_params(cfg)
    spec = _quad_spec(cfg, QuadratureSpec())
    points = cfg.get("points")
    if not isinstance(points, list) or not points:
        raise ConfigError("points: expected a non-empty list of {k_prime, p, q}")
    parsed = []
    for i, pt in enumerate(points):
        if not isinstance(pt, dict):
            raise ConfigError(f"points[{i}]: expected an object")
        k = _num(pt, "k_prime", where=f"points[{i}]", positive=True)
        parsed.append((k, _vec(pt.get("p", [0, 0]), f"points[{i}].p"), _vec(pt.get("q", [0, 0]), f"points[{i}].q")))
    rows = []
    for k, p, q in parsed:
        closed = complex(kernel_closed(k, p, q, packet, params))
        quad = kernel_quadrature(k, p, q, packet, params, spec)
        rows.append([k, p[0], p[1], q[0], q[1], closed.real, closed.imag,
                     quad.pv_part.real, quad.pole_part.real, quad.pole_part.imag])
    path = _write(ctx, "kernel_eval.csv", csv_text(KERNEL_COLUMNS, rows))
    _say(ctx, f"kernel-eval: {len(rows)} point(s) -> {path}")
    return 0


# ---------------------------------------------------------------------------
# gaussian-solve / eq21-root


def gaussian_summary(packet, params):
    a = packet.a
    alpha_p, alpha_m = selfcons.alpha_roots(a)
    out = {"packet": packet.to_dict(), "kernel": params.to_dict(),
           "alpha_plus": alpha_p.real, "alpha_minus": alpha_m.real}
    try:
        b0 = selfcons.gaussian_b0(packet, params)
        out["b0"] = {"re": b0.real, "im": b0.imag}
    except DegenerateCouplingError as exc:
        out["b0"] = None
        out["b0_note"] = str(exc)
    norm_packet = normalize(packet)
    try:
        na = selfcons.normalization_alpha(norm_packet, params)
        out["normalization_alpha"] = {"re": na.real, "im": na.imag,
                                      "note": "evaluated with e^c = sqrt(2a/pi)"}
    except DegenerateCouplingError as exc:
        out["normalization_alpha"] = None
        out["normalization_alpha_note"] = str(exc)
    roots = {}
    for sign, rhs in (("plus", 1.0), ("minus", -1.0)):
        try:
            roots[sign] = {"rhs": rhs, "a": selfcons.solve_width_condition(sign, rhs)}
        except NoRootError as exc:
            roots[sign] = {"rhs": rhs, "a": None, "note": str(exc)}
    out["width_condition_roots"] = roots
    return out


def cmd_gaussian_solve(ctx, args):
    cfg = _load_config(args.config)
    packet = _packet(cfg, a=args.a)
    params = _kernel_params(cfg, epsilon=args.epsilon, coupling=args.coupling)
    out = gaussian_summary(packet, params)
    path = _write(ctx, "gaussian_solve.json", json_text(out))
    _say(ctx, f"gaussian-solve: alpha+ = {fmt(out['alpha_plus'])}, alpha- = {fmt(out['alpha_minus'])} -> {path}")
    return 0


def cmd_eq21_root(ctx, args):
    root = selfcons.solve_width_condition(args.sign, args.rhs)
    resid = (selfcons.g_plus if args.sign == "plus" else selfcons.g_minus)(root) - args.rhs
    _write(ctx, "eq21_root.json", json_text({"sign": args.sign, "rhs": args.rhs, "a": root, "residual": resid}))
    print(f"a = {fmt(root)}" if not ctx.quiet else fmt(root))
    return 0


# ---------------------------------------------------------------------------
# fixed-point

TRACE_COLUMNS = ["iter", "k", "re_c", "im_c", "delta"]


def _initial_state(sec, grid, packet, params):
    kind = sec.get("kind", "gaussian")
    k = grid.nodes
    if kind == "gaussian":
        if "alpha" in sec:
            alpha = _num(sec, "alpha", where="initial", positive=True)
        else:
            alpha = selfcons.alpha_roots(packet.a)[0].real
        if "b0_re" in sec or "b0_im" in sec:
            b0 = complex(_num(sec, "b0_re", 0.0, "initial"), _num(sec, "b0_im", 0.0, "initial"))
        else:
            b0 = selfcons.gaussian_b0(packet, params)
        scale = _num(sec, "scale", 1.0, "initial")
        return scale * b0 * np.exp(-alpha * k * k)
    if kind == "values":
        re = sec.get("re")
        im = sec.get("im", [0.0] * len(re or []))
        if not isinstance(re, list) or not isinstance(im, list) or len(re) != len(k) or len(im) != len(k):
            raise ConfigError(f"initial.re/initial.im: need {len(k)} values each")
        arr = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ConfigError("initial: values must be finite")
        return arr
    raise ConfigError(f"initial.kind: expected 'gaussian' or 'values', got {kind!r}")


def cmd_fixed_point(ctx, args):
    cfg = _load_config(args.config)
    packet = _packet(cfg)
    if any(packet.b):
        raise ConfigError("packet.b_x/b_y: the radial fixed-point map needs b = 0")
    params = _kernel_params(cfg)
    g = _section(cfg, "grid")
    n = _num(g, "n", 64, "grid", integer=True, minimum=4)
    k_max = _num(g, "k_max", selfcons.default_k_max(packet), "grid", positive=True)
    angular = _num(g, "angular_nodes", 48, "grid", integer=True, minimum=4)
    it = _override(_section(cfg, "iteration"), mixing=args.mixing, max_iters=args.max_iters, tol=args.tol)
    mixing = _num(it, "mixing", 0.5, "iteration", positive=True)
    if mixing > 1:
        raise ConfigError(f"iteration.mixing: must lie in (0, 1], got {mixing}")
    max_iters = _num(it, "max_iters", 200, "iteration", integer=True, minimum=1)
    tol = _num(it, "tol", 1e-10, "iteration", positive=True)
    div = _num(it, "divergence_factor", 1e6, "iteration", positive=True)

    grid = selfcons.RadialGrid.gauss_legendre(n, k_max)
    c0 = _initial_state(_section(cfg, "initial"), grid, packet, params)
    fmap = selfcons.QuadraticMap(grid, packet, params, angular)
    status = 0
    try:
        trace = selfcons.fixed_point_iterate(c0, fmap, mixing, max_iters, tol, div)
    except DivergenceError as exc:
        trace = exc.trace
        status = 1
    if not trace.converged:
        status = 1
    path = _write(ctx, "fixed_point_trace.csv", csv_text(TRACE_COLUMNS, trace.rows()))
    state = "converged" if trace.converged else ("diverged" if trace.diverged else "max_iters reached")
    summary = {"status": state, "iterations": len(trace.deltas), "final_delta": trace.final_delta,
               "grid": {"n": n, "k_max": k_max, "angular_nodes": angular},
               "mixing": mixing, "tol": tol}
    _write(ctx, "fixed_point.json", json_text(summary))
    line = f"fixed-point: {state} after {len(trace.deltas)} iteration(s), delta = {fmt(trace.final_delta)} -> {path}"
    if status:
        raise _Failed(line)
    _say(ctx, line)
    return 0


# ---------------------------------------------------------------------------
# audit


def cmd_audit(ctx, args):
    cfg = _load_config(args.config)
    sec = _override(cfg, a=args.a)
    a = _num(sec, "a", 1.0, positive=True)
    params = _kernel_params(cfg, epsilon=args.epsilon, coupling=args.coupling)
    ks = cfg.get("k_samples", [0.0, 0.25, 0.5, 1.0])
    if not isinstance(ks, list) or not ks:
        raise ConfigError("k_samples: expected a non-empty list")
    ks = [_num({"k": x}, "k", where="k_samples", minimum=0.0) for x in ks]
    flag_tol = _num(cfg, "flag_tol", 1e-6, positive=True)
    spec = _quad_spec(cfg)
    report = selfcons.audit_consistency(a, params, ks, flag_tol, spec)
    path = _write(ctx, "audit.json", json_text(report))
    _say(ctx, f"audit: {len(report['discrepancies'])} discrepancy(ies) above {fmt(flag_tol)} -> {path}")
    return 0


# ---------------------------------------------------------------------------
# stability-scan

STABILITY_COLUMNS = ["a", "alpha", "b0", "lambda0", "max_lambda", "classification"]


def stability_row(a, convention):
    rep = stability.stability_report(a, convention)
    return [a, rep.alpha, rep.b0, rep.lambda0, rep.max_lambda, rep.overall.value]


def _convention(value):
    try:
        return stability.B0Convention(value)
    except ValueError:
        choices = ", ".join(c.value for c in stability.B0Convention)
        raise ConfigError(f"convention: expected one of {choices}, got {value!r}") from None


def cmd_stability_scan(ctx, args):
    cfg = _override(_load_config(args.config), a_min=args.a_min, a_max=args.a_max,
                    count=args.count, convention=args.convention)
    a_min = _num(cfg, "a_min", 0.1, positive=True)
    a_max = _num(cfg, "a_max", 10.0, positive=True)
    count = _num(cfg, "count", 100, integer=True, minimum=2)
    if not a_max > a_min:
        raise ConfigError("a_max: must exceed a_min")
    conv = _convention(cfg.get("convention", "sqrt_pi_over_alpha"))
    scan = stability.scan_stability(a_min, a_max, count, conv)
    rows = [[r.a, r.alpha, r.b0, r.lambda0, r.max_lambda, r.overall.value] for r in scan.reports]
    footer = {"critical_a": scan.critical_a, "critical_max_lambda": scan.critical_lambda0,
              "convention": conv.value, "threshold": 2.0}
    text = csv_text(STABILITY_COLUMNS, rows) + "# " + json.dumps(footer, sort_keys=True) + "\n"
    path = _write(ctx, "stability_scan.csv", text)
    crit = "none" if scan.critical_a is None else fmt(scan.critical_a)
    _say(ctx, f"stability-scan: {count} point(s), critical a = {crit} -> {path}")
    return 0


# ---------------------------------------------------------------------------
# nls-run

NLS_COLUMNS = ["t", "norm", "energy"]


def _nls_shape(cfg):
    dims = _num(cfg, "dims", 1, integer=True)
    if dims not in (1, 2):
        raise ConfigError(f"dims: must be 1 or 2, got {dims}")
    grid = cfg.get("grid", 256)
    box = cfg.get("box", 40.0)
    grid = [grid] * dims if not isinstance(grid, list) else grid
    box = [box] * dims if not isinstance(box, list) else box
    if len(grid) != dims or len(box) != dims:
        raise ConfigError(f"grid/box: need {dims} entries")
    for n in grid:
        if isinstance(n, bool) or not isinstance(n, int) or n < 16 or n & (n - 1):
            raise ConfigError(f"grid: sizes must be powers of two >= 16, got {n}")
    for L in box:
        if isinstance(L, bool) or not isinstance(L, (int, float)) or not (math.isfinite(L) and L > 0):
            raise ConfigError(f"box: lengths must be positive numbers, got {L}")
    return tuple(grid), tuple(float(x) for x in box)


def _nls_initial(sec, shape, box):
    kind = sec.get("kind", "sech")
    if kind == "sech":
        return nls.sech_field(shape, box, _num(sec, "amplitude", 1.0, "initial", positive=True))
    if kind == "gaussian":
        dims = len(shape)
        center = sec.get("center", [0.0] * dims)
        momentum = sec.get("momentum", [0.0] * dims)
        for name, v in (("center", center), ("momentum", momentum)):
            if not isinstance(v, list) or len(v) != dims:
                raise ConfigError(f"initial.{name}: need {dims} entries")
        return nls.gaussian_field(shape, box, _num(sec, "width", 1.0, "initial", positive=True),
                                  center, momentum)
    if kind == "file":
        path = sec.get("path")
        if not isinstance(path, str) or not Path(path).is_file():
            raise ConfigError(f"initial.path: snapshot file not found: {path!r}")
        wf = nls.read_snapshot(path)
        if wf.grid_shape != shape or not np.allclose(wf.box_lengths, box):
            raise ConfigError("initial.path: snapshot grid/box differ from the config")
        return wf
    raise ConfigError(f"initial.kind: expected sech, gaussian or file, got {kind!r}")


def _nls_coefficient(sec, shape):
    kind = sec.get("kind", "constant")
    for key in ("value", "amplitude", "background", "im", "value_im"):
        if isinstance(sec.get(key), (list, dict, str)):
            raise ConfigError(f"w.{key}: expected a real number")
    if sec.get("im") or sec.get("value_im"):
        raise ConfigError("w: complex coefficients are not supported; w must be real so that the norm is conserved")
    if kind == "constant":
        return nls.CoefficientField.constant(_num(sec, "value", -1.0, "w"))
    if kind == "gaussian":
        center = sec.get("center", [0.0] * len(shape))
        if not isinstance(center, list) or len(center) != len(shape):
            raise ConfigError(f"w.center: need {len(shape)} entries")
        return nls.CoefficientField.gaussian_envelope(
            _num(sec, "amplitude", -1.0, "w"), _num(sec, "width", 1.0, "w", positive=True),
            center, _num(sec, "background", 0.0, "w"))
    if kind == "file":
        path = sec.get("path")
        if not isinstance(path, str) or not Path(path).is_file():
            raise ConfigError(f"w.path: file not found: {path!r}")
        table = np.load(path, allow_pickle=False)
        if np.iscomplexobj(table):
            raise ConfigError("w.path: complex coefficients are not supported; w must be real")
        if table.shape != shape:
            raise ConfigError(f"w.path: table shape {table.shape} does not match grid {shape}")
        if not np.all(np.isfinite(table)):
            raise ConfigError("w.path: table must be finite")
        return nls.CoefficientField.tabulated(table.astype(float))
    raise ConfigError(f"w.kind: expected constant, gaussian or file, got {kind!r}")


def cmd_nls_run(ctx, args):
    cfg = _override(_load_config(args.config), dt=args.dt, t_final=args.t_final)
    shape, box = _nls_shape(cfg)
    dt = _num(cfg, "dt", 1e-3, positive=True)
    t_final = _num(cfg, "t_final", 1.0, minimum=0.0)
    every = _num(cfg, "sample_every", 100, integer=True, minimum=1)
    steps = round(t_final / dt)
    if abs(steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ConfigError(f"t_final: must be a multiple of dt = {dt}")
    snap = _num(cfg, "snapshot_every", 0, integer=True, minimum=0)
    initial = _nls_initial(_section(cfg, "initial"), shape, box)
    w = _nls_coefficient(_section(cfg, "w"), shape)

    if snap and snap % every:
        raise ConfigError(f"snapshot_every: must be a multiple of sample_every = {every}")

    status = 0
    note = ""
    try:
        traj = nls.run(initial, w, t_final, dt, sample_every=every, keep_fields=snap > 0)
    except BlowUpError as exc:
        traj = exc.trajectory
        status = 1
        note = f" (blow-up at t = {fmt(exc.time)})"
    rows = list(traj.rows())
    if snap:
        out = Path(ctx.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        stride = snap // every
        # the last sample is off-cadence when sample_every does not divide the step count
        for i, wf in enumerate(traj.fields[::stride]):
            nls.write_snapshot(out / f"nls_snapshot_{i:05d}.bin", wf)
    path = _write(ctx, "nls_series.csv", csv_text(NLS_COLUMNS, rows))
    line = f"nls-run: {len(rows)} sample(s), final norm = {fmt(rows[-1][1])}{note} -> {path}"
    if status:
        raise _Failed(line)
    _say(ctx, line)
    return 0


# ---------------------------------------------------------------------------
# sweep


def _sweep_stability(value, base):
    return stability_row(value, base.get("convention", "sqrt_pi_over_alpha"))


def _sweep_gaussian(value, base):
    cfg = dict(base)
    cfg["packet"] = _override(_section(base, "packet"), a=value)
    packet = _packet(cfg)
    params = _kernel_params(cfg)
    out = gaussian_summary(packet, params)
    b0 = out["b0"] or {"re": math.nan, "im": math.nan}
    return [value, out["alpha_plus"], out["alpha_minus"], b0["re"], b0["im"]]


def _sweep_eq21(value, base):
    sign = base.get("sign", "plus")
    root = selfcons.solve_width_condition(sign, value)
    return [value, root]


def _sweep_audit(value, base):
    params = _kernel_params(base)
    rep = selfcons.audit_consistency(value, params, base.get("k_samples", [0.0, 0.25, 0.5, 1.0]),
                                     base.get("flag_tol", 1e-6))
    worst = max((c["rel_diff"] for c in rep["comparisons"]), default=0.0)
    return [value, len(rep["discrepancies"]), worst]


SWEEPS = {
    "stability-scan": ("a", STABILITY_COLUMNS, _sweep_stability),
    "gaussian-solve": ("a", ["a", "alpha_plus", "alpha_minus", "re_b0", "im_b0"], _sweep_gaussian),
    "eq21-root": ("rhs", ["rhs", "a"], _sweep_eq21),
    "audit": ("a", ["a", "discrepancies", "max_rel_diff"], _sweep_audit),
}


def _sweep_point(base_cmd, value, base):
    # runs in a worker process; never raises, failures become flagged rows
    _, columns, func = SWEEPS[base_cmd]
    try:
        return value, func(value, base), ""
    except Exception as exc:  # noqa: BLE001 - the row records the failure
        return value, [value] + [math.nan] * (len(columns) - 1), f"{type(exc).__name__}: {exc}"


def _sweep_values(sec):
    if "values" in sec:
        vals = sec["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("sweep.values: expected a non-empty list")
        return [float(_num({"v": v}, "v", where="sweep.values")) for v in vals]
    start = _num(sec, "start", where="sweep")
    stop = _num(sec, "stop", where="sweep")
    count = _num(sec, "count", where="sweep", integer=True, minimum=1)
    if count == 1:
        return [float(start)]
    return [float(v) for v in np.linspace(start, stop, count)]


def default_workers():
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}: expected an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV}: must be >= 1")
        return n
    return os.cpu_count() or 1


def cmd_sweep(ctx, args):
    cfg = _load_config(args.config)
    base_cmd = cfg.get("command")
    if base_cmd not in SWEEPS:
        raise ConfigError(f"command: sweepable commands are {', '.join(sorted(SWEEPS))}, got {base_cmd!r}")
    param, columns, _ = SWEEPS[base_cmd]
    sec = _section(cfg, "sweep")
    name = sec.get("parameter", param)
    if name != param:
        raise ConfigError(f"sweep.parameter: {base_cmd} sweeps over {param!r}, got {name!r}")
    values = _sweep_values(sec)
    base = _section(cfg, "base")
    if base_cmd == "stability-scan":
        _convention(base.get("convention", "sqrt_pi_over_alpha"))
    elif base_cmd in ("gaussian-solve", "audit"):
        _kernel_params(base)

    workers = ctx.workers or default_workers()
    if workers == 1 or len(values) == 1:
        results = [_sweep_point(base_cmd, v, base) for v in values]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_point, base_cmd, v, base) for v in values]
            results = [f.result() for f in futures]
    results.sort(key=lambda r: r[0])
    rows = [row + [err == "", err] for _, row, err in results]
    path = _write(ctx, f"sweep_{base_cmd}.csv", csv_text(columns + ["ok", "error"], rows))
    failed = sum(1 for r in results if r[2])
    line = f"sweep: {len(rows)} point(s), {failed} failed -> {path}"
    if failed:
        raise _Failed(line)
    _say(ctx, line)
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=argparse.SUPPRESS, help="directory for CSV/JSON artifacts")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="suppress the summary line")
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS,
                        help=f"sweep worker processes (default: ${WORKERS_ENV} or CPU count)")

    parser = argparse.ArgumentParser(prog="ctcbilliard", parents=[common],
                                     description="Self-consistent wave-packet scattering toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "evaluate a special function")
    p.add_argument("function", help=", ".join(sorted(EVAL_FUNCS)))
    p.add_argument("args", nargs="*")

    p = add("kernel-eval", cmd_kernel_eval, "closed-form vs quadrature kernel at configured points")
    p.add_argument("--config", required=True)

    p = add("gaussian-solve", cmd_gaussian_solve, "Gaussian solution parameters as JSON")
    p.add_argument("--config")
    p.add_argument("--a", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--coupling", type=float)

    p = add("eq21-root", cmd_eq21_root, "solve a^2 +- a sqrt(a^2 + 2 sqrt2 a) = rhs for a")
    p.add_argument("--sign", choices=["plus", "minus"], required=True)
    p.add_argument("--rhs", type=float, required=True)

    p = add("fixed-point", cmd_fixed_point, "damped iteration of the discretised quadratic map")
    p.add_argument("--config", required=True)
    p.add_argument("--mixing", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--tol", type=float)

    p = add("audit", cmd_audit, "cross-route consistency report (JSON)")
    p.add_argument("--config")
    p.add_argument("--a", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--coupling", type=float)

    p = add("stability-scan", cmd_stability_scan, "lambda(k) classification over a range of a")
    p.add_argument("--config")
    p.add_argument("--a-min", dest="a_min", type=float)
    p.add_argument("--a-max", dest="a_max", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--convention", choices=[c.value for c in stability.B0Convention])

    p = add("nls-run", cmd_nls_run, "split-step evolution of the variable-coefficient NLS")
    p.add_argument("--config", required=True)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", dest="t_final", type=float)

    p = add("sweep", cmd_sweep, "run a command over a parameter range in parallel")
    p.add_argument("--config", required=True)
    return parser


class _Context:
    def __init__(self, ns):
        self.output_dir = getattr(ns, "output_dir", ".")
        self.quiet = getattr(ns, "quiet", False)
        self.workers = getattr(ns, "workers", None)


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ctx = _Context(ns)
    if ctx.workers is not None and ctx.workers < 1:
        print("error: --workers: must be >= 1", file=sys.stderr)
        return 2
    try:
        return ns.func(ctx, ns)
    except _Failed as exc:
        _say(ctx, str(exc))
        return 1
    except (DomainError, PreconditionError, NoRootError, DegenerateCouplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AccuracyError, DivergenceError, BlowUpError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
