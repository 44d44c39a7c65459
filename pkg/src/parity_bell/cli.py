"""Command-line front end: ``parity-bell {sweep,bell,verify,optimize}``.

Exit codes: 0 success, 1 verification or bound failure, 2 usage error,
3 numerical-capacity error (zeta cap, truncation, quadrature, oracle size).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .bell import (
    BellOutcome,
    direct_search,
    horodecki_max,
    optimize_phases,
    orientational_optimum,
    random_unitary_search,
)
from .correlations import f_closed, f_direct, f_position_integral, f_trace, tensor_from_configs
from .errors import BoundExceeded, CapacityError, NonUnitaryConfig, ParityBellError
from .fock import (
    DEFAULT_TAIL_TOL,
    ORACLE_MAX_DIM,
    ZETA_CAP,
    FockTruncation,
    check_zeta,
    fidelity,
    reduced_density,
    squeeze_oracle,
    tmsv_state,
    truncation_for,
)
from .pseudospin import (
    DEFAULT_UNITARITY_TOL,
    NAMED,
    PseudospinConfig,
    custom_config,
    named_config,
    operator_set,
    verify_su2,
)
from .quadrature import DEFAULT_QUAD_TOL, QuadratureSpec

CSV_HEADER = "zeta,config,F,bell_value,dim,condition15"
SCHEMA_VERSION = 1

FIDELITY_TOL = 1e-8
PURITY_TOL = 1e-10
ROUTE_TOL = 1e-12
CLOSED_TOL = 1e-9
POSITION_MATRIX_TOL = 1e-6
SEARCH_TOL = 1e-8
ORACLE_MIN_DIM = 32
VERIFY_ORACLE_MAX_DIM = 4 * ORACLE_MAX_DIM


class UsageError(ParityBellError):
    pass


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"could not parse number list {text!r}") from exc


def _parse_labels(text: str) -> list[str]:
    labels = [tok.strip() for tok in text.split(",") if tok.strip()]
    for lab in labels:
        if lab not in NAMED + ("custom",):
            raise UsageError(f"unknown config {lab!r}; choose from {', '.join(NAMED + ('custom',))}")
    return labels


def load_config_file(path: str, tol: float = DEFAULT_UNITARITY_TOL) -> PseudospinConfig:
    """Read ``{"real": [[..]], "imag": [[..]]}`` and validate unitarity."""
    try:
        doc = json.loads(Path(path).read_text())
        re_part = np.asarray(doc["real"], dtype=np.float64)
        im_part = np.asarray(doc.get("imag", np.zeros_like(re_part)), dtype=np.float64)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if re_part.shape != im_part.shape:
        raise UsageError(f"config file {path}: real and imag shapes differ")
    try:
        return custom_config(re_part + 1j * im_part, tol=tol)
    except (NonUnitaryConfig, ValueError) as exc:
        raise UsageError(f"config file {path}: {exc}") from exc


def _manifest(args: argparse.Namespace, tolerances: dict) -> dict:
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "command")}
    return {
        "artifact": "parity-bell",
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "command": args.command,
        "options": opts,
        "seed": getattr(args, "seed", None),
        "tolerances": tolerances,
        "truncation_policy": {
            "mode": "fixed" if getattr(args, "dim", None) else "adaptive-even",
            "tail_tol": getattr(args, "tail_tol", DEFAULT_TAIL_TOL),
            "zeta_cap": ZETA_CAP,
        },
        "kernel_backend": kernels.BACKEND,
    }


def _emit(text: str, args: argparse.Namespace, manifest: dict) -> None:
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        side = dict(manifest)
        side["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        side["output"] = out.name
        Path(str(out) + ".manifest.json").write_text(json.dumps(side, indent=2) + "\n")
    else:
        sys.stdout.write(text)


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _truncation(zeta: float, args) -> FockTruncation:
    if args.dim:
        return FockTruncation(args.dim, args.tail_tol)
    return truncation_for(zeta, args.tail_tol)


class _ConfigSource:
    """Named configs built once at the largest needed size and sliced down."""

    def __init__(self, custom: PseudospinConfig | None, quad: QuadratureSpec):
        self.custom = custom
        self.quad = quad
        self._cache: dict[str, PseudospinConfig] = {}

    def prepare(self, label: str, half_dim: int) -> None:
        have = self._cache.get(label)
        if label != "custom" and (have is None or have.half_dim < half_dim):
            self._cache[label] = named_config(label, half_dim, self.quad)

    def get(self, label: str, half_dim: int) -> PseudospinConfig:
        if label == "custom":
            if self.custom is None:
                raise UsageError("config 'custom' needs --config-file")
            if self.custom.half_dim != half_dim:
                raise UsageError(f"custom config has half_dim {self.custom.half_dim}, need {half_dim}")
            return self.custom
        self.prepare(label, half_dim)
        return self._cache[label].leading(half_dim)


def _custom_dim(args, custom: PseudospinConfig | None, labels: list[str]) -> None:
    if custom is None:
        if "custom" in labels:
            raise UsageError("config 'custom' needs --config-file")
        return
    if args.dim and args.dim != custom.dim:
        raise UsageError(f"--dim {args.dim} conflicts with the {custom.dim}-level custom config")
    args.dim = custom.dim


# ---------------------------------------------------------------- sweep


def cmd_sweep(args) -> int:
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    if args.zeta_min < 0 or args.zeta_max < args.zeta_min:
        raise UsageError("need 0 <= --zeta-min <= --zeta-max")
    labels = _parse_labels(args.configs)
    custom = load_config_file(args.config_file) if args.config_file else None
    if custom is not None and "custom" not in labels:
        labels.append("custom")
    _custom_dim(args, custom, labels)

    zetas = np.linspace(args.zeta_min, args.zeta_max, args.steps)
    truncs = [_truncation(z, args) for z in zetas]
    source = _ConfigSource(custom, QuadratureSpec())
    top = max(t.half_dim for t in truncs)
    for lab in labels:
        if lab != "custom":
            source.prepare(lab, top)

    rows = []
    for z, tr in zip(zetas, truncs):
        state = tmsv_state(z, tr)
        for lab in labels:
            cfg = source.get(lab, tr.half_dim)
            res = f_direct(state, cfg)
            bell = horodecki_max(tensor_from_configs(state, cfg)).value
            rows.append((float(z), lab, res.f, bell, tr.dim, res.condition15_ok))

    manifest = _manifest(args, {"tail_tol": args.tail_tol, "route_tol": ROUTE_TOL})
    if args.json:
        doc = {
            "columns": CSV_HEADER.split(","),
            "rows": [list(r) for r in rows],
            "manifest": manifest,
        }
        _emit(_dumps(doc), args, manifest)
    else:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for z, lab, f, bell, dim, c15 in rows:
            buf.write(f"{_num(z)},{lab},{_num(f)},{_num(bell)},{dim},{'true' if c15 else 'false'}\n")
        _emit(buf.getvalue(), args, manifest)
    return 0


# ---------------------------------------------------------------- bell


def _outcome(o: BellOutcome) -> dict:
    return {"value": o.value, "method": o.method, "setting": o.setting.as_dict()}


def bell_report(zeta: float, cfg1: PseudospinConfig, cfg2: PseudospinConfig, state, restarts: int, seed: int, quad_tol: float) -> dict:
    rho = reduced_density(state)
    direct = f_direct(state, cfg1, cfg2)
    trace = f_trace(rho, cfg1, cfg2)
    routes = {"direct": direct.f, "trace": trace.f}
    checks = {"direct_vs_trace": abs(direct.f - trace.f) <= ROUTE_TOL}

    same = cfg1.label == cfg2.label and cfg1.label in NAMED
    if same:
        closed = f_closed(zeta, cfg1.label)
        routes["closed_form"] = closed
        tol = POSITION_MATRIX_TOL if cfg1.label == "position" else CLOSED_TOL
        checks["direct_vs_closed_form"] = abs(direct.f - closed) <= tol
    if same and cfg1.label == "position":
        integral = f_position_integral(zeta, QuadratureSpec(tol=quad_tol))
        routes["integral"] = integral
        checks["integral_vs_closed_form"] = abs(integral - routes["closed_form"]) <= quad_tol

    tensor = tensor_from_configs(state, cfg1, cfg2)
    hor = horodecki_max(tensor)
    ds = direct_search(tensor, restarts=restarts, seed=seed)
    checks["horodecki_vs_direct_search"] = abs(hor.value - ds.value) <= SEARCH_TOL
    report = {
        "zeta": zeta,
        "dim": state.dim,
        "configs": [cfg1.label, cfg2.label],
        "F": routes,
        "plus_plus": [direct.plus_plus.real, direct.plus_plus.imag],
        "condition15": direct.condition15_ok,
        "correlation_tensor": tensor.k.tolist(),
        "bell": {
            "horodecki": _outcome(hor),
            "direct_search": _outcome(ds),
        },
        "violation": hor.value > 2.0,
        "truncation_deficit": state.deficit,
    }
    if direct.condition15_ok:
        formula = orientational_optimum(direct.f)
        report["bell"]["formula_2sqrt1pF2"] = formula
        checks["horodecki_vs_formula"] = abs(hor.value - formula) <= SEARCH_TOL
    report["checks"] = checks
    report["passed"] = all(checks.values())
    return report


def cmd_bell(args) -> int:
    zeta = check_zeta(args.zeta)
    labels = _parse_labels(args.configs)
    custom = load_config_file(args.config_file) if args.config_file else None
    if custom is not None and "custom" not in labels:
        labels = ["custom"]
    if len(labels) not in (1, 2):
        raise UsageError("--configs takes one label (both channels) or two (channel 1, channel 2)")
    _custom_dim(args, custom, labels)
    tr = _truncation(zeta, args)
    state = tmsv_state(zeta, tr)
    source = _ConfigSource(custom, QuadratureSpec(tol=args.tol))
    cfg1 = source.get(labels[0], tr.half_dim)
    cfg2 = source.get(labels[-1], tr.half_dim)
    report = bell_report(zeta, cfg1, cfg2, state, args.trials, args.seed, args.tol)
    manifest = _manifest(args, {"route": ROUTE_TOL, "closed_form": CLOSED_TOL, "position_matrix": POSITION_MATRIX_TOL, "quadrature": args.tol, "search": SEARCH_TOL})
    report["manifest"] = manifest
    if args.json or args.out:
        _emit(_dumps(report), args, manifest)
    else:
        lines = [f"zeta={_num(zeta)} dim={state.dim} configs={'/'.join(report['configs'])}"]
        lines += [f"  F[{k}] = {_num(v)}" for k, v in report["F"].items()]
        lines.append(f"  bell[horodecki] = {_num(report['bell']['horodecki']['value'])}")
        lines.append(f"  bell[direct-search] = {_num(report['bell']['direct_search']['value'])}")
        lines.append("  violation" if report["violation"] else "  no violation")
        lines += [f"  {k}: {'pass' if v else 'FAIL'}" for k, v in report["checks"].items()]
        sys.stdout.write("\n".join(lines) + "\n")
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------- verify


def _oracle_dim(zeta: float, tail_tol: float) -> int:
    return max(ORACLE_MIN_DIM, truncation_for(zeta, tail_tol).dim)


def verify_report(zetas: list[float], tol: float, algebra_dim: int, tail_tol: float) -> dict:
    checks: list[dict] = []
    half = algebra_dim // 2

    for label in NAMED:
        entry = {"check": "algebra", "config": label, "dim": algebra_dim}
        if label == "position":
            try:
                cfg = named_config(label, half, QuadratureSpec(tol=tol))
            except CapacityError as exc:
                entry.update(passed=False, error=str(exc))
                checks.append(entry)
                continue
            rep = verify_su2(operator_set(cfg, check=False), tol)
            # a finite block of the half-line overlap matrix is only a
            # contraction; its algebra residuals are truncation diagnostics
            entry.update(
                quadrature_residual=cfg.quadrature_residual,
                contraction_excess=cfg.contraction_excess(),
                interior_unitarity_residual=cfg.unitarity_residual(interior=True),
                algebra=rep.as_dict(),
                algebra_gating=False,
                passed=bool(cfg.quadrature_residual < tol and cfg.contraction_excess() < tol),
            )
        else:
            cfg = named_config(label, half)
            rep = verify_su2(operator_set(cfg, tol), tol)
            entry.update(algebra=rep.as_dict(), algebra_gating=True, passed=rep.passed)
        checks.append(entry)

    for z in zetas:
        z = check_zeta(z)
        state = tmsv_state(z, truncation_for(z, tail_tol))
        rho = reduced_density(state)

        odim = _oracle_dim(z, tail_tol)
        oracle = squeeze_oracle(z, FockTruncation(odim, tail_tol), max_dim=VERIFY_ORACLE_MAX_DIM)
        schmidt = state if state.dim >= odim else tmsv_state(z, FockTruncation(odim, tail_tol))
        fid = fidelity(oracle, schmidt)
        checks.append({"check": "squeeze_oracle_fidelity", "zeta": z, "dim": odim, "fidelity": fid,
                       "off_diagonal": oracle.max_off_diagonal(), "passed": fid >= 1.0 - FIDELITY_TOL})

        purity_err = abs(rho.purity - 1.0 / math.cosh(2.0 * z))
        checks.append({"check": "purity_identity", "zeta": z, "error": purity_err, "passed": purity_err < PURITY_TOL})

        for label in NAMED:
            try:
                cfg = named_config(label, state.dim // 2, QuadratureSpec(tol=tol))
            except CapacityError as exc:
                checks.append({"check": "routes", "zeta": z, "config": label, "passed": False, "error": str(exc)})
                continue
            d, t = f_direct(state, cfg), f_trace(rho, cfg)
            closed = f_closed(z, label)
            ctol = POSITION_MATRIX_TOL if label == "position" else CLOSED_TOL
            entry = {
                "check": "routes", "zeta": z, "config": label,
                "direct": d.f, "trace": t.f, "closed_form": closed,
                "direct_vs_trace": abs(d.f - t.f), "direct_vs_closed_form": abs(d.f - closed),
                "condition15": d.condition15_ok,
            }
            ok = abs(d.f - t.f) <= ROUTE_TOL and abs(d.f - closed) <= ctol
            if label == "position":
                integral = f_position_integral(z, QuadratureSpec(tol=tol), check=False)
                entry["integral"] = integral
                entry["integral_vs_closed_form"] = abs(integral - closed)
                ok = ok and abs(integral - closed) <= tol
            entry["passed"] = bool(ok)
            checks.append(entry)

    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def cmd_verify(args) -> int:
    zetas = _parse_floats(args.zeta) if args.zeta else [0.25, 0.5, 1.0]
    algebra_dim = args.dim or 64
    if algebra_dim < 4 or algebra_dim % 2:
        raise UsageError("--dim must be an even integer >= 4")
    report = verify_report(zetas, args.tol, algebra_dim, args.tail_tol)
    manifest = _manifest(args, {"algebra_and_quadrature": args.tol, "fidelity": FIDELITY_TOL, "purity": PURITY_TOL, "route": ROUTE_TOL, "closed_form": CLOSED_TOL, "position_matrix": POSITION_MATRIX_TOL})
    report["manifest"] = manifest
    if args.json or args.out:
        _emit(_dumps(report), args, manifest)
    else:
        for c in report["checks"]:
            where = c.get("config", "")
            if "zeta" in c:
                where = f"{where} zeta={_num(c['zeta'])}".strip()
            sys.stdout.write(f"{'pass' if c['passed'] else 'FAIL'}  {c['check']:<24} {where}\n")
    if not report["passed"]:
        for c in report["checks"]:
            if not c["passed"]:
                sys.stderr.write(f"verification failed: {json.dumps(c)}\n")
        return 1
    return 0


# ---------------------------------------------------------------- optimize


def cmd_optimize(args) -> int:
    zeta = check_zeta(args.zeta)
    tr = _truncation(zeta, args)
    rho = reduced_density(tmsv_state(zeta, tr))
    if args.family == "random-unitary":
        if args.seed is None:
            raise UsageError("--family random-unitary requires --seed")
        res = random_unitary_search(rho, args.trials, args.seed)
    else:
        res = optimize_phases(rho, args.grid)
    doc = res.as_dict()
    doc.update(zeta=zeta, dim=tr.dim, within_bound=res.best_f <= res.bound)
    manifest = _manifest(args, {"bound_slack": 1e-9 if args.family == "random-unitary" else 1e-12})
    doc["manifest"] = manifest
    if args.json or args.out:
        _emit(_dumps(doc), args, manifest)
    else:
        sys.stdout.write(
            f"{res.family}: best_f={_num(res.best_f)} bound={_num(res.bound)} gap={_num(res.gap)} trials={res.trials}\n"
        )
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parity-bell", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, zeta_required=False):
        sp.add_argument("--dim", type=int, default=None, help="fixed per-mode Fock cutoff (even); default adapts to zeta")
        sp.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, help="maximum discarded Schmidt weight")
        sp.add_argument("--out", default=None, help="output file (a .manifest.json sidecar is written next to it)")
        sp.add_argument("--json", action="store_true", help="emit JSON")

    s = sub.add_parser("sweep", help="F and optimal Bell value along a zeta grid (CSV)")
    s.add_argument("--zeta-min", type=float, default=0.0)
    s.add_argument("--zeta-max", type=float, default=2.0)
    s.add_argument("--steps", type=int, default=200)
    s.add_argument("--configs", default="number,position")
    s.add_argument("--config-file", default=None, help="JSON file with 'real' and 'imag' matrices")
    common(s)
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bell", help="F by every route and the optimal CHSH value at one zeta")
    b.add_argument("--zeta", type=float, required=True)
    b.add_argument("--configs", default="number", help="one label, or two for channel 1,channel 2")
    b.add_argument("--config-file", default=None)
    b.add_argument("--tol", type=float, default=DEFAULT_QUAD_TOL, help="quadrature tolerance")
    b.add_argument("--trials", type=int, default=8, help="direct-search restarts")
    b.add_argument("--seed", type=int, default=0)
    common(b)
    b.set_defaults(func=cmd_bell)

    v = sub.add_parser("verify", help="algebra, oracle, purity and route-agreement checks")
    v.add_argument("--zeta", default=None, help="comma-separated zeta list (default 0.25,0.5,1.0)")
    v.add_argument("--tol", type=float, default=DEFAULT_UNITARITY_TOL, help="algebra and quadrature tolerance")
    common(v)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("optimize", help="configurational search against the tanh(2 zeta) bound")
    o.add_argument("--zeta", type=float, required=True)
    o.add_argument("--family", choices=("diagonal-phase", "random-unitary"), default="diagonal-phase")
    o.add_argument("--trials", type=int, default=1000)
    o.add_argument("--seed", type=int, default=None)
    o.add_argument("--grid", type=int, default=64, help="phase grid points (diagonal-phase)")
    common(o)
    o.set_defaults(func=cmd_optimize)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except BoundExceeded as exc:
        sys.stderr.write(f"bound exceeded: {exc}\n")
        return 1
    except CapacityError as exc:
        sys.stderr.write(f"numerical capacity: {exc}\n")
        return 3
    except ValueError as exc:
        parser.error(str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
