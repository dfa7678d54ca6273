"""Command-line front end: ``rankres {poles,spectrum,resolve,sheet,selfcheck}``.

Exit statuses::

    0 ok                       4 singular perturbation
    1 selfcheck failure        5 at a pole
    2 config / usage error     6 quadrature failure
    3 branch cut               7 root verification failure
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .branchkit import Sheet, SheetPoint, induced_k, k_upper
from .errors import (
    AtPole, BranchCutError, DomainError, PoleOfExpression, QuadratureFailure,
    RootRefinementFailure, SingularPerturbation,
)
from .green1d import FieldSpec, QuadratureConfig
from .models import (
    CoupledParams, FriedrichsParams, coupled_determinant, solve_coupled,
    solve_coupled_via_rank_one, solve_friedrichs,
)
from .resonance import (
    RenormalizedParams, amplitudes, det_inv_extended, friedrichs_poles, phase_shift,
    resonance_poles, resonant_wavenumbers, second_sheet_poles, sheet_eval,
)
from .selfcheck import run_all

EXIT_OK, EXIT_SELFCHECK, EXIT_CONFIG, EXIT_CUT, EXIT_SINGULAR, EXIT_POLE = 0, 1, 2, 3, 4, 5
EXIT_QUAD, EXIT_ROOT = 6, 7
NEAR_POLE = 1e-6
SPECTRUM_COLUMNS = ("k", "amp_q", "amp_Q", "amp_qQ", "phase", "det_inv_abs2", "status")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: object
    quad: QuadratureConfig
    output: str = "csv"
    a_mp: float = 1.0

    def renormalized(self) -> RenormalizedParams:
        if self.model != "coupled":
            raise ConfigError("this subcommand is defined for the coupled model only")
        return RenormalizedParams.from_coupled(self.params, self.a_mp)


def parse_complex(text) -> complex:
    """Accept ``[re, im]`` lists, ``"re,im"`` strings and Python complex literals."""
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ConfigError(f"complex value must be [re, im], got {text!r}")
        return complex(float(text[0]), float(text[1]))
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip()
    try:
        if "," in s:
            re_, im_ = s.split(",")
            return complex(float(re_), float(im_))
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex number {text!r}") from exc


def _pair(z) -> list:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


def _override(raw, args, key, attr, conv=float):
    value = getattr(args, attr, None)
    if value is not None:
        raw[key] = conv(value)


def load_config(args) -> RunConfig:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    model = args.model or raw.get("model", "coupled")
    if model not in ("coupled", "friedrichs"):
        raise ConfigError(f"unknown model {model!r}")
    params = dict(raw.get("params", {}))
    if not isinstance(params, dict):
        raise ConfigError('"params" must be an object')
    for key, attr in (("omega", "omega"), ("c", "c"), ("x0", "x0"), ("gamma_c", "gamma_c")):
        _override(params, args, key, attr)
    for key in ("gamma1", "gamma2c"):
        _override(params, args, key, key, parse_complex)
    try:
        if model == "coupled":
            unknown = set(params) - {"omega", "gamma_c", "c", "x0"}
            if unknown:
                raise ConfigError(f"unknown coupled parameters: {sorted(unknown)}")
            p = CoupledParams(**params)
        else:
            unknown = set(params) - {"omega", "gamma1", "gamma2c", "c", "x0"}
            if unknown:
                raise ConfigError(f"unknown friedrichs parameters: {sorted(unknown)}")
            for key in ("gamma1", "gamma2c"):
                if key in params:
                    params[key] = parse_complex(params[key])
            p = FriedrichsParams(**params)
        quad = QuadratureConfig.from_dict(raw.get("quad", {}))
    except TypeError as exc:
        raise ConfigError(f"missing or invalid parameters: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    output = args.output or raw.get("output", "csv")
    if output not in ("csv", "json"):
        raise ConfigError(f"unknown output format {output!r}")
    a_mp = args.a_mp if args.a_mp is not None else raw.get("a_mp", 1.0)
    return RunConfig(model, p, quad, output, float(a_mp))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value) + 0.0, ".17g")
    return str(value)


def write_table(columns, rows, output, stream):
    if output == "json":
        json.dump({"columns": list(columns),
                   "rows": [dict(zip(columns, r)) for r in rows]}, stream, indent=2)
        stream.write("\n")
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])


def _sheet_of(k):
    if k.imag < 0:
        return 2
    if k.imag > 0:
        return 1
    return None


def cmd_poles(cfg: RunConfig, stream):
    columns = ("kind", "label", "re", "im", "z_re", "z_im", "sheet", "exists")
    c = cfg.params.c
    rows = []
    if cfg.model == "coupled":
        rp = cfg.renormalized()
        for i, k in enumerate(resonance_poles(rp), 1):
            z = -k * k * c * c
            rows.append(("pole", f"k{i}", k.real, k.imag, z.real, z.imag, _sheet_of(k), True))
        res = resonant_wavenumbers(rp)
        for kind, pair in (("first", res.first), ("second", res.second), ("third", res.third)):
            for sign, idx in (("+", 0), ("-", 1)):
                if pair is None:
                    rows.append(("resonant", kind + sign, None, None, None, None, None, False))
                else:
                    k = pair[idx]
                    rows.append(("resonant", kind + sign, k, 0.0, -k * k * c * c, 0.0, None, True))
    else:
        for i, k in enumerate(friedrichs_poles(cfg.params), 1):
            z = -k * k * c * c
            rows.append(("pole", f"k{i}", k.real, k.imag, z.real, z.imag, _sheet_of(k), True))
    write_table(columns, rows, cfg.output, stream)


def parse_grid(text):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"grid must be k_min:k_max:n, got {text!r}") from exc
    if not (0 <= lo < hi and n >= 2 and math.isfinite(hi)):
        raise ConfigError("grid needs 0 <= k_min < k_max and n >= 2")
    return lo, hi, n


def spectrum_rows(rp: RenormalizedParams, lo, hi, n):
    rows = []
    for k in np.linspace(lo, hi, n):
        k = float(k)
        try:
            a = amplitudes(k, rp)
            phase = phase_shift(k, rp)
            d2 = abs(det_inv_extended(k, rp)) ** 2
        except AtPole:
            rows.append((k, None, None, None, None, None, "at_pole"))
            continue
        rows.append((k, a.amp_q, a.amp_Q, a.amp_qQ, phase, d2, "ok"))
    return rows


def cmd_spectrum(cfg: RunConfig, grid, stream):
    lo, hi, n = parse_grid(grid)
    write_table(SPECTRUM_COLUMNS, spectrum_rows(cfg.renormalized(), lo, hi, n), cfg.output, stream)


def cmd_resolve(cfg: RunConfig, z, w1, field_file, xs, path, stream):
    try:
        w2 = FieldSpec.from_json(Path(field_file).read_text()) if field_file else FieldSpec()
    except (OSError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot read field spec {field_file}: {exc}") from exc
    p = cfg.params
    if cfg.model == "coupled":
        solver = solve_coupled if path == "block" else solve_coupled_via_rank_one
        sol = solver(z, w1, w2, p, cfg.quad)
        try:
            det = _pair(coupled_determinant(k_upper(z, p.c), p))
        except PoleOfExpression:
            det = None
        field_key, q_key = "u", "q"
    else:
        if path != "block":
            raise ConfigError("the friedrichs model supports only --path block")
        sol = solve_friedrichs(z, w1, w2, p, cfg.quad)
        det = _pair(sol.det)
        field_key, q_key = "phi", "q0"
    record = {
        "model": cfg.model, "path": path, "z": _pair(z), "k": _pair(sol.k),
        q_key: _pair(sol.q), "c1": _pair(sol.c1), "c2": _pair(sol.c2), "determinant": det,
        field_key: [{"x": x, "value": _pair(sol.u_at(x))} for x in xs],
    }
    json.dump(record, stream, indent=2)
    stream.write("\n")


def cmd_sheet(cfg: RunConfig, z, sheet, stream):
    rp = cfg.renormalized()
    pt = SheetPoint(z, Sheet(sheet))
    k = induced_k(pt, 1.0)
    poles = second_sheet_poles(rp)
    dist, nearest = min((abs(z - zp), zp) for zp in poles)
    value = sheet_eval(pt, rp)
    json.dump({
        "z": _pair(z), "sheet": int(sheet), "k": _pair(k), "value": _pair(value),
        "near_second_sheet_pole": dist <= NEAR_POLE, "nearest_pole_z": _pair(nearest),
        "pole_distance": dist,
    }, stream, indent=2)
    stream.write("\n")


def cmd_selfcheck(corrupt, stream):
    t0 = time.perf_counter()
    results = run_all(tol_scale=1e-30 if corrupt else 1.0, stream=stream)
    failed = [r.name for r in results if not r.passed]
    elapsed = time.perf_counter() - t0
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {elapsed:.1f}s",
          file=stream)
    return EXIT_SELFCHECK if failed else EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--model", choices=("coupled", "friedrichs"))
    common.add_argument("--output", choices=("csv", "json"))
    common.add_argument("--omega", type=float)
    common.add_argument("--gamma-c", dest="gamma_c", type=float)
    common.add_argument("--gamma1")
    common.add_argument("--gamma2c")
    common.add_argument("--c", type=float)
    common.add_argument("--x0", type=float)
    common.add_argument("--a-mp", dest="a_mp", type=float)

    parser = argparse.ArgumentParser(prog="rankres", description=__doc__.splitlines()[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter,
                                     epilog="\n".join(__doc__.splitlines()[2:]))
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("poles", parents=[common], help="poles and resonant wavenumbers")
    sp = sub.add_parser("spectrum", parents=[common], help="amplitude/phase sweep over real k")
    sp.add_argument("--grid", required=True, help="k_min:k_max:n")
    rp = sub.add_parser("resolve", parents=[common], help="apply the model resolvent")
    rp.add_argument("--z", required=True, help="spectral parameter, 're,im' or '1+2j'")
    rp.add_argument("--w1", default="0", help="oscillator source")
    rp.add_argument("--field", help="FieldSpec JSON file for the field source")
    rp.add_argument("--x", default="", help="comma-separated sample points")
    rp.add_argument("--path", choices=("block", "rank1"), default="block")
    sh = sub.add_parser("sheet", parents=[common], help="evaluate D_-1 on sheet 1 or 2")
    sh.add_argument("--z", required=True)
    sh.add_argument("--sheet", type=int, choices=(1, 2), required=True)
    sc = sub.add_parser("selfcheck", parents=[common], help="run the invariant suite")
    sc.add_argument("--corrupt-tolerance", action="store_true", help=argparse.SUPPRESS)
    return parser


def _xs(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad sample list {text!r}") from exc


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selfcheck":
            return cmd_selfcheck(args.corrupt_tolerance, stdout)
        cfg = load_config(args)
        if args.command == "poles":
            cmd_poles(cfg, stdout)
        elif args.command == "spectrum":
            cmd_spectrum(cfg, args.grid, stdout)
        elif args.command == "resolve":
            cmd_resolve(cfg, parse_complex(args.z), parse_complex(args.w1), args.field,
                        _xs(args.x), args.path, stdout)
        elif args.command == "sheet":
            cmd_sheet(cfg, parse_complex(args.z), args.sheet, stdout)
    except ConfigError as exc:
        print(f"rankres: config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except BranchCutError as exc:
        print(f"rankres: branch cut: {exc}", file=stderr)
        return EXIT_CUT
    except DomainError as exc:
        print(f"rankres: invalid input: {exc}", file=stderr)
        return EXIT_CONFIG
    except SingularPerturbation as exc:
        print(f"rankres: singular perturbation: {exc}", file=stderr)
        return EXIT_SINGULAR
    except AtPole as exc:
        pole = exc.pole
        where = ""
        if pole is not None:
            zp = -pole * pole
            where = (f" (k = {pole.real:.17g}{pole.imag:+.17g}j,"
                     f" z = {zp.real:.17g}{zp.imag:+.17g}j)")
        print(f"rankres: at pole{where}: {exc}", file=stderr)
        return EXIT_POLE
    except PoleOfExpression as exc:
        print(f"rankres: at pole: {exc}", file=stderr)
        return EXIT_POLE
    except QuadratureFailure as exc:
        print(f"rankres: quadrature failure: {exc}", file=stderr)
        return EXIT_QUAD
    except RootRefinementFailure as exc:
        print(f"rankres: root verification failed: {exc}", file=stderr)
        return EXIT_ROOT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
