"""Command-line surface with bit-stable artifact emission.

Commands: validate, riemann, track, fv, scenario, oracle.  All numeric output
uses 17 significant digits, '.' as decimal separator, and '\\n' line endings,
so identical inputs produce byte-identical artifacts.

Exit codes: 0 success, 1 check/validation failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .curves import (HState, default_family, family_from_json, validate_family,
                     velocity)
from .errors import DomainError, UnknownScenarioError
from .fv import grid_from_datum, run as fv_run
from .riemann import RiemannFan, solve_riemann, solve_riemann_overbraking
from .scenarios import list_scenarios, run_scenario
from .tracking import track
from .waves import rarefaction_state, viscous_profile_check, wave_from_json_dict


# ---------------------------------------------------------------------------
# deterministic emission

def fmt_float(x: float) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _json_token(obj) -> str:
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json_token(o) for o in obj) + "]"
    if isinstance(obj, dict):
        items = ((json.dumps(str(k), ensure_ascii=True), _json_token(v))
                 for k, v in obj.items())
        return "{" + ",".join(f"{k}:{v}" for k, v in items) + "}"
    if hasattr(obj, "item"):        # numpy scalar
        return _json_token(obj.item())
    raise TypeError(f"cannot serialize {type(obj)}")


def dump_json(obj, path: Path | None) -> str:
    text = _json_token(obj) + "\n"
    if path is not None:
        path.write_bytes(text.encode("ascii"))
    return text


def dump_csv(header: list[str], rows, path: Path | None) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(float(c)) for c in row))
    text = "\n".join(lines) + "\n"
    if path is not None:
        path.write_bytes(text.encode("ascii"))
    return text


def _out_path(args, name: str) -> Path | None:
    if args.out is None:
        return None
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _emit(args, name: str, text_if_stdout: str):
    if args.out is None:
        sys.stdout.write(text_if_stdout)


# ---------------------------------------------------------------------------
# shared argument handling

def _load_family(spec: str):
    if spec == "builtin":
        return default_family()
    p = Path(spec)
    if not p.exists():
        raise FileNotFoundError(f"family file not found: {spec}")
    return family_from_json(json.loads(p.read_text()))


def _parse_state(text: str) -> HState:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'u,h', got {text!r}")
    return HState(float(parts[0]), float(parts[1]))


def _fan_profile_rows(fam, fan: RiemannFan, n: int = 401):
    """Sample the self-similar solution u(xi), xi = x/t, across the fan."""
    speeds = [w.speed_range for w in fan.waves]
    xi_lo = min((s[0] for s in speeds), default=-1.0) - 0.1
    xi_hi = max((s[1] for s in speeds), default=0.0) + 0.1
    rows = []
    for i in range(n):
        xi = xi_lo + (xi_hi - xi_lo) * i / (n - 1)
        state = fan.left
        for w in fan.waves:
            lo, hi = w.speed_range
            if xi < lo - 1e-15:
                break
            if w.is_shock or xi >= hi:
                state = w.right
            else:
                state = rarefaction_state(fam, w, xi)
                break
        rows.append((xi, state.u, state.h, velocity(fam, state)))
    return rows


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args) -> int:
    fam = _load_family(args.family)
    report = validate_family(fam, grid_n=args.grid_n)
    doc = {"family": fam.name, "passed": report.passed,
           "violations": [{"check": v.check, "u": v.u, "h": v.h,
                           "magnitude": v.magnitude}
                          for v in report.violations]}
    text = dump_json(doc, _out_path(args, "validate.json"))
    _emit(args, "validate.json", text)
    return 0 if report.passed else 1


def cmd_riemann(args) -> int:
    fam = _load_family(args.family)
    left = _parse_state(args.left)
    right = _parse_state(args.right)
    if args.overbrake is not None:
        fan = solve_riemann_overbraking(fam, left, right, args.overbrake)
    else:
        fan = solve_riemann(fam, left, right)
    text = dump_json(fan.to_json_dict(), _out_path(args, "fan.json"))
    _emit(args, "fan.json", text)
    rows = _fan_profile_rows(fam, fan) if fan.waves else []
    csv = dump_csv(["xi", "u", "h", "v"], rows, _out_path(args, "profile.csv"))
    if args.out is None:
        sys.stdout.write(csv)
    return 0


def _parse_datum(args):
    states = [_parse_state(s) for s in args.state]
    jumps = [float(x) for x in args.jump]
    return jumps, states


def cmd_track(args) -> int:
    fam = _load_family(args.family)
    jumps, states = _parse_datum(args)
    policy = {args.overbrake_event: args.overbrake} if args.overbrake is not None else None
    sol = track(fam, jumps, states, args.t_end, delta_v=args.delta_v,
                topology=args.topology, period=args.period, policy=policy)
    events = [{"number": e.number, "t": e.t, "x": e.x} for e in sol.events]
    fs = sol.final()
    fronts = [{"x": f.x, "speed": f.speed, "kind": f.kind,
               "left": {"u": f.left.u, "h": f.left.h},
               "right": {"u": f.right.u, "h": f.right.h}}
              for f in fs.fronts]
    doc = {"t_end": sol.final().t, "truncated": sol.truncated,
           "events": events, "fronts": fronts}
    text = dump_json(doc, _out_path(args, "track.json"))
    _emit(args, "track.json", text)
    return 0


def cmd_fv(args) -> int:
    fam = _load_family(args.family)
    jumps, states = _parse_datum(args)
    x_lo = args.x_lo if args.x_lo is not None else (jumps[0] - 2.0)
    x_hi = args.x_hi if args.x_hi is not None else (jumps[-1] + 2.0)
    g0 = grid_from_datum(fam, jumps, states, x_lo, x_hi, args.dx,
                         topology=args.topology)
    res = fv_run(fam, g0, args.t_end, cfl=args.cfl)
    obs = dump_csv(["t", "tv_v", "sup_dev", "mass"],
                   zip(res.times, res.tv_v, res.sup_dev, res.mass),
                   _out_path(args, "observers.csv"))
    g = res.final
    v = g.v(fam)
    final = dump_csv(["x", "u", "h", "v"],
                     ((x_lo + x, u, h, vv) for x, u, h, vv
                      in zip(g.x, g.u, g.h, v)),
                     _out_path(args, "final.csv"))
    if args.out is None:
        sys.stdout.write(obs)
        sys.stdout.write(final)
    return 0


def _run_one_scenario(item):
    name, fam_spec = item
    fam = _load_family(fam_spec)
    return run_scenario(name, fam=fam)


def cmd_scenario(args) -> int:
    names = [args.scenario] if args.scenario else [s["name"] for s in list_scenarios()]
    if args.list:
        text = dump_json(list_scenarios(), _out_path(args, "scenarios.json"))
        _emit(args, "scenarios.json", text)
        return 0
    items = [(n, args.family) for n in names]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one_scenario, items))
    else:
        reports = [_run_one_scenario(it) for it in items]
    ok = True
    for rep in reports:
        ok = ok and rep["passed"]
        text = dump_json(rep, _out_path(args, f"{rep['name']}.json"))
        _emit(args, f"{rep['name']}.json", text)
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    fam = _load_family(args.family)
    p = Path(args.fan_file)
    if not p.exists():
        raise FileNotFoundError(f"fan file not found: {args.fan_file}")
    doc = json.loads(p.read_text())
    waves = [wave_from_json_dict(d) for d in doc.get("waves", [])]
    results = []
    all_ok = True
    for w in waves:
        if w.is_shock:
            rep = viscous_profile_check(fam, w)
            ok = rep.connected and rep.monotone
            results.append({"kind": w.kind, "connected": rep.connected,
                            "monotone": rep.monotone,
                            "endpoint_gap": rep.max_endpoint_gap})
        else:
            ok = True
            results.append({"kind": w.kind, "connected": True,
                            "monotone": True, "endpoint_gap": 0.0})
        all_ok = all_ok and ok
    text = dump_json({"waves": results, "passed": all_ok},
                     _out_path(args, "oracle.json"))
    _emit(args, "oracle.json", text)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hystlwr",
                                 description="hysteretic follow-the-leader "
                                             "traffic waves")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--family", default="builtin",
                       help="curve family: 'builtin' or a JSON file path")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate", help="check a curve family's structure")
    common(p)
    p.add_argument("--grid-n", type=int, default=400)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("riemann", help="solve a two-state jump")
    common(p)
    p.add_argument("--left", required=True, metavar="u,h")
    p.add_argument("--right", required=True, metavar="u,h")
    p.add_argument("--overbrake", type=float, default=None, metavar="v2")
    p.set_defaults(fn=cmd_riemann)

    def datum(p):
        p.add_argument("--state", action="append", required=True, metavar="u,h",
                       help="repeat once per constant segment, left to right")
        p.add_argument("--jump", action="append", required=True, metavar="x",
                       help="repeat once per jump position, increasing")
        p.add_argument("--t-end", type=float, required=True)

    p = sub.add_parser("track", help="evolve a piecewise-constant datum by "
                                     "front tracking")
    common(p)
    datum(p)
    p.add_argument("--delta-v", type=float, default=1e-3)
    p.add_argument("--topology", choices=("open", "ring"), default="open")
    p.add_argument("--period", type=float, default=None)
    p.add_argument("--overbrake", type=float, default=None, metavar="v2")
    p.add_argument("--overbrake-event", type=int, default=0)
    p.set_defaults(fn=cmd_track)

    p = sub.add_parser("fv", help="evolve a datum with the upwind scheme")
    common(p)
    datum(p)
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--cfl", type=float, default=0.9)
    p.add_argument("--topology", choices=("open", "ring"), default="open")
    p.add_argument("--x-lo", type=float, default=None)
    p.add_argument("--x-hi", type=float, default=None)
    p.set_defaults(fn=cmd_fv)

    p = sub.add_parser("scenario", help="run a named scenario with checks")
    common(p)
    p.add_argument("--scenario", default=None, help="scenario name; omit for all")
    p.add_argument("--list", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_scenario)

    p = sub.add_parser("oracle", help="viscous-profile check over a fan file")
    common(p)
    p.add_argument("fan_file", help="JSON fan artifact from the riemann command")
    p.set_defaults(fn=cmd_oracle)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (FileNotFoundError, ValueError, KeyError, DomainError,
            UnknownScenarioError, json.JSONDecodeError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
