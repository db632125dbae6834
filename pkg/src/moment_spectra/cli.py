"""Command-line interface.

Subcommands: ``gate``, ``spectrum``, ``scan``, ``frame-potential``, ``validate``.

Global options (accepted before or after the subcommand): ``--out PATH``,
``--format text|json|csv``, ``--tol FLOAT``, ``--seed INT``,
``--threads INT`` and ``--config FILE``.  A JSON config file may supply any
option by its long name (dashes or underscores); explicit command-line
values override it.

Exit codes: 0 ok, 1 validation failure, 2 I/O or parse error,
3 invariant/precondition violation, 4 unsupported configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import frame_potential as fp
from . import gate_algebra as ga
from . import moment_builder as mb
from . import spectra_analytic as sa
from . import spectra_numeric as sn
from . import validation
from .errors import InputError, MomentSpectraError, UnsupportedConfiguration

DEFAULT_SEED = 0

GLOBAL_DEFAULTS = {"out": None, "format": None, "tol": 1e-10, "seed": DEFAULT_SEED, "threads": None, "config": None}

COMMAND_DEFAULTS = {
    "gate": {"canonical": None, "file": None},
    "spectrum": {"n": None, "d": 2, "arch": "local", "e": None, "g": None, "numeric": False},
    "scan": {"n": None, "d": 2, "arch": "local", "e_range": None, "g_range": "0,1", "resolution": 21,
             "solvable_line": False},
    "frame_potential": {"n": 6, "d": 2, "arch": "local", "e": None, "g": None, "t_max": 20},
    "validate": {"level": "quick"},
}


def _num(x: float) -> float:
    """Round to 12 significant digits for stable serialization."""
    return float(f"{float(x):.12g}")


def _cnum(z: complex) -> dict:
    return {"re": _num(z.real), "im": _num(z.imag)}


def _pair(text, name):
    if isinstance(text, (list, tuple)):
        vals = list(text)
    else:
        vals = str(text).split(",")
    try:
        vals = [float(v) for v in vals]
    except ValueError:
        raise InputError(f"--{name} expects comma-separated numbers, got {text!r}") from None
    return vals


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _global_options(parser: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    parser.add_argument("--out", default=S, help="write output to PATH instead of stdout")
    parser.add_argument("--format", default=S, choices=("text", "json", "csv"), help="output format")
    parser.add_argument("--tol", default=S, type=float, help="numerical tolerance (default 1e-10)")
    parser.add_argument("--seed", default=S, type=int, help=f"random seed (default {DEFAULT_SEED})")
    parser.add_argument("--threads", default=S, type=int, help="worker threads for scans")
    parser.add_argument("--config", default=S, help="JSON file supplying default option values")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common)
    p = argparse.ArgumentParser(prog="moment-spectra", description=__doc__.split("\n\n")[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gate", parents=[common], help="entanglement profile and transfer block of a gate")
    g.add_argument("--canonical", default=S, help="qubit canonical parameters 'alpha,beta,gamma'")
    g.add_argument("--file", default=S, help="gate JSON file")

    s = sub.add_parser("spectrum", parents=[common], help="analytic spectrum on the solvable line")
    s.add_argument("-n", type=int, default=S)
    s.add_argument("-d", type=int, default=S)
    s.add_argument("--arch", default=S, choices=("local", "brickwall"))
    s.add_argument("--e", type=float, default=S, help="entangling power e_u")
    s.add_argument("--g", type=float, default=S, help="gate typicality (default: solvable line)")
    s.add_argument("--numeric", action="store_true", default=S, help="add dense-eig oracle and match report")

    c = sub.add_parser("scan", parents=[common], help="|lambda_3| heatmap over (e, g)")
    c.add_argument("-n", type=int, default=S, help="qudits (default 8 for d=2, 6 otherwise)")
    c.add_argument("-d", type=int, default=S)
    c.add_argument("--arch", default=S, choices=("local", "brickwall"))
    c.add_argument("--e-range", default=S, help="'lo,hi' (default 0,e_max)")
    c.add_argument("--g-range", default=S, help="'lo,hi' (default 0,1)")
    c.add_argument("--resolution", type=int, default=S, help="points per axis (default 21)")
    c.add_argument("--solvable-line", action="store_true", default=S,
                   help="also write the solvable-line values (to OUT.solvable.csv, or after the grid)")

    f = sub.add_parser("frame-potential", parents=[common], help="frame potential curve")
    f.add_argument("-n", type=int, default=S)
    f.add_argument("-d", type=int, default=S)
    f.add_argument("--arch", default=S, choices=("local", "brickwall", "domain-wall"))
    f.add_argument("--e", type=float, default=S)
    f.add_argument("--g", type=float, default=S, help="gate typicality (default: solvable line)")
    f.add_argument("--t-max", type=int, default=S)

    v = sub.add_parser("validate", parents=[common], help="run the cross-validation suite")
    v.add_argument("level", nargs="?", default=S, choices=("quick", "full"))
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit command-line values (in that order)."""
    cmd = args.command.replace("-", "_")
    cfg = dict(GLOBAL_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS[cmd])
    given = {k: v for k, v in vars(args).items() if k != "command"}
    if given.get("config"):
        try:
            data = json.loads(Path(given["config"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file: {exc}") from None
        if not isinstance(data, dict):
            raise InputError("config file must contain a JSON object")
        unknown = []
        explicit = set()
        for k, v in data.items():
            key = k.replace("-", "_")
            if key not in cfg:
                unknown.append(k)
            else:
                cfg[key] = v
                explicit.add(key)
        if unknown:
            raise InputError(f"unknown config keys for '{args.command}': {', '.join(sorted(unknown))}")
    else:
        explicit = set()
    cfg.update(given)
    cfg["command"] = cmd
    cfg["_explicit"] = explicit | set(given)
    return cfg


def _validate_config(cfg: dict) -> None:
    """Collect every problem in one message."""
    problems = []
    for key in ("n", "d", "resolution", "t_max", "threads", "seed"):
        v = cfg.get(key)
        if v is not None and (not isinstance(v, (int, np.integer)) or isinstance(v, bool)):
            problems.append(f"{key} must be an integer")
    if isinstance(cfg.get("d"), int) and cfg["d"] < 2:
        problems.append("d must be >= 2")
    if isinstance(cfg.get("threads"), int) and cfg["threads"] < 1:
        problems.append("threads must be >= 1")
    tol = cfg.get("tol")
    if not isinstance(tol, (int, float)) or not tol > 0:
        problems.append("tol must be a positive number")
    cmd = cfg["command"]
    if cmd in ("spectrum",) and cfg.get("e") is None:
        problems.append("--e is required")
    if cmd == "spectrum" and cfg.get("n") is None:
        problems.append("-n is required")
    if cmd == "gate" and (cfg.get("canonical") is None) == (cfg.get("file") is None):
        problems.append("give exactly one of --canonical or --file")
    if problems:
        raise InputError("invalid configuration: " + "; ".join(problems))


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _emit(cfg: dict, text: str) -> None:
    if cfg.get("out"):
        try:
            Path(cfg["out"]).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {cfg['out']}: {exc}") from None
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_gate(cfg: dict) -> int:
    utol = cfg["tol"] if "tol" in cfg["_explicit"] else ga.UNITARITY_TOL
    params = None
    if cfg.get("canonical") is not None:
        vals = _pair(cfg["canonical"], "canonical")
        if len(vals) != 3:
            raise InputError("--canonical needs three comma-separated values")
        params = ga.CanonicalParams(*vals)
        u = ga.gate_from_canonical(params)
    else:
        u = ga.load_gate(cfg["file"], tol=utol)
    prof = ga.entanglement_profile(u)
    res, degenerate = ga.solvable_residual(prof, with_flag=True)
    report = {
        "d": u.d,
        "profile": {k: _num(v) if isinstance(v, float) else v for k, v in prof.to_dict().items()},
        "e_H": _num(ga.e_haar(u.d)),
        "solvable_residual": _num(res),
        "degenerate": degenerate,
        "weingarten_block": [[_num(x) for x in row] for row in ga.weingarten_matrix_from_profile(prof)],
    }
    if params is not None:
        report["qubit_solvable_residual"] = _num(ga.qubit_solvable_residual(params))
    fmt = cfg.get("format") or "text"
    if fmt == "json":
        _emit(cfg, _dump(report))
    elif fmt == "csv":
        _emit(cfg, "d,e_u,g_u,E_u,E_u_swap,solvable_residual,degenerate\n"
              f"{u.d},{prof.e_u:.12e},{prof.g_u:.12e},{prof.E_u:.12e},{prof.E_u_swap:.12e},{res:.12e},{degenerate}\n")
    else:
        lines = [
            f"d                 = {u.d}",
            f"e_u               = {prof.e_u:.12g}",
            f"g_u               = {prof.g_u:.12g}",
            f"E(u)              = {prof.E_u:.12g}",
            f"E(u SWAP)         = {prof.E_u_swap:.12g}",
            f"solvable residual = {res:.12g}" + ("  (degenerate: identity-like gate)" if degenerate else ""),
        ]
        if params is not None:
            lines.append(f"qubit f-sum       = {report['qubit_solvable_residual']:.12g}")
        lines.append("transfer block (rows II, IS, SI, SS):")
        lines += ["  " + " ".join(f"{x:+.6f}" for x in row) for row in report["weingarten_block"]]
        _emit(cfg, "\n".join(lines) + "\n")
    return 0


def cmd_spectrum(cfg: dict) -> int:
    n, d, e = cfg["n"], cfg["d"], float(cfg["e"])
    spec = mb.CircuitSpec(n, d, cfg["arch"])
    spec.check_cap()
    eh = ga.e_haar(d)
    g = e / (2 * eh) if cfg.get("g") is None else float(cfg["g"])
    on_line = abs(g - e / (2 * eh)) <= max(cfg["tol"], 1e-12)
    if not on_line and not cfg["numeric"]:
        raise UnsupportedConfiguration(
            f"(e, g) = ({e}, {g}) is off the solvable line g = e/(2 e_H) = {e / (2 * eh):.6g}; "
            "closed-form spectra exist only there -- rerun with --numeric for the dense spectrum"
        )
    report = {"n": n, "d": d, "architecture": spec.architecture, "e_u": e, "g_u": _num(g)}
    analytic = None
    if on_line:
        analytic = sa.enumerate_spectrum(spec, e)
        report["eigenvalues"] = analytic.to_json()["eigenvalues"]
    if cfg["numeric"]:
        num = sn.moment_spectrum(spec, e, g)
        report["numeric"] = [_cnum(z) for z in sorted(num.eigenvalues, key=lambda z: (-abs(z), np.angle(z)))]
        report["backward_error_estimate"] = num.backward_error_estimate
        if analytic is not None:
            tol = 1e-8 if spec.architecture == mb.LOCAL else 1e-6
            m = sn.match_spectra(analytic, num, tol=tol)
            report["match"] = m.to_json()
    fmt = cfg.get("format") or "json"
    if fmt == "csv":
        rows = ["re,im,sector,occupation"]
        for item in report.get("eigenvalues", []):
            rows.append(f"{item['re']:.12e},{item['im']:.12e},{item['sector']},{item['occupation']}")
        if analytic is None:
            rows += [f"{z['re']:.12e},{z['im']:.12e},," for z in report["numeric"]]
        _emit(cfg, "\n".join(rows) + "\n")
    elif fmt == "text":
        vals = report.get("eigenvalues") or report["numeric"]
        lines = [f"{len(vals)} eigenvalues ({spec.architecture}, n={n}, d={d}, e={e}, g={g:.6g})"]
        lines += [f"  {v['re']:+.12f} {v['im']:+.12f}i" + (f"  p={v['sector']} {v['occupation']}" if "sector" in v else "")
                  for v in vals]
        if "match" in report:
            lines.append(f"match: max distance {report['match']['max_distance']:.3e} ({report['match']['method']})")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, _dump(report))
    if "match" in report and not report["match"]["ok"]:
        return 1
    return 0


def cmd_scan(cfg: dict) -> int:
    d = cfg["d"]
    n = cfg["n"] if cfg.get("n") is not None else (8 if d == 2 else 6)
    spec = mb.CircuitSpec(n, d, cfg["arch"])
    e_range = _pair(cfg["e_range"], "e-range") if cfg.get("e_range") is not None else [0.0, ga.e_max(d)]
    g_range = _pair(cfg["g_range"], "g-range")
    if len(e_range) != 2 or len(g_range) != 2:
        raise InputError("ranges must be 'lo,hi'")
    recs = sn.scan_grid(e_range, g_range, cfg["resolution"], spec, threads=cfg.get("threads"))
    line = None
    if cfg["solvable_line"]:
        eh = ga.e_haar(d)
        hi = min(e_range[1], 2 * eh)  # g = e/(2 e_H) must stay <= 1
        es = np.linspace(max(e_range[0], 0.0), hi, cfg["resolution"])
        line = sn.solvable_line_scan(spec, es, threads=cfg.get("threads"))
    fmt = cfg.get("format") or "csv"
    if fmt == "json":
        obj = {"grid": [r.to_json() for r in recs]}
        if line is not None:
            obj["solvable_line"] = [r.to_json() for r in line]
        _emit(cfg, _dump(obj))
        return 0
    text = sn.records_to_csv(recs)
    if line is not None:
        line_csv = sn.records_to_csv(line)
        if cfg.get("out"):
            out = Path(cfg["out"])
            try:
                out.with_suffix(".solvable.csv").write_text(line_csv)
            except OSError as exc:
                raise InputError(f"cannot write solvable-line CSV: {exc}") from None
        else:
            text = text + "\n" + line_csv
    _emit(cfg, text)
    return 0


def cmd_frame_potential(cfg: dict) -> int:
    n, d, t_max = cfg["n"], cfg["d"], cfg["t_max"]
    eh = ga.e_haar(d)
    e = eh if cfg.get("e") is None else float(cfg["e"])
    g = e / (2 * eh) if cfg.get("g") is None else float(cfg["g"])
    w = mb.weights_from_eg(e, g, d)
    obj = {"n": n, "d": d, "e_u": e, "g_u": _num(g), "architecture": cfg["arch"]}
    if cfg["arch"] == "domain-wall":
        model = fp.domain_wall_model(n, d, w)
        if not model.solvable:
            raise UnsupportedConfiguration("the domain-wall f1 sum is available only on the solvable line")
        curve = [{"t": t, "F": _num(fp.f1(model, t))} for t in range(t_max + 1)]
        oracle = max(abs(fp.f1(model, t) - fp.f1_trace_oracle(model, t)) / max(fp.f1_trace_oracle(model, t), 1e-300)
                     for t in range(t_max + 1))
        obj.update({"diag": _num(model.diag), "off": _num(model.off), "f1_trace_max_rel_error": oracle})
    else:
        spec = mb.CircuitSpec(n, d, cfg["arch"])
        M = mb.to_orthonormal_basis(mb.build_moment(spec, w))
        c = fp.frame_potential_via_moment(M, t_max)
        curve = [{"t": int(t), "F": _num(F)} for t, F in zip(c.t, c.F)]
    obj["curve"] = curve
    fmt = cfg.get("format") or "json"
    if fmt == "csv":
        _emit(cfg, "t,F\n" + "".join(f"{p['t']},{p['F']:.12e}\n" for p in curve))
    elif fmt == "text":
        _emit(cfg, "".join(f"t={p['t']:3d}  F={p['F']:.12g}\n" for p in curve))
    else:
        _emit(cfg, _dump(obj))
    return 0


def cmd_validate(cfg: dict) -> int:
    level = cfg["level"]
    print(f"validate {level} (seed {cfg['seed']})", file=sys.stderr)
    results = validation.run_suite(level, seed=cfg["seed"], log=lambda s: print(s, file=sys.stderr))
    failed = [r for r in results if not r.ok]
    fmt = cfg.get("format") or "text"
    if fmt == "json":
        _emit(cfg, _dump({"level": level, "seed": cfg["seed"], "ok": not failed,
                          "checks": [r.to_json() for r in results]}))
    else:
        summary = "\n".join(r.line() for r in results)
        tail = f"\n{len(results) - len(failed)}/{len(results)} checks passed"
        if failed:
            tail += "; failed: " + ", ".join(f"{r.id} {r.name}" for r in failed)
        _emit(cfg, summary + tail + "\n")
    return 1 if failed else 0


COMMANDS = {
    "gate": cmd_gate,
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "frame_potential": cmd_frame_potential,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = resolve_config(args)
        _validate_config(cfg)
        return COMMANDS[cfg["command"]](cfg)
    except MomentSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    """Console-script wrapper."""
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

