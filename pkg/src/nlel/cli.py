"""Command-line front end: ``nlel <counterexample|asymptotic|dispersion|verify>``.

Exit codes: 0 all checks pass, 1 a scientific check failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from . import asymptotics as asy
from . import counterexample as ce
from .core import HarmonicLoad, MaterialParams
from .dispersion import KernelBranch, sample_curve, write_csv
from .exceptions import InvalidParameter, NlelError
from .verify import VerifySettings, run_all, seed_from_env

log = logging.getLogger("nlel")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "mu": 1.0,
    "rho": 1.0,
    "a": 0.01,
    "F": 1.0,
    "k0": 1.0,
    "c0": 0.5,
    "eta": [0.08, 0.04, 0.02],
    "tol_analytic": 1e-12,
    "tol_quadrature": 1e-8,
    "format": "json",
    "out": None,
    "branch": "both",
    "K_min": 0.0,
    "K_max": None,
    "n": 151,
}


class ConfigError(NlelError, ValueError):
    pass


@dataclass
class RunConfig:
    material: MaterialParams
    load: HarmonicLoad
    eta_list: list[float]
    tol_analytic: float = 1e-12
    tol_quadrature: float = 1e-8
    format: str = "json"
    out: str | None = None
    branch: str = "both"
    K_min: float = 0.0
    K_max: float | None = None
    n: int = 151
    seed: int = field(default_factory=seed_from_env)

    def __post_init__(self):
        if not (self.tol_analytic > 0 and self.tol_quadrature > 0):
            raise ConfigError("tolerances must be positive")
        for eta in self.eta_list:
            if not 0 < eta <= asy.ETA_VALIDITY:
                raise ConfigError(f"eta values must lie in (0, {asy.ETA_VALIDITY}], got {eta!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if self.branch not in ("exponential", "gaussian", "both"):
            raise ConfigError(f"branch must be exponential, gaussian or both, got {self.branch!r}")


def _parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex value must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def _parse_etas(value) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, str):
        return [float(v) for v in value.split(",") if v.strip()]
    out = []
    for v in value:
        out.extend(_parse_etas(v))
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, an optional JSON config file and command-line flags."""
    values = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - set(DEFAULTS) - {"seed"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = values.get("seed", seed_from_env())
    try:
        material = MaterialParams(float(values["mu"]), float(values["rho"]), float(values["a"]))
        c0 = float(values["c0"])
        if getattr(args, "special_loading", False):
            c0 = ce.special_loading_speed(float(values["k0"]), material)
        load = HarmonicLoad(_parse_complex(values["F"]), float(values["k0"]), c0)
        cfg = RunConfig(
            material=material,
            load=load,
            eta_list=_parse_etas(values["eta"]),
            tol_analytic=float(values["tol_analytic"]),
            tol_quadrature=float(values["tol_quadrature"]),
            format=values["format"],
            out=values["out"],
            branch=values["branch"],
            K_min=float(values["K_min"]),
            K_max=None if values["K_max"] is None else float(values["K_max"]),
            n=int(values["n"]),
            seed=int(seed),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _flatten(data, prefix=""):
    if isinstance(data, dict):
        for k, v in data.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(data, list) and data and isinstance(data[0], (dict, list)):
        for i, v in enumerate(data):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], data


def emit(report: dict, cfg: RunConfig, stream=None) -> None:
    if cfg.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for k, v in _flatten(report):
            writer.writerow([k, json.dumps(v)])
        text = buf.getvalue()
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        (stream or sys.stdout).write(text)


def cmd_counterexample(cfg: RunConfig, args) -> int:
    rep = ce.report(cfg.load, cfg.material)
    rep["seed"] = cfg.seed
    if rep["special_loading"]:
        rep["note"] = "special loading: gamma = a k0, residual vanishes"
    emit(rep, cfg)
    ok = all(c["pass"] for c in rep["checks"].values()) and rep["reproduces"]
    return EXIT_OK if ok else EXIT_FAIL


def cmd_asymptotic(cfg: RunConfig, args) -> int:
    f_star = cfg.load.F / cfg.material.mu
    C = cfg.load.speed_ratio(cfg.material)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asy.ValidityWarning)
        study = asy.scaling_study(f_star, C, cfg.eta_list)
    for w in study["warnings"]:
        log.warning(w)
    study["seed"] = cfg.seed

    ok = True
    exps = study["exponents"]
    for name in ("combined_eom_residual", "combined_bc_residual"):
        e = exps.get(name)
        if e is not None and abs(e - 3.0) > 0.3:
            ok = False
    if f_star != 0:
        ok &= all(r["contradiction"]["ill_posed"] for r in study["rows"])
    study["pass"] = ok
    emit(study, cfg)
    return EXIT_OK if ok else EXIT_FAIL


def _branches(cfg: RunConfig) -> list[KernelBranch]:
    if cfg.branch == "both":
        return [KernelBranch.EXPONENTIAL, KernelBranch.GAUSSIAN]
    return [KernelBranch.parse(cfg.branch)]


def cmd_dispersion(cfg: RunConfig, args) -> int:
    branches = _branches(cfg)
    K_max = cfg.K_max
    if K_max is None:
        K_max = 2.0 if cfg.branch != "gaussian" else KernelBranch.GAUSSIAN.K_max
    curves = {b: sample_curve(b, cfg.K_min, K_max, cfg.n) for b in branches}
    for b, pts in curves.items():
        if cfg.out:
            path = Path(cfg.out)
            if len(curves) > 1:
                path = path.with_name(f"{path.stem}_{b.value}{path.suffix or '.csv'}")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                write_csv(pts, fh)
            log.info("wrote %s", path)
        else:
            write_csv(pts, sys.stdout)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    settings = VerifySettings(
        material=cfg.material,
        load=cfg.load,
        etas=tuple(cfg.eta_list),
        tol_analytic=cfg.tol_analytic,
        tol_quadrature=cfg.tol_quadrature,
        seed=cfg.seed,
        fault=getattr(args, "inject_fault", None),
    )
    results = run_all(settings)
    width = max(len(r.name) for r in results)
    lines = [f"seed {cfg.seed}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status}  error={r.error:.3e}  tol={r.tolerance:.1e}  {r.detail}".rstrip())
    failed = [r for r in results if not r.passed]
    if failed:
        lines.append("first failures: " + "; ".join(f"{r.name} (error={r.error:.3e})" for r in failed[:3]))
    sys.stdout.write("\n".join(lines) + "\n")
    if cfg.out:
        summary = {"seed": cfg.seed, "results": [r.to_dict() for r in results], "pass": not failed}
        Path(cfg.out).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "counterexample": cmd_counterexample,
    "asymptotic": cmd_asymptotic,
    "dispersion": cmd_dispersion,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flat schema, keys as the flags)")
    common.add_argument("--mu", type=float, help="shear modulus [Pa]")
    common.add_argument("--rho", type=float, help="mass density [kg/m^3]")
    common.add_argument("--a", type=float, help="internal length [m]")
    common.add_argument("--F", type=str, help="traction amplitude, e.g. 1 or 1+0.5j [Pa]")
    common.add_argument("--k0", type=float, help="load wavenumber [1/m]")
    common.add_argument("--c0", type=float, help="load phase speed [m/s]")
    common.add_argument("--eta", action="append", help="small parameter(s); comma list or repeated")
    common.add_argument("--tol-analytic", dest="tol_analytic", type=float)
    common.add_argument("--tol-quadrature", dest="tol_quadrature", type=float)
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out", help="output path (stdout if omitted)")
    common.add_argument("--seed", type=int, help="seed for randomized suites (default: $NLEL_SEED)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nlel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counterexample", parents=[common], help="travelling-load counter-example")
    p.add_argument("--special-loading", action="store_true", help="choose c0 so that gamma = a k0")

    sub.add_parser("asymptotic", parents=[common], help="three-term hierarchy, scaling fits, contradiction")

    p = sub.add_parser("dispersion", parents=[common], help="surface-wave dispersion curves as CSV")
    p.add_argument("--branch", choices=("exponential", "gaussian", "both"))
    p.add_argument("--kmin", dest="K_min", type=float)
    p.add_argument("--kmax", dest="K_max", type=float)
    p.add_argument("--n", type=int)

    p = sub.add_parser("verify", parents=[common], help="run every invariant suite")
    p.add_argument("--inject-fault", dest="inject_fault", choices=("gamma",), help=argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="nlel: %(message)s")
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, InvalidParameter) as exc:
        print(f"nlel: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nlel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
