"""Command-line entry point.

Exit codes: 0 success, 1 a verification failed, 2 invalid configuration or
input.  Every JSON artifact carries ``{config, version, wall_time}``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConfigurationError,
    DivergenceError,
    FieldFileError,
    PreconditionError,
    ResolutionError,
    StrainspaceError,
    UsageError,
)
from .spectral import Grid

log = logging.getLogger("strainspace")

COMMANDS = ("decompose", "verify", "estimate-sup", "near-max", "evolve")
EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


# ------------------------------------------------------------ configuration


@dataclass
class RunConfig:
    """Everything a command needs; validated before any computation."""

    command: str
    d: int = 3
    n: int = 32
    L: float = 1.0
    seed: int = 0
    tolerance_profile: str = "default"
    threads: int | None = None
    json_logs: bool = False
    out: str = "."
    params: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def grid(self) -> Grid:
        return Grid(self.d, self.n, self.L)

    def validate(self) -> "RunConfig":
        from .suite import PROFILES

        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}")
        self.grid()
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigurationError("seed must be a non-negative integer")
        if self.threads is not None and self.threads < 1:
            raise ConfigurationError("threads must be positive")
        if self.tolerance_profile not in PROFILES:
            raise ConfigurationError(f"tolerance profile must be one of {sorted(PROFILES)}")
        getattr(self, "_validate_" + self.command.replace("-", "_"))(self.params)
        return self

    # Per-command checks.

    def _validate_decompose(self, p):
        if not p.get("input"):
            raise ConfigurationError("decompose needs --in <field file> or --random")
        if p["input"] != "random" and not Path(p["input"]).is_file():
            raise ConfigurationError(f"input file {p['input']} does not exist")

    def _validate_verify(self, p):
        _positive_int(p, "count")
        _positive_int(p, "det_samples")

    def _validate_estimate_sup(self, p):
        from .extremal import CONSTRAINTS

        _need_d3(self)
        _positive_int(p, "restarts")
        _positive_int(p, "max_iters")
        if p.get("constraint") not in CONSTRAINTS:
            raise ConfigurationError(f"constraint must be one of {CONSTRAINTS}")

    def _validate_near_max(self, p):
        _need_d3(self)
        if p.get("kind") not in ("shell", "gaussian"):
            raise ConfigurationError("kind must be shell or gaussian")
        if not 0 < p.get("eps", 0) < 1:
            raise ConfigurationError("eps must lie in (0, 1)")
        if not p.get("n_param", 0) > 0:
            raise ConfigurationError("n-param must be positive")
        _axis(p.get("axis", "0,0,1"))

    def _validate_evolve(self, p):
        _need_d3(self)
        if p.get("form") not in ("velocity", "potential", "both"):
            raise ConfigurationError("form must be velocity, potential or both")
        init = p.get("init", "")
        if init not in ("taylor-green", "random") and not init.startswith("file:"):
            raise ConfigurationError("init must be taylor-green, random or file:<path>")
        if init.startswith("file:") and not Path(init[5:]).is_file():
            raise ConfigurationError(f"initial field file {init[5:]} does not exist")
        for key in ("T", "dt", "nu"):
            v = p.get(key)
            if v is None or not math.isfinite(v) or v <= 0:
                raise ConfigurationError(f"{key} must be positive and finite")
        if p["dt"] > p["T"]:
            raise ConfigurationError("dt must not exceed T")
        _positive_int(p, "sample_every")


def _positive_int(p: dict, key: str):
    v = p.get(key)
    if v is None or int(v) != v or v < 1:
        raise ConfigurationError(f"{key.replace('_', '-')} must be a positive integer")


def _need_d3(cfg: RunConfig):
    if cfg.d != 3:
        raise ConfigurationError(f"{cfg.command} is defined for d = 3")


def _axis(text: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise ConfigurationError(f"axis must be three comma-separated numbers, got {text!r}") from None
    if v.shape != (3,) or not np.isfinite(v).all() or np.linalg.norm(v) == 0:
        raise ConfigurationError("axis must be a nonzero 3-vector")
    return v / np.linalg.norm(v)


# ------------------------------------------------------------ output helpers


class _JsonFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps(
            {
                "time": self.formatTime(record),
                "level": record.levelname,
                "logger": record.name,
                "message": record.getMessage(),
            }
        )


def _setup_logging(json_logs: bool):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonFormatter() if json_logs else logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("strainspace")
    root.handlers[:] = [handler]
    root.setLevel(logging.INFO)
    root.propagate = False


def _set_threads(threads: int | None):
    if threads is None:
        return
    import numba

    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


class _Outputs:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.start = time.perf_counter()
        self.written: list[str] = []

    def path(self, name: str) -> Path:
        p = self.dir / name
        self.written.append(str(p))
        return p

    def provenance(self) -> dict:
        return {
            "config": self.cfg.to_dict(),
            "version": __version__,
            "wall_time": time.perf_counter() - self.start,
        }

    def json(self, name: str, payload: dict) -> Path:
        p = self.path(name)
        p.write_text(json.dumps({**payload, **self.provenance()}, indent=2, default=_jsonable))
        return p

    def csv(self, name: str, header: list[str], rows) -> Path:
        p = self.path(name)
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        return p

    def field(self, name: str, fld, **kw) -> Path:
        from .fieldio import write_field

        return write_field(fld, self.path(name), meta={"config": self.cfg.to_dict()}, **kw)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


# ------------------------------------------------------------ commands


def cmd_decompose(cfg: RunConfig, out: _Outputs) -> int:
    from .decomp import SUBSPACES, decompose_sym
    from .fieldio import read_field
    from .plotting import plot_part_norms
    from .spectral import SymMatrixField, random_field
    from .suite import tolerances

    src = cfg.params["input"]
    if src == "random":
        M = random_field(cfg.grid(), "symmatrix", cfg.params.get("decay", 1.0), cfg.seed)
    else:
        M = read_field(src, expect_kind=SymMatrixField.kind)
    res = decompose_sym(M)
    for name, part in zip(SUBSPACES, res.parts):
        out.field(f"{name}.field", part.to_rep(M.rep))
    diag = res.diagnostics()
    tol = tolerances(cfg.tolerance_profile)
    checks = {k: {"residual": v, "tolerance": tol[k], "pass": v <= tol[k]} for k, v in diag["residuals"].items()}
    ok = all(c["pass"] for c in checks.values())
    out.json("diagnostics.json", {**diag, "checks": checks, "pass": ok})
    plot_part_norms(diag, out.path("part_norms.png"), title="squared norms of the four parts")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify(cfg: RunConfig, out: _Outputs) -> int:
    from .plotting import plot_verify_report
    from .suite import run_suite

    checks = run_suite(cfg.n, cfg.seed, cfg.params["count"], cfg.tolerance_profile, cfg.params["det_samples"])
    ok = all(c["pass"] for c in checks)
    for c in checks:
        log.info("%-36s %.3e (tol %.1e) %s", c["identity_name"], c["residual"], c["tolerance"], "ok" if c["pass"] else "FAIL")
    out.json("verify.json", {"checks": checks, "pass": ok})
    plot_verify_report(checks, out.path("verify.png"))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_estimate_sup(cfg: RunConfig, out: _Outputs) -> int:
    from .extremal import estimate_supremum
    from .plotting import plot_ascent_traces
    from .spectral import ScalarField

    p = cfg.params
    est = estimate_supremum(
        cfg.grid(),
        restarts=p["restarts"],
        max_iters=p["max_iters"],
        constraint=p["constraint"],
        v_fixed=_axis(p.get("axis", "0,0,1")),
        seed=cfg.seed,
    )
    monotone = all(np.all(np.diff(t.objective) >= 0) for t in est.traces)
    for i, tr in enumerate(est.traces):
        out.csv(f"trace_{i:03d}.csv", ["iter", "objective", "step_size"], tr.rows())
    label = "empirical estimate at this resolution" if est.empirical else "constrained maximum at this resolution"
    out.json("estimate_sup.json", {**est.to_dict(), "label": label, "monotone": monotone})
    out.field("best_amplitude.field", ScalarField(est.best.grid, "physical", est.best.lam.data))
    out.field("best_direction.field", est.best.v)
    plot_ascent_traces(est.traces, out.path("traces.png"), reference=0.75, title=f"{p['constraint']} ascent")
    log.info("%s value %.6f (%s)", p["constraint"], est.value, label)
    return EXIT_OK if monotone else EXIT_FAILED


def cmd_near_max(cfg: RunConfig, out: _Outputs) -> int:
    from .extremal import assemble_maxmid, maxmid_objective, near_maximizer
    from .plotting import plot_slice

    p = cfg.params
    mm = near_maximizer(
        cfg.grid(), eps=p["eps"], kind=p["kind"], v_axis=_axis(p["axis"]), seed=cfg.seed, n_param=p["n_param"]
    )
    value = maxmid_objective(mm)
    out.field("near_max.field", assemble_maxmid(mm), seed=cfg.seed)
    out.field("near_max_amplitude.field", mm.lam, seed=cfg.seed)
    out.json("near_max.json", {"objective": value, "kind": p["kind"], "signed_amplitude": mm.signed})
    lam = mm.lam.physical().data[0].real
    plot_slice(lam[:, :, 0], out.path("near_max_amplitude.png"), title=f"{p['kind']} amplitude, slice x3 = 0")
    log.info("%s near maximizer objective %.6f", p["kind"], value)
    return EXIT_OK


LEDGER_COLUMNS = ["t", "kinetic", "dissipation_integral", "energy_defect", "strain_residual", "equivalence_residual"]


def _ledger_rows(traj, equivalence=None) -> list[dict]:
    led = traj.ledger
    defect = led.energy_defect
    rows = []
    for i, t in enumerate(led.times):
        rows.append(
            {
                "t": t,
                "kinetic": led.kinetic[i],
                "dissipation_integral": led.dissipation_integral[i],
                "energy_defect": float(defect[i]),
                "strain_residual": traj.strain_residuals[i] if traj.strain_residuals else float("nan"),
                "equivalence_residual": equivalence[i] if equivalence is not None else float("nan"),
            }
        )
    return rows


def _initial_velocity(cfg: RunConfig):
    from . import ns
    from .fieldio import read_field
    from .identities import random_divfree
    from .spectral import SymMatrixField, VectorField

    init = cfg.params["init"]
    g = cfg.grid()
    if init == "taylor-green":
        return ns.taylor_green(g, cfg.params.get("amplitude", 1.0))
    if init == "random":
        return random_divfree(g, 2.0, cfg.seed)
    f = read_field(init[5:])
    if isinstance(f, SymMatrixField):
        return f
    if not isinstance(f, VectorField):
        raise ConfigurationError("initial field file must hold a vector or symmatrix field")
    return f


def cmd_evolve(cfg: RunConfig, out: _Outputs) -> int:
    from . import ns
    from .plotting import plot_energy_ledger
    from .spectral import SymMatrixField
    from .suite import tolerances

    p = cfg.params
    init = _initial_velocity(cfg)
    if init.grid != cfg.grid():
        raise ConfigurationError("initial field grid differs from --n/--L")
    tol = tolerances(cfg.tolerance_profile)
    u0 = ns.velocity_from_potential(init) if isinstance(init, SymMatrixField) else init
    forms = ("velocity", "potential") if p["form"] == "both" else (p["form"],)
    trajs = {}
    for form in forms:
        start = init if (form == "potential" and isinstance(init, SymMatrixField)) else (
            ns.potential_from_velocity(u0) if form == "potential" else u0
        )
        trajs[form] = ns.evolve(start, p["T"], p["dt"], p["sample_every"], p["nu"])
    equiv = ns.equivalence_residuals(trajs["velocity"], trajs["potential"]) if len(trajs) == 2 else None

    summary = {"forms": {}, "pass": True}
    for form, traj in trajs.items():
        rows = _ledger_rows(traj, equiv)
        out.csv(f"ledger_{form}.csv", LEDGER_COLUMNS, [[r[c] for c in LEDGER_COLUMNS] for r in rows])
        plot_energy_ledger(rows, out.path(f"ledger_{form}.png"), title=f"{form} form")
        prefix = "u" if form == "velocity" else "M"
        for i, state in enumerate(traj.states):
            out.field(f"{prefix}_{i:04d}.field", state.physical())
        info = {
            "times": traj.times,
            "max_relative_energy_defect": traj.ledger.max_relative_defect(),
            "limits": traj.limits,
        }
        if form == "potential":
            info["max_strain_residual"] = max(traj.strain_residuals)
            info["max_drift_correction"] = max(traj.corrections)
            info["strain_tolerance"] = tol["strain_residual"]
            if info["max_strain_residual"] > tol["strain_residual"]:
                summary["pass"] = False
        summary["forms"][form] = info
    if equiv is not None:
        summary["max_equivalence_residual"] = max(equiv)
        summary["equivalence_tolerance"] = tol["equivalence"]
        if summary["max_equivalence_residual"] > tol["equivalence"]:
            summary["pass"] = False
    out.json("evolve.json", summary)
    return EXIT_OK if summary["pass"] else EXIT_FAILED


HANDLERS = {
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "estimate-sup": cmd_estimate_sup,
    "near-max": cmd_near_max,
    "evolve": cmd_evolve,
}


def run(cfg: RunConfig) -> int:
    """Validate ``cfg``, execute the command and return the exit code."""
    _setup_logging(cfg.json_logs)
    try:
        cfg.validate()
        _set_threads(cfg.threads)
        out = _Outputs(cfg)
        return HANDLERS[cfg.command](cfg, out)
    except (ConfigurationError, UsageError, PreconditionError, ResolutionError, FieldFileError) as exc:
        log.error("%s error: %s", exc.code, exc)
        return EXIT_CONFIG
    except DivergenceError as exc:
        log.error("integration diverged after t=%s: %s", exc.last_valid_time, exc)
        return EXIT_FAILED
    except StrainspaceError as exc:
        log.error("%s error: %s", exc.code, exc)
        return EXIT_FAILED


# ------------------------------------------------------------ argument parsing


def _add_common(p: argparse.ArgumentParser, suppress: bool):
    """Global flags; subcommands repeat them without defaults so either position works."""

    def d(value):
        return argparse.SUPPRESS if suppress else value

    p.add_argument("--threads", type=int, default=d(None), help="numba worker threads")
    p.add_argument("--tolerance-profile", choices=("strict", "default"), default=d("default"))
    p.add_argument("--json-logs", action="store_true", default=d(False), help="emit log records as JSON lines")
    p.add_argument("--out", default=d("."), help="output directory")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--n", type=int, default=d(None), help="grid points per axis")
    p.add_argument("--L", type=float, default=d(1.0), help="box length")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, suppress=True)
    parser = argparse.ArgumentParser(prog="strainspace", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="four-part orthogonal decomposition of a symmetric field")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--in", dest="input", help="field file holding a symmatrix field")
    src.add_argument("--random", action="store_true", help="decompose a seeded random field")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--decay", type=float, default=1.0)

    p = sub.add_parser("verify", parents=[common], help="run the identity suite")
    p.add_argument("--count", type=int, default=3, help="random fields per check")
    p.add_argument("--det-samples", type=int, default=100_000)

    p = sub.add_parser("estimate-sup", parents=[common], help="constrained ascent on the max-mid objective")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--constraint", choices=("free", "fixed", "plane"), default="free")
    p.add_argument("--axis", default="0,0,1", help="direction for the fixed constraint")

    p = sub.add_parser("near-max", parents=[common], help="construct a near maximizer for a fixed direction")
    p.add_argument("--kind", choices=("shell", "gaussian"), default="shell")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--n-param", type=float, default=64.0)
    p.add_argument("--axis", default="0,0,1")

    p = sub.add_parser("evolve", parents=[common], help="integrate Navier-Stokes in velocity and/or potential form")
    p.add_argument("--form", choices=("velocity", "potential", "both"), default="both")
    p.add_argument("--init", default="taylor-green", help="taylor-green, random or file:<path>")
    p.add_argument("--T", type=float, default=0.1)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--sample-every", type=int, default=10)
    return parser


_DEFAULT_N = {"decompose": 16, "verify": 16, "estimate-sup": 32, "near-max": 32, "evolve": 32}
_GLOBAL = {"threads", "tolerance_profile", "json_logs", "out", "seed", "n", "L", "command", "d"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items() if k not in _GLOBAL}
    if ns.command == "decompose":
        params["input"] = "random" if params.pop("random") else params.get("input")
    return RunConfig(
        command=ns.command,
        d=getattr(ns, "d", 3),
        n=ns.n if ns.n is not None else _DEFAULT_N[ns.command],
        L=ns.L,
        seed=ns.seed,
        tolerance_profile=ns.tolerance_profile,
        threads=ns.threads,
        json_logs=ns.json_logs,
        out=ns.out,
        params=params,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
