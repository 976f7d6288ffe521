"""Command line driver: orbit | phase-portrait | melnikov | verify.

Every command reads one strict JSON config (unknown keys are rejected) and
writes deterministic artifacts into --out: CSV tables with a header row,
LF line endings and 17-significant-digit floats, JSON summaries with sorted
keys, plus a report.json describing the run.  Identical configs produce
byte-identical data files; wall-clock time lives only in report.json.

Config keys (defaults in parentheses):

    surface        "euclidean" | "sphere" | "hyperbolic"   [required]
    rho0           radius of the unperturbed circle        [required]
    perturbation   list of {"j": int, "re": x, "im": y}    ([])
    epsilon        perturbation strength                   (0.0)
    m, n           resonance, 0 < m < n coprime            (unset)
    grid           sample grid / portrait orbit count      (256)
    steps          bounces per orbit                       (1000)
    eps_list       strictly decreasing positive floats     ([1e-2, 5e-3, 2.5e-3])
    seed           RNG seed for the verify suite           (0)
    theta0         launch parameter                        (0.0)
    psi0           launch angle in (0, pi)                 (pi/2)

Exit codes: 0 success, 1 structured numerical/validation error, 2 config
error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .billiard import (
    BilliardState,
    _step_arrays,
    billiard_step,
    generating_function,
    iterate,
    iterate_many,
    momentum_of,
    momentum_values,
    psi_from_momentum,
    rotation_number,
)
from .curves import Oval, RadialCurve, validate_oval
from .errors import BilliardError, ConfigError
from .melnikov import (
    find_resonance,
    first_order_check,
    melnikov_potential,
)
from .surfaces import Surface, TWO_PI

COMMANDS = ("orbit", "phase-portrait", "melnikov", "verify")

_DEFAULTS = {
    "perturbation": (),
    "epsilon": 0.0,
    "m": None,
    "n": None,
    "grid": 256,
    "steps": 1000,
    "eps_list": (1e-2, 5e-3, 2.5e-3),
    "seed": 0,
    "theta0": 0.0,
    "psi0": math.pi / 2,
}
_ALLOWED_KEYS = {"surface", "rho0"} | set(_DEFAULTS)

# Portrait initial angles stay this far from tangency.
PORTRAIT_PSI_MARGIN = 0.05
# Random states of the verify suite stay this far from tangency.
VERIFY_PSI_MARGIN = 0.15
VERIFY_STATES = 50
FD_STEP = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    surface: Surface
    rho0: float
    perturbation: tuple
    epsilon: float
    m: int | None
    n: int | None
    grid: int
    steps: int
    eps_list: tuple
    seed: int
    theta0: float
    psi0: float

    def curve(self) -> RadialCurve:
        coeffs = [(j, complex(re, im)) for j, re, im in self.perturbation]
        return RadialCurve(
            surface=self.surface,
            rho0=self.rho0,
            coeffs=coeffs,
            epsilon=self.epsilon,
        )

    def oval(self) -> Oval:
        return validate_oval(self.curve())

    def to_dict(self) -> dict:
        return {
            "surface": self.surface.value,
            "rho0": self.rho0,
            "perturbation": [
                {"j": j, "re": re, "im": im} for j, re, im in self.perturbation
            ],
            "epsilon": self.epsilon,
            "m": self.m,
            "n": self.n,
            "grid": self.grid,
            "steps": self.steps,
            "eps_list": list(self.eps_list),
            "seed": self.seed,
            "theta0": self.theta0,
            "psi0": self.psi0,
        }


def _require_number(raw, key):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"config key {key!r} must be a number")
    value = float(raw)
    if not math.isfinite(value):
        raise ConfigError(f"config key {key!r} must be finite")
    return value


def _require_int(raw, key):
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"config key {key!r} must be an integer")
    return int(raw)


def parse_config(text) -> ExperimentConfig:
    """Parse and validate a JSON config; unknown keys are an error."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - _ALLOWED_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key in ("surface", "rho0"):
        if key not in raw:
            raise ConfigError(f"config key {key!r} is required")

    try:
        surface = Surface.from_name(raw["surface"])
    except BilliardError as exc:
        raise ConfigError(str(exc)) from None
    rho0 = _require_number(raw["rho0"], "rho0")
    if rho0 <= 0.0:
        raise ConfigError("rho0 must be positive")
    if surface is Surface.SPHERE and rho0 >= math.pi / 2:
        raise ConfigError("spherical ovals need rho0 < pi/2")

    pert_raw = raw.get("perturbation", [])
    if not isinstance(pert_raw, list):
        raise ConfigError("perturbation must be a list of {j, re, im} objects")
    perturbation = []
    for entry in pert_raw:
        if not isinstance(entry, dict) or set(entry) != {"j", "re", "im"}:
            raise ConfigError(
                "each perturbation entry must have exactly the keys j, re, im"
            )
        perturbation.append(
            (
                _require_int(entry["j"], "perturbation.j"),
                _require_number(entry["re"], "perturbation.re"),
                _require_number(entry["im"], "perturbation.im"),
            )
        )

    epsilon = _require_number(raw.get("epsilon", _DEFAULTS["epsilon"]), "epsilon")

    m = raw.get("m")
    n = raw.get("n")
    if (m is None) != (n is None):
        raise ConfigError("m and n must be given together")
    if m is not None:
        m = _require_int(m, "m")
        n = _require_int(n, "n")
        if not 0 < m < n:
            raise ConfigError("resonance needs 0 < m < n")
        if math.gcd(m, n) != 1:
            raise ConfigError("resonance needs gcd(m, n) = 1")

    grid = _require_int(raw.get("grid", _DEFAULTS["grid"]), "grid")
    if grid < 8:
        raise ConfigError("grid must be at least 8")
    steps = _require_int(raw.get("steps", _DEFAULTS["steps"]), "steps")
    if steps < 1:
        raise ConfigError("steps must be positive")

    eps_raw = raw.get("eps_list", list(_DEFAULTS["eps_list"]))
    if not isinstance(eps_raw, list) or not eps_raw:
        raise ConfigError("eps_list must be a nonempty list of numbers")
    eps_list = tuple(_require_number(e, "eps_list") for e in eps_raw)
    if any(e <= 0.0 for e in eps_list) or any(
        b >= a for a, b in zip(eps_list, eps_list[1:])
    ):
        raise ConfigError("eps_list must be positive and strictly decreasing")

    seed = _require_int(raw.get("seed", _DEFAULTS["seed"]), "seed")
    theta0 = _require_number(raw.get("theta0", _DEFAULTS["theta0"]), "theta0")
    psi0 = _require_number(raw.get("psi0", _DEFAULTS["psi0"]), "psi0")
    if not 0.0 < psi0 < math.pi:
        raise ConfigError("psi0 must lie in (0, pi)")

    return ExperimentConfig(
        surface=surface,
        rho0=rho0,
        perturbation=tuple(perturbation),
        epsilon=epsilon,
        m=m,
        n=n,
        grid=grid,
        steps=steps,
        eps_list=eps_list,
        seed=seed,
        theta0=theta0,
        psi0=psi0,
    )


# ---------------------------------------------------------------------------
# deterministic emission
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_json(path: Path, payload: dict):
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _run_orbit(config: ExperimentConfig, out_dir: Path):
    oval = config.oval()
    state = BilliardState(theta=config.theta0, psi=config.psi0)
    orbit = iterate(oval, state, config.steps)
    y = momentum_values(oval, orbit.theta, orbit.psi)
    rows = (
        (str(k), _fmt(orbit.theta[k]), _fmt(orbit.psi[k]),
         _fmt(orbit.lifted_theta[k]), _fmt(y[k]))
        for k in range(len(orbit))
    )
    path = out_dir / "orbit.csv"
    _write_csv(path, ("k", "theta", "psi", "lifted_theta", "y"), rows)
    scalars = {"steps": config.steps}
    if config.steps >= 10:
        scalars["rotation_number"] = rotation_number(orbit)
    return [path], scalars


def _run_phase_portrait(config: ExperimentConfig, out_dir: Path):
    oval = config.oval()
    count = config.grid
    psis = np.linspace(
        PORTRAIT_PSI_MARGIN, math.pi - PORTRAIT_PSI_MARGIN, count
    )
    thetas0 = np.full(count, config.theta0 % TWO_PI)
    thetas, psi_hist, _ = iterate_many(oval, thetas0, psis, config.steps)

    def rows():
        for orbit_id in range(count):
            for k in range(config.steps + 1):
                yield (
                    str(orbit_id),
                    str(k),
                    _fmt(thetas[k, orbit_id]),
                    _fmt(psi_hist[k, orbit_id]),
                )

    path = out_dir / "phase_portrait.csv"
    _write_csv(path, ("orbit_id", "k", "theta", "psi"), rows())
    return [path], {"orbits": count, "steps": config.steps}


def _run_melnikov(config: ExperimentConfig, out_dir: Path):
    if config.m is None:
        raise ConfigError("melnikov requires m and n")
    curve = config.curve()
    res = find_resonance(config.m, config.n, config.rho0, config.surface)
    result = melnikov_potential(res, curve, grid=config.grid)
    csv_path = out_dir / "melnikov_L1.csv"
    _write_csv(
        csv_path,
        ("theta", "L1"),
        ((_fmt(t), _fmt(v)) for t, v in zip(result.thetas, result.values)),
    )
    summary = {
        "m": res.m,
        "n": res.n,
        "psi_resonant": res.psi,
        "l0": res.l0,
        "C": result.constant,
        "verdict": result.verdict.value,
        "resonant_modes": list(result.resonant_modes),
        "grid": len(result.thetas),
    }
    json_path = out_dir / "melnikov_summary.json"
    _write_json(json_path, summary)
    return [csv_path, json_path], {
        "C": result.constant,
        "verdict": result.verdict.value,
    }


def _momentum_chart_step(oval: Oval, theta: float, y: float):
    """One bounce in (theta, y) coordinates, theta reported without wrapping."""
    psi = psi_from_momentum(oval, theta, y)
    advance, psi1 = _step_arrays(
        oval.curve, np.array([theta % TWO_PI]), np.array([psi])
    )
    theta1 = theta + float(advance[0])
    y1 = float(momentum_values(oval, np.array([theta1 % TWO_PI]),
                               np.array([float(psi1[0])]))[0])
    return theta1, y1


def _invariant_suite(oval: Oval, rng: np.random.Generator, count: int) -> dict:
    """Finite-difference residuals of the twist-map structure."""
    h = FD_STEP
    res_y0 = res_y1 = res_chain = res_det = res_rev = 0.0
    twist_min = math.inf
    for _ in range(count):
        theta0 = float(rng.uniform(0.0, TWO_PI))
        psi0 = float(rng.uniform(VERIFY_PSI_MARGIN, math.pi - VERIFY_PSI_MARGIN))
        s0 = BilliardState(theta=theta0, psi=psi0)
        s1 = billiard_step(oval, s0)
        s2 = billiard_step(oval, s1)
        y0 = momentum_of(oval, s0).y
        y1 = momentum_of(oval, s1).y

        def d1g(a, b):
            return (
                generating_function(oval, a + h, b)
                - generating_function(oval, a - h, b)
            ) / (2.0 * h)

        def d2g(a, b):
            return (
                generating_function(oval, a, b + h)
                - generating_function(oval, a, b - h)
            ) / (2.0 * h)

        res_y0 = max(res_y0, abs(y0 + d1g(s0.theta, s1.theta)))
        res_y1 = max(res_y1, abs(y1 - d2g(s0.theta, s1.theta)))
        res_chain = max(
            res_chain,
            abs(d2g(s0.theta, s1.theta) + d1g(s1.theta, s2.theta)),
        )

        t_p, y_p = _momentum_chart_step(oval, theta0, y0 + h)
        t_m, y_m = _momentum_chart_step(oval, theta0, y0 - h)
        dtheta_dy = (t_p - t_m) / (2.0 * h)
        dy_dy = (y_p - y_m) / (2.0 * h)
        t_p2, y_p2 = _momentum_chart_step(oval, theta0 + h, y0)
        t_m2, y_m2 = _momentum_chart_step(oval, theta0 - h, y0)
        dtheta_dt = (t_p2 - t_m2) / (2.0 * h)
        dy_dt = (y_p2 - y_m2) / (2.0 * h)
        det = dtheta_dt * dy_dy - dtheta_dy * dy_dt
        twist_min = min(twist_min, dtheta_dy)
        res_det = max(res_det, abs(abs(det) - 1.0))

        back = billiard_step(
            oval, BilliardState(theta=s1.theta, psi=math.pi - s1.psi)
        )
        gap = (back.theta - s0.theta + math.pi) % TWO_PI - math.pi
        res_rev = max(res_rev, abs(gap), abs((math.pi - back.psi) - s0.psi))
    return {
        "momentum_vs_minus_d1g": res_y0,
        "momentum_vs_plus_d2g": res_y1,
        "chain_identity": res_chain,
        "jacobian_det_minus_one": res_det,
        "twist_min": twist_min,
        "reversibility": res_rev,
        "states": count,
    }


def _run_verify(config: ExperimentConfig, out_dir: Path):
    if config.m is None:
        raise ConfigError("verify requires m and n")
    curve = config.curve()
    res = find_resonance(config.m, config.n, config.rho0, config.surface)
    report = first_order_check(
        curve, res, eps_list=config.eps_list, grid=config.grid
    )
    rng = np.random.default_rng(config.seed)
    oval = config.oval()
    invariants = _invariant_suite(oval, rng, VERIFY_STATES)
    payload = {
        "first_order": {
            "eps_list": list(report.eps_list),
            "sup_errors": list(report.sup_errors),
            "order": report.order,
            "C": report.constant,
            "C_fits": list(report.constant_fits) if report.constant_fits else None,
            "C_extrapolated": report.constant_extrapolated,
            "sign_match": report.sign_match,
            "silent": report.silent,
        },
        "invariants": invariants,
    }
    path = out_dir / "verify.json"
    _write_json(path, payload)
    scalars = {
        "order": report.order,
        "twist_min": invariants["twist_min"],
        "jacobian_det_minus_one": invariants["jacobian_det_minus_one"],
    }
    return [path], scalars


_RUNNERS = {
    "orbit": _run_orbit,
    "phase-portrait": _run_phase_portrait,
    "melnikov": _run_melnikov,
    "verify": _run_verify,
}


def run(config: ExperimentConfig, command: str, out_dir) -> dict:
    """Execute one command; returns the report written to report.json."""
    if command not in _RUNNERS:
        raise ConfigError(f"unknown command {command!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    outputs, scalars = _RUNNERS[command](config, out_dir)
    report = {
        "command": command,
        "status": "ok",
        "config": config.to_dict(),
        "outputs": [p.name for p in outputs],
        "scalars": scalars,
        "wall_time_s": time.perf_counter() - start,
    }
    _write_json(out_dir / "report.json", report)
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="geobilliards",
        description="Billiards in ovals on constant-curvature surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to JSON config")
        p.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)
    try:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        config = parse_config(text)
        report = run(config, args.command, args.out)
    except ConfigError as exc:
        print(f"geobilliards: config error: {exc}", file=sys.stderr)
        return 2
    except BilliardError as exc:
        print(
            f"geobilliards: {type(exc).__name__}: {exc}", file=sys.stderr
        )
        return 1
    scalars = " ".join(f"{k}={v}" for k, v in sorted(report["scalars"].items()))
    print(f"{args.command}: ok {scalars}".rstrip())
    return 0
