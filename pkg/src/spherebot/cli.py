"""Command-line front end for simulation, analysis, control and serving.

Exit codes: 0 on success, 2 on validation/usage errors, 3 on numerical
failures.  Angles cross this boundary in degrees; everything stored in
files is SI radians.
"""

from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path

import click

from . import circle, control, scenarios, simulate
from .errors import (
    DegenerateConfigurationError,
    DynamicsError,
    IncompleteRunError,
    InsufficientDataError,
    NotCircularError,
    ParameterError,
    ScenarioError,
    SpherebotError,
    StiffnessError,
)
from .model import DEFAULT_PARAMS, RobotParams, load_params

_NUMERICAL = (
    StiffnessError,
    DynamicsError,
    DegenerateConfigurationError,
    NotCircularError,
    InsufficientDataError,
)
_VALIDATION = (ParameterError, ScenarioError, IncompleteRunError, ValueError)


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(3 if isinstance(exc, _NUMERICAL) else 2)


def _load_params(path) -> RobotParams:
    if path is None:
        return DEFAULT_PARAMS
    return load_params(path)


def _config(rtol, atol, method) -> simulate.IntegratorConfig:
    return simulate.IntegratorConfig(rtol=rtol, atol=atol, method=method)


params_option = click.option(
    "--params", "params_file", type=click.Path(exists=True, dir_okay=False),
    default=None, help="JSON robot-parameter file (defaults built in).",
)
out_option = click.option(
    "--out", "out_dir", type=click.Path(file_okay=False), default="out",
    show_default=True, help="Artifact output directory.",
)
rtol_option = click.option("--rtol", type=float, default=1e-8, show_default=True)
atol_option = click.option("--atol", type=float, default=1e-10, show_default=True)
method_option = click.option(
    "--method", type=click.Choice(["rk45", "radau"]), default="rk45",
    show_default=True, help="Integrator: explicit pair or implicit fallback.",
)


@click.group()
def main():
    """Pendulum-driven ball robot: simulate, analyze, control, serve."""


@main.command("simulate")
@click.option("--scenario", "scenario_name", default=None,
              help="Named scenario to run (see `spherebot simulate --list`).")
@click.option("--list", "list_scenarios", is_flag=True, help="List scenarios.")
@click.option("--beta-deg", type=float, default=15.0, show_default=True,
              help="Pendulum angle for an ad-hoc steady-circle run.")
@click.option("--speed", type=float, default=1.0, show_default=True,
              help="|psi_dot| in rad/s; forward motion uses negative spin.")
@click.option("--duration", type=float, default=60.0, show_default=True)
@params_option
@out_option
@rtol_option
@atol_option
@method_option
def simulate_cmd(scenario_name, list_scenarios, beta_deg, speed, duration,
                 params_file, out_dir, rtol, atol, method):
    """Run a named scenario or an ad-hoc open-loop steady circle."""
    if list_scenarios:
        for name in scenarios.scenario_names():
            click.echo(name)
        return
    try:
        if scenario_name is not None:
            params = load_params(params_file) if params_file else None
            manifest = scenarios.run_scenario(scenario_name, out_dir, params)
            click.echo(f"wrote {len(manifest['artifacts']['trajectories'])} "
                       f"trajectories + metrics to {out_dir}")
            return
        params = _load_params(params_file)
        cfg = _config(rtol, atol, method)
        x0 = simulate.steady_circle_state(math.radians(beta_deg), -speed, params)
        hold = control.make_hold_source(params)
        traj = simulate.integrate(x0, hold, duration, params, cfg,
                                  label=f"steady beta={beta_deg} speed={speed}")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"steady_beta{beta_deg:g}_speed{speed:g}.csv"
        traj.to_csv(path)
        click.echo(f"wrote {path}  (constraint drift "
                   f"{simulate.constraint_drift(traj):.3e} m/s)")
    except SpherebotError as exc:
        _fail(exc)


@main.command()
@click.option("--traj", "traj_file", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Trajectory CSV to analyze.")
@params_option
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None,
              help="Write metrics JSON here instead of stdout.")
def analyze(traj_file, params_file, json_out):
    """Measure circle metrics (wobble, precession, radius) from a CSV."""
    try:
        params = _load_params(params_file)
        traj = simulate.Trajectory.from_csv(traj_file, params)
        metrics = circle.measure_circle_metrics(traj)
        payload = json.dumps(metrics.to_json_dict(), indent=2, sort_keys=True)
        if json_out:
            Path(json_out).write_text(payload + "\n", encoding="utf-8")
            click.echo(f"wrote {json_out}")
        else:
            click.echo(payload)
    except SpherebotError as exc:
        _fail(exc)


@main.command()
@click.option("--beta-deg", type=float, required=True)
@click.option("--speed", type=float, required=True, help="|psi_dot|, rad/s.")
@params_option
def characterize(beta_deg, speed, params_file):
    """Closed-form circular-motion characteristics at one configuration."""
    try:
        params = _load_params(params_file)
        beta = math.radians(beta_deg)
        metrics = circle.predict_circle_metrics(beta, -speed, params)
        payload = metrics.to_json_dict()
        payload["speed_group"] = circle.speed_group(speed, params)
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    except SpherebotError as exc:
        _fail(exc)


@main.command("control")
@click.option("--beta-deg", type=float, default=15.0, show_default=True,
              help="Pendulum setpoint (ignored with --maneuver).")
@click.option("--speed", type=float, default=1.0, show_default=True)
@click.option("--duration", type=float, default=30.0, show_default=True)
@click.option("--gamma", type=float, default=0.9, show_default=True)
@click.option("--delta", type=float, default=0.1, show_default=True)
@click.option("--gains", "gains_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON gains object; --gamma/--delta override its blend.")
@click.option("--maneuver", "maneuver_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON maneuver plan: list of segment objects.")
@params_option
@out_option
@rtol_option
@atol_option
@method_option
def control_cmd(beta_deg, speed, duration, gamma, delta, gains_file,
                maneuver_file, params_file, out_dir, rtol, atol, method):
    """Closed-loop run: hold setpoints or execute a maneuver plan."""
    try:
        params = _load_params(params_file)
        cfg = _config(rtol, atol, method)
        if gains_file:
            with open(gains_file, encoding="utf-8") as fh:
                base = json.load(fh)
            base.update({"gamma": gamma, "delta": delta})
            gains = control.ControllerGains.from_dict(base)
        else:
            gains = control.ControllerGains(gamma=gamma, delta=delta)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if maneuver_file:
            with open(maneuver_file, encoding="utf-8") as fh:
                plan = control.ManeuverPlan.from_dicts(json.load(fh))
            x0 = simulate.steady_circle_state(
                0.0, plan.segments[0].psi_dot_des, params
            )
            traj = control.run_maneuver(plan, gains, x0, params, cfg)
            path = out / "maneuver.csv"
        else:
            sp = control.Setpoints(psi_dot_des=-speed,
                                   beta_des=math.radians(beta_deg))
            controller = control.make_blended_controller(sp, gains, params)
            x0 = simulate.steady_circle_state(math.radians(beta_deg), -speed, params)
            traj = simulate.integrate(x0, controller, duration, params, cfg,
                                      label="closed loop")
            path = out / f"control_beta{beta_deg:g}_speed{speed:g}.csv"
        traj.to_csv(path)
        click.echo(f"wrote {path}")
    except SpherebotError as exc:
        _fail(exc)


@main.command()
@out_option
def report(out_dir):
    """Summarize scenario artifacts into report.json with verdicts."""
    try:
        rep = scenarios.summarize(out_dir)
        path = scenarios.write_report(out_dir, rep)
        for name, entry in sorted(rep["scenarios"].items()):
            for check in entry["checks"]:
                status = "PASS" if check["passed"] else "FAIL"
                click.echo(f"[{status}] {name}: {check['check']} ({check['detail']})")
            if not entry["checks"]:
                click.echo(f"[ ok ] {name}: artifacts complete")
        click.echo(f"wrote {path}")
        if not rep["all_passed"]:
            sys.exit(3)
    except SpherebotError as exc:
        _fail(exc)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None,
              help="Port (default: $SPHEREBOT_PORT or 8080).")
def serve(host, port):
    """Run the real-time teleoperation service."""
    import uvicorn

    from .teleop.server import create_app

    if port is None:
        port = int(os.environ.get("SPHEREBOT_PORT", "8080"))
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
