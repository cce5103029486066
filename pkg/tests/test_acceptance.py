"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.  The primary criteria exercise the simulation and
controller stack without any UI component; the final (secondary) criterion
drives the teleoperation service through a scripted headless client.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import random_state
from spherebot import circle, control, dynamics, scenarios, simulate
from spherebot.model import DEFAULT_PARAMS, state_vector
from spherebot.simulate import IntegratorConfig


def _criterion(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(f"\n{line}", flush=True)
    assert ok, line


STEADY = IntegratorConfig(rtol=1e-8, atol=1e-10)


@pytest.fixture(scope="module")
def steady_runs():
    """Shared 60 s steady-circle runs keyed by (beta_deg, speed)."""
    runs = {}
    for beta_deg, speed in ((15, 1), (5, 1), (5, 5), (5, 10), (15, 10)):
        x0 = simulate.steady_circle_state(
            math.radians(beta_deg), -float(speed), DEFAULT_PARAMS
        )
        runs[(beta_deg, speed)] = simulate.integrate(
            x0, control.make_hold_source(DEFAULT_PARAMS), 60.0,
            DEFAULT_PARAMS, STEADY, label=f"steady {beta_deg} {speed}",
        )
    return runs


def test_constraint_fidelity(steady_runs):
    drift = simulate.constraint_drift(steady_runs[(15, 1)])
    _criterion(
        "constraint fidelity",
        drift < 1e-6,
        f"max rolling-constraint residual {drift:.3e} m/s over 60 s "
        f"(limit 1e-6)",
    )


def test_energy_conservation():
    x0 = state_vector(beta=math.radians(25.0), theta=math.radians(4.0),
                      dtheta=0.4, dpsi=-1.0)
    x0 = simulate.enforce_rolling_velocities(x0, DEFAULT_PARAMS)
    traj = simulate.integrate(
        x0, None, 30.0, DEFAULT_PARAMS, IntegratorConfig(rtol=1e-10, atol=1e-12)
    )
    energy = simulate.energy_series(traj)
    drift = float(np.max(np.abs(energy - energy[0]))) / max(abs(energy[0]), 1e-9)
    _criterion(
        "energy conservation",
        drift < 1e-6,
        f"relative drift {drift:.3e} over 30 s at rtol 1e-10 (limit 1e-6)",
    )


def test_reduced_model_residuals():
    worst = 0.0
    for beta_deg, speed in ((5, 1), (15, 10)):
        x0 = simulate.steady_circle_state(
            math.radians(beta_deg), -float(speed), DEFAULT_PARAMS
        )
        traj = simulate.integrate(
            x0, control.make_hold_source(DEFAULT_PARAMS), 20.0,
            DEFAULT_PARAMS, STEADY,
        )
        worst = max(worst, circle.reduced_model_max_relative_residual(traj))
    _criterion(
        "reduced-model residuals",
        worst < 0.01,
        f"max relative residual {worst:.3e} at (5 deg, 1) and (15 deg, 10) "
        f"(limit 1e-2)",
    )


def test_wobble_amplitude(steady_runs):
    beta = math.radians(5.0)
    measured = circle.measure_circle_metrics(steady_runs[(5, 1)])
    predicted = circle.wobble_amplitude(beta, -1.0, DEFAULT_PARAMS)
    err_full = abs(measured.amplitude - predicted) / abs(predicted)
    err_low = abs(measured.amplitude - (-beta)) / beta
    _criterion(
        "wobble amplitude",
        err_full < 0.10 and err_low < 0.15,
        f"measured {measured.amplitude:.5f} rad; {err_full:.2%} from the "
        f"full form (limit 10%), {err_low:.2%} from -beta (limit 15%)",
    )


def test_wobble_frequency(steady_runs):
    errs = {}
    for speed in (1, 5, 10):
        measured = circle.measure_circle_metrics(steady_runs[(5, speed)])
        predicted = circle.wobble_frequency(-float(speed), DEFAULT_PARAMS)
        errs[speed] = abs(measured.frequency - predicted) / predicted
    ok = all(err < 0.05 for err in errs.values())
    detail = ", ".join(
        f"|psi_dot|={speed}: {err:.2%}" for speed, err in errs.items()
    )
    _criterion("wobble frequency", ok, detail + " (limit 5% each)")


def test_scaling_laws():
    records = []
    for speed in scenarios.SCALING_SPEEDS:
        x0 = simulate.steady_circle_state(
            scenarios.SCALING_BETA, -speed, scenarios.HIGHSPEED_PARAMS
        )
        traj = simulate.integrate(
            x0, control.make_hold_source(scenarios.HIGHSPEED_PARAMS), 60.0,
            scenarios.HIGHSPEED_PARAMS, STEADY,
        )
        records.append((speed, circle.measure_circle_metrics(traj)))

    def slope(values):
        x = np.log([r[0] for r in records])
        return float(np.polyfit(x, np.log(np.abs(values)), 1)[0])

    s_freq = slope([m.frequency for _, m in records])
    s_amp = slope([m.amplitude for _, m in records])
    s_rad = slope([m.radius for _, m in records])
    ok = (
        abs(s_freq - 1.0) <= 0.05
        and abs(s_amp + 2.0) <= 0.10
        and abs(s_rad - 2.0) <= 0.10
    )
    _criterion(
        "scaling laws",
        ok,
        f"log-log slopes: omega {s_freq:+.4f} (1.0+-0.05), "
        f"|A| {s_amp:+.4f} (-2.0+-0.1), |rho| {s_rad:+.4f} (2.0+-0.1)",
    )


def test_radius_of_curvature(steady_runs):
    errs = {}
    for (beta_deg, speed), limit in (((5, 10), 0.10), ((15, 1), 0.15)):
        measured = circle.measure_circle_metrics(steady_runs[(beta_deg, speed)])
        predicted = circle.radius_of_curvature(
            math.radians(beta_deg), -float(speed), DEFAULT_PARAMS
        )
        errs[(beta_deg, speed)] = (
            abs(measured.radius - predicted) / abs(predicted), limit
        )
    ok = all(err < limit for err, limit in errs.values())
    detail = ", ".join(
        f"({b} deg, {s}): {err:.2%} (limit {limit:.0%})"
        for (b, s), (err, limit) in errs.items()
    )
    _criterion("radius of curvature", ok, detail)


def test_precession_rate(steady_runs):
    errs = {}
    for beta_deg, speed in ((5, 10), (15, 1)):
        traj = steady_runs[(beta_deg, speed)]
        win = circle.analysis_window(traj)
        measured = circle.measure_precession(win)
        theta_mean = float(np.mean(win.column("theta")))
        predicted = circle.precession_rate(
            theta_mean, -float(speed), DEFAULT_PARAMS
        )
        errs[(beta_deg, speed)] = abs(measured - predicted) / abs(predicted)
    ok = all(err < 0.10 for err in errs.values())
    detail = ", ".join(
        f"({b} deg, {s}): {err:.2%}" for (b, s), err in errs.items()
    )
    _criterion("precession rate", ok, detail + " (limit 10% each)")


@pytest.fixture(scope="module")
def fig12_runs():
    params = scenarios.CONTROLLER_PARAMS
    x0 = simulate.steady_circle_state(
        scenarios.FIG12_BETA, scenarios.FIG12_SPEED, params
    )
    preamble = simulate.integrate(
        x0, control.make_hold_source(params), scenarios.PREAMBLE_SECONDS,
        params, STEADY,
    )
    runs = {}
    for gamma, delta in scenarios.FIG12_BLENDS:
        gains = control.ControllerGains(gamma=gamma, delta=delta)
        sp = control.Setpoints(
            psi_dot_des=scenarios.FIG12_SPEED, beta_des=scenarios.FIG12_BETA
        )
        controller = control.make_blended_controller(sp, gains, params)
        part = simulate.integrate(
            preamble.final_state, controller, scenarios.FIG12_CONTROL_SECONDS,
            params, STEADY, t0=scenarios.PREAMBLE_SECONDS,
        )
        runs[(gamma, delta)] = simulate.concat_trajectories([preamble, part])
    return runs


def test_controller_scenario_ordering(fig12_runs):
    params = scenarios.CONTROLLER_PARAMS
    windows = {k: traj.window(15.0, 30.0) for k, traj in fig12_runs.items()}
    ptp = {
        k: float(w.column("dtheta").max() - w.column("dtheta").min())
        for k, w in windows.items()
    }
    radius = {k: abs(circle.measure_radius(w)) for k, w in windows.items()}
    amplitude, _ = circle.measure_wobble(windows[(0.0, 1.0)])
    predicted_amp = circle.wobble_amplitude(
        scenarios.FIG12_BETA, scenarios.FIG12_SPEED, params
    )
    amp_err = abs(amplitude - predicted_amp) / abs(predicted_amp)

    checks = {
        "(0,1) amplitude ~ closed form +-15%": amp_err < 0.15,
        "(1,0) wobble < 5% of (0,1)": ptp[(1.0, 0.0)] < 0.05 * ptp[(0.0, 1.0)],
        "(1,0) radius exceeds (0,1)": radius[(1.0, 0.0)] > radius[(0.0, 1.0)],
        "(0.9,0.1) wobble < 5% of (0,1)": (
            ptp[(0.9, 0.1)] < 0.05 * ptp[(0.0, 1.0)]
        ),
        "(0.9,0.1) radius within 10% of (0,1)": (
            abs(radius[(0.9, 0.1)] - radius[(0.0, 1.0)])
            / radius[(0.0, 1.0)] < 0.10
        ),
    }
    detail = (
        f"amplitude err {amp_err:.2%}; lean-rate ptp ratios "
        f"{ptp[(1.0, 0.0)] / ptp[(0.0, 1.0)]:.3%} and "
        f"{ptp[(0.9, 0.1)] / ptp[(0.0, 1.0)]:.3%}; radii "
        f"{radius[(0.0, 1.0)]:.3f} / {radius[(1.0, 0.0)]:.3f} / "
        f"{radius[(0.9, 0.1)]:.3f} m"
    )
    failed = [name for name, ok in checks.items() if not ok]
    _criterion(
        "controller scenario ordering",
        not failed,
        detail + (f"; FAILED: {failed}" if failed else ""),
    )


def test_turning_maneuver():
    params = scenarios.CONTROLLER_PARAMS
    gains = control.ControllerGains(gamma=0.9, delta=0.1)
    plan = control.turn_plan(
        -1.0, math.radians(15.0), lead_in=5.0,
        arc_heading_change=math.pi / 2, lead_out=15.0,
    )
    x0 = simulate.steady_circle_state(0.0, -1.0, params)
    traj = control.run_maneuver(plan, gains, x0, params, STEADY)
    tail = traj.window(traj.t[-1] - 5.0)
    theta_max = float(np.max(np.abs(tail.column("theta"))))
    dphi_max = float(np.max(np.abs(tail.column("dphi"))))
    ok = theta_max <= math.radians(0.2) and dphi_max <= 0.01
    _criterion(
        "turning maneuver",
        ok,
        f"post-arc |theta| <= {math.degrees(theta_max):.4f} deg "
        f"(limit 0.2), |dphi| <= {dphi_max:.5f} rad/s (limit 0.01)",
    )


def test_fig15_trends():
    records = scenarios._run_turn_sweep(
        scenarios.CONTROLLER_PARAMS, 0.9, 0.1, None, "wobble_free"
    )
    deflections = [r["deflection_rad"] for r in records]
    errors = [r["radius_error_percent"] for r in records]
    increasing = all(b > a for a, b in zip(deflections, deflections[1:]))
    decreasing = all(b < a for a, b in zip(errors, errors[1:]))
    _criterion(
        "turn-sweep trends",
        increasing and decreasing,
        "deflection deg: "
        + " ".join(f"{math.degrees(d):.3f}" for d in deflections)
        + (" (strictly increasing)" if increasing else " (NOT increasing)")
        + "; radius error %: "
        + " ".join(f"{e:.3f}" for e in errors)
        + (" (strictly decreasing)" if decreasing else " (NOT decreasing)"),
    )


def test_exact_linearization():
    rng = np.random.default_rng(7)
    gains = control.ControllerGains()
    sp = control.Setpoints(psi_dot_des=-1.0, beta_des=math.radians(10.0))
    worst = 0.0
    checked = 0
    while checked < 100:
        x = simulate.enforce_rolling_velocities(
            random_state(rng), DEFAULT_PARAMS
        )
        dyn = dynamics.affine_decomposition(x, DEFAULT_PARAMS)
        if abs(dyn.theta_ddot_gain) < 1e-3:
            continue
        tp = control.wobble_torque(x, sp, gains, dyn)
        v_theta = gains.kp_thetadot * (sp.theta_dot_des - x[7])
        dx = dynamics.state_derivative(
            x, dynamics.ControlInput(rng.uniform(-3, 3), tp), DEFAULT_PARAMS
        )
        worst = max(worst, abs(dx[7] - v_theta))
        checked += 1
    _criterion(
        "exact linearization",
        worst < 1e-9,
        f"max |theta'' - v_theta| = {worst:.3e} over 100 random "
        f"non-singular states (limit 1e-9)",
    )


def test_teleop_protocol_and_headless_client():
    """[SECONDARY] protocol round-trip + scripted teleoperation drive."""
    from starlette.testclient import TestClient

    from spherebot.teleop import protocol
    from spherebot.teleop.server import create_app

    # lossless round-trip over every command type
    samples = [
        {"type": "set_speed", "value": -1.5},
        {"type": "set_pendulum", "value": 12.5},
        {"type": "set_blend", "gamma": 0.9, "delta": 0.1},
        {"type": "set_wobble_control", "enabled": True},
        {"type": "reset", "params": scenarios.CONTROLLER_PARAMS.to_dict()},
        {"type": "pause"},
        {"type": "resume"},
    ]
    for sample in samples:
        command = protocol.parse_command(sample)
        assert protocol.parse_command(
            json.loads(json.dumps(protocol.serialize(command)))
        ) == command

    telemetry_times = []
    theta_trace = []  # (t_sim, theta_deg)

    with TestClient(create_app()) as client:
        created = client.post(
            "/session", json={"telemetry_hz": 30.0, "real_time_factor": 1.0}
        ).json()
        sid = created["session_id"]
        with client.websocket_connect(f"/ws/session/{sid}") as ws:
            def drive(seconds):
                deadline = time.monotonic() + seconds
                while time.monotonic() < deadline:
                    message = json.loads(ws.receive_text())
                    if message["type"] == "telemetry":
                        telemetry_times.append(time.monotonic())
                        theta_trace.append(
                            (message["t"], message["metrics"]["theta_deg"])
                        )

            ws.send_text(json.dumps({"type": "set_speed", "value": -1.0}))
            ws.send_text(json.dumps({"type": "set_pendulum", "value": 15.0}))
            ws.send_text(json.dumps(
                {"type": "set_wobble_control", "enabled": False}
            ))
            drive(25.0)
            toggle_sim_time = theta_trace[-1][0]
            ws.send_text(json.dumps(
                {"type": "set_wobble_control", "enabled": True}
            ))
            drive(37.0)

    sim_t = np.array([p[0] for p in theta_trace])
    theta = np.array([p[1] for p in theta_trace])

    def amplitude(t_lo, t_hi):
        mask = (sim_t >= t_lo) & (sim_t <= t_hi)
        values = theta[mask]
        return 0.5 * (values.max() - values.min())

    amp_before = amplitude(toggle_sim_time - 10.0, toggle_sim_time)
    amp_after = amplitude(sim_t[-1] - 10.0, sim_t[-1])
    reduction = 1.0 - amp_after / amp_before

    # telemetry rate: every full one-second bin inside the window >= 20
    times = np.array(telemetry_times)
    times -= times[0]
    span = times[-1]
    bins = np.bincount(times[times < math.floor(span)].astype(int))
    min_rate = bins.min() if bins.size else 0
    mean_rate = times.size / span

    ok = reduction > 0.80 and span >= 60.0 and min_rate >= 20
    _criterion(
        "teleop protocol and headless drive [SECONDARY]",
        ok,
        f"theta amplitude {amp_before:.3f} -> {amp_after:.5f} deg "
        f"({reduction:.1%} reduction, limit 80%); telemetry {mean_rate:.1f} Hz "
        f"mean, worst 1s bin {min_rate} msgs over {span:.1f} s (limit 20)",
    )
