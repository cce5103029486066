import { describe, expect, it } from "vitest";

import {
  PENDULUM_LIMIT_DEG,
  SPEED_LIMIT_RAD_S,
  Telemetry,
} from "../src/protocol.js";
import { STALE_AFTER_MS, UiSessionState } from "../src/state.js";

function telemetry(t: number, overrides: Partial<Telemetry["state"]> = {}): Telemetry {
  return {
    type: "telemetry",
    t,
    state: {
      phi: 0, theta: 0.1, psi: 0, beta: 0.2, X: 1.0, Z: -0.5,
      dphi: 0, dtheta: 0, dpsi: -1, dbeta: 0, dX: 0, dZ: 0,
      ...overrides,
    },
    torques: { ts: 0, tp: 0 },
    metrics: { theta_deg: 5.7, phi_dot_rad_s: 0.1, rho_estimate_m: -0.9 },
    flags: {
      paused: false, wobble_enabled: true, gamma: 0.9, delta: 0.1,
      slew_active: false, fault: null,
    },
  };
}

describe("UiSessionState", () => {
  it("ingests telemetry into both buffers", () => {
    const state = new UiSessionState();
    state.ingest(telemetry(0.1), 1000);
    state.ingest(telemetry(0.2, { X: 1.1 }), 1033);
    expect(state.latest?.t).toBe(0.2);
    expect(state.path.length).toBe(2);
    expect(state.wobble.length).toBe(2);
    expect(state.path.values()[1].a).toBe(1.1);
    expect(state.wobble.values()[0].a).toBe(5.7);
  });

  it("flags stale telemetry after one second", () => {
    const state = new UiSessionState();
    state.connection = "open";
    state.ingest(telemetry(0.1), 1000);
    expect(state.isStale(1000 + STALE_AFTER_MS - 1)).toBe(false);
    expect(state.isStale(1000 + STALE_AFTER_MS + 1)).toBe(true);
  });

  it("never reports stale before any telemetry or when disconnected", () => {
    const state = new UiSessionState();
    expect(state.isStale(99999)).toBe(false);
    state.connection = "closed";
    state.ingest(telemetry(0.1), 0);
    expect(state.isStale(99999)).toBe(false);
  });

  it("keeps widget values inside the server bounds", () => {
    const state = new UiSessionState();
    expect(state.setSpeed(1e9)).toBe(SPEED_LIMIT_RAD_S);
    expect(state.setPendulumDeg(-1e9)).toBe(-PENDULUM_LIMIT_DEG);
    const [gamma, delta] = state.setBlend(7, -3);
    expect(gamma).toBe(1);
    expect(delta).toBe(0);
  });

  it("reset clears the buffers and the latest sample", () => {
    const state = new UiSessionState();
    state.ingest(telemetry(0.1), 0);
    state.reset();
    expect(state.path.length).toBe(0);
    expect(state.wobble.length).toBe(0);
    expect(state.latest).toBeNull();
  });
});
