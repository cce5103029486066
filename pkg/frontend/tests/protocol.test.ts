import { describe, expect, it } from "vitest";

import {
  clampPendulum,
  clampSpeed,
  CommandBoundsError,
  parseServerMessage,
  PENDULUM_LIMIT_DEG,
  SPEED_LIMIT_RAD_S,
  validateCommand,
} from "../src/protocol.js";

describe("validateCommand", () => {
  it("passes in-range commands through unchanged", () => {
    const command = { type: "set_speed", value: -1.5 } as const;
    expect(validateCommand(command)).toBe(command);
    expect(
      validateCommand({ type: "set_pendulum", value: 15 }),
    ).toEqual({ type: "set_pendulum", value: 15 });
    expect(
      validateCommand({ type: "set_blend", gamma: 0.9, delta: 0.1 }),
    ).toEqual({ type: "set_blend", gamma: 0.9, delta: 0.1 });
  });

  it("rejects speeds beyond the server limit", () => {
    expect(() =>
      validateCommand({ type: "set_speed", value: SPEED_LIMIT_RAD_S + 0.1 }),
    ).toThrow(CommandBoundsError);
    expect(() =>
      validateCommand({ type: "set_speed", value: Number.NaN }),
    ).toThrow(CommandBoundsError);
  });

  it("rejects pendulum angles beyond the server limit", () => {
    expect(() =>
      validateCommand({
        type: "set_pendulum",
        value: -(PENDULUM_LIMIT_DEG + 1),
      }),
    ).toThrow(CommandBoundsError);
  });

  it("rejects blend weights outside [0, 1]", () => {
    expect(() =>
      validateCommand({ type: "set_blend", gamma: 1.2, delta: 0.0 }),
    ).toThrow(CommandBoundsError);
    expect(() =>
      validateCommand({ type: "set_blend", gamma: 0.5, delta: -0.01 }),
    ).toThrow(CommandBoundsError);
  });

  it("accepts flag-style commands without payload checks", () => {
    expect(validateCommand({ type: "pause" })).toEqual({ type: "pause" });
    expect(
      validateCommand({ type: "set_wobble_control", enabled: false }),
    ).toEqual({ type: "set_wobble_control", enabled: false });
  });
});

describe("clamping", () => {
  it("clamps widget values symmetrically into bounds", () => {
    expect(clampSpeed(999)).toBe(SPEED_LIMIT_RAD_S);
    expect(clampSpeed(-999)).toBe(-SPEED_LIMIT_RAD_S);
    expect(clampSpeed(3)).toBe(3);
    expect(clampPendulum(45)).toBe(PENDULUM_LIMIT_DEG);
    expect(clampPendulum(-45)).toBe(-PENDULUM_LIMIT_DEG);
  });
});

describe("parseServerMessage", () => {
  it("parses the three server message kinds", () => {
    const telemetry = {
      type: "telemetry",
      t: 1.0,
      state: {},
      torques: { ts: 0, tp: 0 },
      metrics: {},
      flags: {},
    };
    expect(parseServerMessage(JSON.stringify(telemetry)).type).toBe(
      "telemetry",
    );
    expect(
      parseServerMessage(
        JSON.stringify({ type: "ack", command: "pause", applied: {} }),
      ).type,
    ).toBe("ack");
    expect(
      parseServerMessage(
        JSON.stringify({ type: "error", code: "bounds", message: "x" }),
      ).type,
    ).toBe("error");
  });

  it("rejects unknown message types", () => {
    expect(() => parseServerMessage(JSON.stringify({ type: "hello" }))).toThrow();
  });
});
