// Console session state: connection status, latest telemetry, rolling
// path and wobble buffers, and the current widget values.

import { RollingBuffer } from "./buffers.js";
import {
  clampPendulum,
  clampSpeed,
  Telemetry,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export const STALE_AFTER_MS = 1000;

export interface WidgetValues {
  speed: number; // rad/s
  pendulumDeg: number;
  gamma: number;
  delta: number;
  wobbleEnabled: boolean;
}

export class UiSessionState {
  connection: ConnectionStatus = "connecting";
  latest: Telemetry | null = null;
  lastTelemetryAtMs = 0;
  readonly path = new RollingBuffer(60.0); // (X, Z)
  readonly wobble = new RollingBuffer(60.0); // (theta_deg, 0)
  widgets: WidgetValues = {
    speed: 0,
    pendulumDeg: 0,
    gamma: 0.9,
    delta: 0.1,
    wobbleEnabled: true,
  };

  ingest(message: Telemetry, nowMs: number): void {
    this.latest = message;
    this.lastTelemetryAtMs = nowMs;
    this.path.push(message.t, message.state.X, message.state.Z);
    this.wobble.push(message.t, message.metrics.theta_deg, 0);
  }

  /** True when no telemetry arrived for over a second while connected. */
  isStale(nowMs: number): boolean {
    if (this.connection !== "open" || this.lastTelemetryAtMs === 0) {
      return false;
    }
    return nowMs - this.lastTelemetryAtMs > STALE_AFTER_MS;
  }

  /** Widget setters clamp into the server's bounds; they never overflow. */
  setSpeed(value: number): number {
    this.widgets.speed = clampSpeed(value);
    return this.widgets.speed;
  }

  setPendulumDeg(value: number): number {
    this.widgets.pendulumDeg = clampPendulum(value);
    return this.widgets.pendulumDeg;
  }

  setBlend(gamma: number, delta: number): [number, number] {
    const clamp01 = (v: number) => Math.min(Math.max(v, 0), 1);
    this.widgets.gamma = clamp01(gamma);
    this.widgets.delta = clamp01(delta);
    return [this.widgets.gamma, this.widgets.delta];
  }

  reset(): void {
    this.path.clear();
    this.wobble.clear();
    this.latest = null;
  }
}
