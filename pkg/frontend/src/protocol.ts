// Wire protocol mirror: message types plus the same bounds the server
// enforces, so the console never emits an out-of-range command.

export const SPEED_LIMIT_RAD_S = 20.0;
export const PENDULUM_LIMIT_DEG = 30.0;

export type Command =
  | { type: "set_speed"; value: number }
  | { type: "set_pendulum"; value: number }
  | { type: "set_blend"; gamma: number; delta: number }
  | { type: "set_wobble_control"; enabled: boolean }
  | { type: "reset" }
  | { type: "pause" }
  | { type: "resume" };

export interface TelemetryState {
  phi: number;
  theta: number;
  psi: number;
  beta: number;
  X: number;
  Z: number;
  dphi: number;
  dtheta: number;
  dpsi: number;
  dbeta: number;
  dX: number;
  dZ: number;
}

export interface Telemetry {
  type: "telemetry";
  t: number;
  state: TelemetryState;
  torques: { ts: number; tp: number };
  metrics: {
    theta_deg: number;
    phi_dot_rad_s: number;
    rho_estimate_m: number | null;
  };
  flags: {
    paused: boolean;
    wobble_enabled: boolean;
    gamma: number;
    delta: number;
    slew_active: boolean;
    fault: string | null;
  };
}

export interface Ack {
  type: "ack";
  command: string;
  applied: Record<string, unknown>;
}

export interface ErrorReply {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage = Telemetry | Ack | ErrorReply;

export class CommandBoundsError extends Error {}

/** Validate a command against the server's bounds before sending. */
export function validateCommand(command: Command): Command {
  switch (command.type) {
    case "set_speed":
      if (!Number.isFinite(command.value) || Math.abs(command.value) > SPEED_LIMIT_RAD_S) {
        throw new CommandBoundsError(`|speed| must not exceed ${SPEED_LIMIT_RAD_S} rad/s`);
      }
      return command;
    case "set_pendulum":
      if (!Number.isFinite(command.value) || Math.abs(command.value) > PENDULUM_LIMIT_DEG) {
        throw new CommandBoundsError(`|pendulum| must not exceed ${PENDULUM_LIMIT_DEG} deg`);
      }
      return command;
    case "set_blend": {
      const inRange = (v: number) => Number.isFinite(v) && v >= 0 && v <= 1;
      if (!inRange(command.gamma) || !inRange(command.delta)) {
        throw new CommandBoundsError("gamma and delta must lie in [0, 1]");
      }
      return command;
    }
    default:
      return command;
  }
}

/** Clamp a widget value into the command range instead of rejecting it. */
export function clampSpeed(value: number): number {
  return Math.min(Math.max(value, -SPEED_LIMIT_RAD_S), SPEED_LIMIT_RAD_S);
}

export function clampPendulum(valueDeg: number): number {
  return Math.min(Math.max(valueDeg, -PENDULUM_LIMIT_DEG), PENDULUM_LIMIT_DEG);
}

export function parseServerMessage(raw: string): ServerMessage {
  const data = JSON.parse(raw) as { type?: string };
  if (data.type === "telemetry" || data.type === "ack" || data.type === "error") {
    return data as ServerMessage;
  }
  throw new Error(`unknown server message type: ${data.type}`);
}
