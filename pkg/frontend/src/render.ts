// Canvas rendering: top-down ground path and the scrolling wobble trace.
// The drawing functions work against the 2D context interface only, with
// pure helpers for the coordinate transforms.

import { RollingBuffer } from "./buffers.js";
import { Telemetry } from "./protocol.js";

export interface Viewport {
  scale: number; // pixels per metre
  cx: number; // screen centre x
  cy: number; // screen centre y
  originX: number; // world coordinate mapped to centre
  originZ: number;
}

/** Fit the viewport around the path's bounding box with a margin. */
export function fitViewport(
  buffer: RollingBuffer,
  width: number,
  height: number,
): Viewport {
  const points = buffer.values();
  let minX = -1, maxX = 1, minZ = -1, maxZ = 1;
  if (points.length >= 2) {
    minX = Infinity; maxX = -Infinity; minZ = Infinity; maxZ = -Infinity;
    for (const p of points) {
      minX = Math.min(minX, p.a); maxX = Math.max(maxX, p.a);
      minZ = Math.min(minZ, p.b); maxZ = Math.max(maxZ, p.b);
    }
  }
  const spanX = Math.max(maxX - minX, 0.5);
  const spanZ = Math.max(maxZ - minZ, 0.5);
  const scale = 0.85 * Math.min(width / spanX, height / spanZ);
  return {
    scale,
    cx: width / 2,
    cy: height / 2,
    originX: (minX + maxX) / 2,
    originZ: (minZ + maxZ) / 2,
  };
}

/** World (X, Z) to screen pixels; Z points up the screen. */
export function worldToScreen(
  view: Viewport,
  x: number,
  z: number,
): [number, number] {
  return [
    view.cx + (x - view.originX) * view.scale,
    view.cy - (z - view.originZ) * view.scale,
  ];
}

export function drawPath(
  ctx: CanvasRenderingContext2D,
  buffer: RollingBuffer,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const points = buffer.values();
  if (points.length < 2) return;
  const view = fitViewport(buffer, width, height);
  ctx.strokeStyle = "#2563eb";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  points.forEach((p, i) => {
    const [sx, sy] = worldToScreen(view, p.a, p.b);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.stroke();
  const head = points[points.length - 1];
  const [hx, hy] = worldToScreen(view, head.a, head.b);
  ctx.fillStyle = "#dc2626";
  ctx.beginPath();
  ctx.arc(hx, hy, 4, 0, 2 * Math.PI);
  ctx.fill();
}

export function drawWobbleTrace(
  ctx: CanvasRenderingContext2D,
  buffer: RollingBuffer,
  width: number,
  height: number,
  windowSeconds = 20,
): void {
  ctx.clearRect(0, 0, width, height);
  const points = buffer.values();
  if (points.length < 2) return;
  const tEnd = points[points.length - 1].t;
  const tStart = tEnd - windowSeconds;
  let maxAbs = 1.0; // degrees; at least +-1 deg of headroom
  for (const p of points) {
    if (p.t >= tStart) maxAbs = Math.max(maxAbs, Math.abs(p.a));
  }
  const toX = (t: number) => ((t - tStart) / windowSeconds) * width;
  const toY = (v: number) => height / 2 - (v / (1.1 * maxAbs)) * (height / 2);
  ctx.strokeStyle = "#9ca3af";
  ctx.beginPath();
  ctx.moveTo(0, height / 2);
  ctx.lineTo(width, height / 2);
  ctx.stroke();
  ctx.strokeStyle = "#059669";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  let started = false;
  for (const p of points) {
    if (p.t < tStart) continue;
    const sx = toX(p.t);
    const sy = toY(p.a);
    if (!started) {
      ctx.moveTo(sx, sy);
      started = true;
    } else {
      ctx.lineTo(sx, sy);
    }
  }
  ctx.stroke();
}

export function formatReadouts(latest: Telemetry | null): string[] {
  if (latest === null) return ["waiting for telemetry..."];
  const rho = latest.metrics.rho_estimate_m;
  return [
    `t = ${latest.t.toFixed(2)} s`,
    `speed dpsi = ${latest.state.dpsi.toFixed(3)} rad/s`,
    `pendulum beta = ${((latest.state.beta * 180) / Math.PI).toFixed(2)} deg`,
    `lean theta = ${latest.metrics.theta_deg.toFixed(2)} deg`,
    `precession dphi = ${latest.metrics.phi_dot_rad_s.toFixed(4)} rad/s`,
    `radius estimate = ${rho === null ? "straight" : rho.toFixed(2) + " m"}`,
    latest.flags.wobble_enabled ? "wobble control ON" : "wobble control OFF",
    latest.flags.paused ? "PAUSED" : "",
  ].filter((s) => s.length > 0);
}
