// Rolling telemetry buffers: bounded to the last `horizonSeconds` of
// simulation time so memory stays flat over long sessions.

export interface TimedPoint {
  t: number;
  a: number;
  b: number;
}

export class RollingBuffer {
  private points: TimedPoint[] = [];

  constructor(readonly horizonSeconds: number = 60.0) {}

  push(t: number, a: number, b: number): void {
    const last = this.points[this.points.length - 1];
    if (last !== undefined && t < last.t) {
      // simulation restarted (reset command): drop history
      this.points = [];
    }
    this.points.push({ t, a, b });
    const cutoff = t - this.horizonSeconds;
    let firstKept = 0;
    while (firstKept < this.points.length && this.points[firstKept].t < cutoff) {
      firstKept += 1;
    }
    if (firstKept > 0) {
      this.points = this.points.slice(firstKept);
    }
  }

  get length(): number {
    return this.points.length;
  }

  get span(): number {
    if (this.points.length < 2) return 0;
    return this.points[this.points.length - 1].t - this.points[0].t;
  }

  values(): readonly TimedPoint[] {
    return this.points;
  }

  clear(): void {
    this.points = [];
  }
}
