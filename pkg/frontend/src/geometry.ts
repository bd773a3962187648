/** Pure scale, hit-test, and path helpers shared by both panels. */

export interface Point {
  x: number;
  y: number;
}

export interface Rect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export function normalizeRect(ax: number, ay: number, bx: number, by: number): Rect {
  return {
    x0: Math.min(ax, bx),
    y0: Math.min(ay, by),
    x1: Math.max(ax, bx),
    y1: Math.max(ay, by),
  };
}

export function rectContains(rect: Rect, x: number, y: number): boolean {
  return x >= rect.x0 && x <= rect.x1 && y >= rect.y0 && y <= rect.y1;
}

export function rectArea(rect: Rect): number {
  return (rect.x1 - rect.x0) * (rect.y1 - rect.y0);
}

/** Linear domain→range map; a degenerate domain pins to the range middle. */
export function linearScale(
  domain: [number, number],
  range: [number, number],
): (v: number) => number {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (d0 === d1) {
    const mid = (r0 + r1) / 2;
    return () => mid;
  }
  const k = (r1 - r0) / (d1 - d0);
  return (v: number) => r0 + (v - d0) * k;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) return [0, 1];
  return [lo, hi];
}

export interface PlacedKey extends Point {
  key: string;
}

/** Keys of the dots falling inside a screen-space rectangle. */
export function keysInRect(dots: PlacedKey[], rect: Rect): string[] {
  const out: string[] = [];
  for (const dot of dots) {
    if (rectContains(rect, dot.x, dot.y)) out.push(dot.key);
  }
  return out;
}

/** Keys whose polyline has at least one vertex inside the rectangle. */
export function seriesKeysInRect(
  series: Map<string, Array<Point | null>>,
  rect: Rect,
): string[] {
  const out: string[] = [];
  for (const [key, points] of series) {
    for (const p of points) {
      if (p && rectContains(rect, p.x, p.y)) {
        out.push(key);
        break;
      }
    }
  }
  return out;
}

/** SVG path of a polyline; null points break the pen. */
export function polylinePath(points: Array<Point | null>): string {
  const parts: string[] = [];
  let penDown = false;
  for (const p of points) {
    if (!p) {
      penDown = false;
      continue;
    }
    parts.push(`${penDown ? 'L' : 'M'}${round2(p.x)} ${round2(p.y)}`);
    penDown = true;
  }
  return parts.join(' ');
}

/** Closed ribbon between an upper and a lower outline (same length). */
export function ribbonPath(upper: Point[], lower: Point[]): string {
  if (upper.length === 0 || upper.length !== lower.length) return '';
  const parts: string[] = [];
  upper.forEach((p, i) => {
    parts.push(`${i === 0 ? 'M' : 'L'}${round2(p.x)} ${round2(p.y)}`);
  });
  for (let i = lower.length - 1; i >= 0; i--) {
    parts.push(`L${round2(lower[i].x)} ${round2(lower[i].y)}`);
  }
  return parts.join(' ') + ' Z';
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

/** Sample variance; null for fewer than two usable values. */
export function varianceOf(values: Array<number | null>): number | null {
  const xs = values.filter((v): v is number => v !== null && Number.isFinite(v));
  if (xs.length < 2) return null;
  const mean = xs.reduce((a, b) => a + b, 0) / xs.length;
  const ss = xs.reduce((a, b) => a + (b - mean) * (b - mean), 0);
  return ss / (xs.length - 1);
}

/** Cold-to-warm colour ramp over t in [0, 1]. */
export function colourRamp(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const r = Math.round(40 + 200 * clamped);
  const g = Math.round(80 + 40 * (1 - Math.abs(clamped - 0.5) * 2));
  const b = Math.round(220 - 180 * clamped);
  return `rgb(${r},${g},${b})`;
}
