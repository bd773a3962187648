/**
 * Time-series panel: one polyline per site (raw mode) or one
 * upper/lower ribbon per site (monthly mode, fed from /summary).
 * Brushing a rectangle selects the keys whose drawn geometry passes
 * through it; a brush over empty space clears. Like the map, the panel
 * only reports selections and is highlighted from outside.
 */

import {
  Point,
  Rect,
  extent,
  linearScale,
  normalizeRect,
  polylinePath,
  rectContains,
  ribbonPath,
  seriesKeysInRect,
} from './geometry.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface RawPoint {
  t: number;
  v: number | null;
}

export interface RibbonPoint {
  t: number;
  upper: number | null;
  lower: number | null;
}

export interface SeriesPanelOptions {
  width?: number;
  height?: number;
  margin?: number;
  onSelect?: (keys: string[]) => void;
}

export class SeriesPanel {
  readonly svg: SVGSVGElement;
  private readonly width: number;
  private readonly height: number;
  private readonly margin: number;
  private readonly onSelect: (keys: string[]) => void;

  private shapesByKey = new Map<string, SVGElement>();
  private screenSeries = new Map<string, Array<Point | null>>();
  private highlighted = new Set<string>();
  private mode: 'raw' | 'ribbon' = 'raw';

  private dragStart: { x: number; y: number } | null = null;
  private rubberBand: SVGRectElement;

  constructor(container: HTMLElement, options: SeriesPanelOptions = {}) {
    this.width = options.width ?? 560;
    this.height = options.height ?? 420;
    this.margin = options.margin ?? 28;
    this.onSelect = options.onSelect ?? (() => undefined);

    this.svg = document.createElementNS(SVG_NS, 'svg');
    this.svg.setAttribute('width', String(this.width));
    this.svg.setAttribute('height', String(this.height));
    this.svg.setAttribute('class', 'series-panel');
    container.appendChild(this.svg);

    this.rubberBand = document.createElementNS(SVG_NS, 'rect');
    this.rubberBand.setAttribute('class', 'rubber-band');
    this.rubberBand.setAttribute('fill', 'rgba(120,120,120,0.15)');
    this.rubberBand.setAttribute('stroke', '#888');
    this.rubberBand.setAttribute('stroke-dasharray', '4 3');
    this.rubberBand.style.display = 'none';

    this.svg.addEventListener('mousedown', (e) => this.handleDown(e));
    this.svg.addEventListener('mousemove', (e) => this.handleMove(e));
    this.svg.addEventListener('mouseup', (e) => this.handleUp(e));
  }

  private local(e: MouseEvent): { x: number; y: number } {
    const box = this.svg.getBoundingClientRect();
    return { x: e.clientX - box.left, y: e.clientY - box.top };
  }

  private scales(
    ts: number[],
    vs: number[],
  ): { sx: (t: number) => number; sy: (v: number) => number } {
    const sx = linearScale(extent(ts), [this.margin, this.width - this.margin]);
    const sy = linearScale(extent(vs), [this.height - this.margin, this.margin]);
    return { sx, sy };
  }

  private reset(): void {
    while (this.svg.firstChild) this.svg.removeChild(this.svg.firstChild);
    this.shapesByKey.clear();
    this.screenSeries.clear();
  }

  /** One polyline per key; null values break the line. */
  setRawSeries(series: Map<string, RawPoint[]>): void {
    this.reset();
    this.mode = 'raw';
    const ts: number[] = [];
    const vs: number[] = [];
    for (const points of series.values()) {
      for (const p of points) {
        ts.push(p.t);
        if (p.v !== null) vs.push(p.v);
      }
    }
    const { sx, sy } = this.scales(ts, vs);
    for (const [key, points] of series) {
      const screen = points.map((p) =>
        p.v === null ? null : { x: sx(p.t), y: sy(p.v) },
      );
      this.screenSeries.set(key, screen);
      const path = document.createElementNS(SVG_NS, 'path');
      path.setAttribute('class', 'series-line');
      path.setAttribute('data-key', key);
      path.setAttribute('d', polylinePath(screen));
      path.setAttribute('fill', 'none');
      path.setAttribute('stroke', '#4477aa');
      path.setAttribute('stroke-width', '1.4');
      this.svg.appendChild(path);
      this.shapesByKey.set(key, path);
    }
    this.svg.appendChild(this.rubberBand);
    this.applyHighlight();
  }

  /** One band per key between the upper and lower monthly outlines. */
  setRibbons(series: Map<string, RibbonPoint[]>): void {
    this.reset();
    this.mode = 'ribbon';
    const ts: number[] = [];
    const vs: number[] = [];
    for (const points of series.values()) {
      for (const p of points) {
        ts.push(p.t);
        if (p.upper !== null) vs.push(p.upper);
        if (p.lower !== null) vs.push(p.lower);
      }
    }
    const { sx, sy } = this.scales(ts, vs);
    for (const [key, points] of series) {
      const usable = points.filter(
        (p): p is RibbonPoint & { upper: number; lower: number } =>
          p.upper !== null && p.lower !== null,
      );
      const upper = usable.map((p) => ({ x: sx(p.t), y: sy(p.upper) }));
      const lower = usable.map((p) => ({ x: sx(p.t), y: sy(p.lower) }));
      this.screenSeries.set(key, [...upper, ...lower]);
      const band = document.createElementNS(SVG_NS, 'path');
      band.setAttribute('class', 'series-ribbon');
      band.setAttribute('data-key', key);
      band.setAttribute('d', ribbonPath(upper, lower));
      band.setAttribute('fill', '#4477aa');
      band.setAttribute('fill-opacity', '0.35');
      band.setAttribute('stroke', '#4477aa');
      this.svg.appendChild(band);
      this.shapesByKey.set(key, band);
    }
    this.svg.appendChild(this.rubberBand);
    this.applyHighlight();
  }

  setHighlight(keys: ReadonlySet<string>): void {
    this.highlighted = new Set(keys);
    this.applyHighlight();
  }

  highlightedKeys(): string[] {
    return [...this.highlighted].sort();
  }

  private applyHighlight(): void {
    const any = this.highlighted.size > 0;
    for (const [key, shape] of this.shapesByKey) {
      const on = this.highlighted.has(key);
      shape.setAttribute('data-selected', on ? 'true' : 'false');
      if (this.mode === 'raw') {
        shape.setAttribute('stroke', on ? '#cc3311' : '#4477aa');
        shape.setAttribute('stroke-width', on ? '2.4' : '1.4');
        shape.setAttribute('stroke-opacity', !any || on ? '1' : '0.25');
      } else {
        shape.setAttribute('fill', on ? '#cc3311' : '#4477aa');
        shape.setAttribute('stroke', on ? '#cc3311' : '#4477aa');
        shape.setAttribute('fill-opacity', !any || on ? '0.45' : '0.12');
      }
    }
  }

  private handleDown(e: MouseEvent): void {
    this.dragStart = this.local(e);
    this.rubberBand.style.display = 'none';
  }

  private handleMove(e: MouseEvent): void {
    if (!this.dragStart) return;
    const here = this.local(e);
    const rect = normalizeRect(this.dragStart.x, this.dragStart.y, here.x, here.y);
    this.rubberBand.style.display = 'block';
    this.rubberBand.setAttribute('x', String(rect.x0));
    this.rubberBand.setAttribute('y', String(rect.y0));
    this.rubberBand.setAttribute('width', String(rect.x1 - rect.x0));
    this.rubberBand.setAttribute('height', String(rect.y1 - rect.y0));
  }

  private handleUp(e: MouseEvent): void {
    if (!this.dragStart) return;
    const start = this.dragStart;
    this.dragStart = null;
    this.rubberBand.style.display = 'none';
    const here = this.local(e);
    const rect: Rect = normalizeRect(start.x, start.y, here.x, here.y);
    if (this.mode === 'ribbon') {
      this.onSelect(this.ribbonKeysInRect(rect));
    } else {
      this.onSelect(seriesKeysInRect(this.screenSeries, rect));
    }
  }

  private ribbonKeysInRect(rect: Rect): string[] {
    // a ribbon is hit when any of its outline vertices falls inside
    const out: string[] = [];
    for (const [key, points] of this.screenSeries) {
      for (const p of points) {
        if (p && rectContains(rect, p.x, p.y)) {
          out.push(key);
          break;
        }
      }
    }
    return out;
  }
}
