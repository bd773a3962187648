/**
 * Longitude/latitude scatter of the sites. Clicking a dot selects its
 * key; dragging a rectangle selects every key inside (an empty drag
 * clears). The panel never sets its own highlight: selections go out
 * through `onSelect`, highlights come back in via `setHighlight`.
 */

import {
  PlacedKey,
  colourRamp,
  extent,
  keysInRect,
  linearScale,
  normalizeRect,
  rectArea,
} from './geometry.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface MapSite {
  key: string;
  lon: number;
  lat: number;
  label?: string;
  colourValue?: number | null;
}

export interface MapPanelOptions {
  width?: number;
  height?: number;
  margin?: number;
  dotRadius?: number;
  onSelect?: (keys: string[]) => void;
}

/** Drags shorter than this (screen px²) count as clicks, not brushes. */
const CLICK_AREA = 9;

export class MapPanel {
  readonly svg: SVGSVGElement;
  private readonly width: number;
  private readonly height: number;
  private readonly margin: number;
  private readonly dotRadius: number;
  private readonly onSelect: (keys: string[]) => void;

  private dots: PlacedKey[] = [];
  private circlesByKey = new Map<string, SVGCircleElement>();
  private highlighted = new Set<string>();

  private dragStart: { x: number; y: number } | null = null;
  private rubberBand: SVGRectElement;

  constructor(container: HTMLElement, options: MapPanelOptions = {}) {
    this.width = options.width ?? 420;
    this.height = options.height ?? 420;
    this.margin = options.margin ?? 24;
    this.dotRadius = options.dotRadius ?? 5;
    this.onSelect = options.onSelect ?? (() => undefined);

    this.svg = document.createElementNS(SVG_NS, 'svg');
    this.svg.setAttribute('width', String(this.width));
    this.svg.setAttribute('height', String(this.height));
    this.svg.setAttribute('class', 'map-panel');
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

  setSites(sites: MapSite[]): void {
    while (this.svg.firstChild) this.svg.removeChild(this.svg.firstChild);
    this.circlesByKey.clear();

    const inner: [number, number] = [this.margin, this.width - this.margin];
    const innerY: [number, number] = [this.height - this.margin, this.margin];
    const sx = linearScale(extent(sites.map((s) => s.lon)), inner);
    const sy = linearScale(extent(sites.map((s) => s.lat)), innerY);

    const colourValues = sites
      .map((s) => s.colourValue)
      .filter((v): v is number => v !== null && v !== undefined);
    const [c0, c1] = extent(colourValues);

    this.dots = sites.map((s) => ({ key: s.key, x: sx(s.lon), y: sy(s.lat) }));
    for (const [i, site] of sites.entries()) {
      const dot = document.createElementNS(SVG_NS, 'circle');
      dot.setAttribute('class', 'site-dot');
      dot.setAttribute('data-key', site.key);
      dot.setAttribute('cx', String(this.dots[i].x));
      dot.setAttribute('cy', String(this.dots[i].y));
      dot.setAttribute('r', String(this.dotRadius));
      const cv = site.colourValue;
      const base =
        cv === null || cv === undefined
          ? '#4477aa'
          : colourRamp(c1 === c0 ? 0.5 : (cv - c0) / (c1 - c0));
      dot.setAttribute('fill', base);
      dot.setAttribute('fill-opacity', '0.85');
      if (site.label) {
        const title = document.createElementNS(SVG_NS, 'title');
        title.textContent = site.label;
        dot.appendChild(title);
      }
      this.svg.appendChild(dot);
      this.circlesByKey.set(site.key, dot);
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
    for (const [key, dot] of this.circlesByKey) {
      const on = this.highlighted.has(key);
      dot.setAttribute('data-selected', on ? 'true' : 'false');
      dot.setAttribute('stroke', on ? '#222' : 'none');
      dot.setAttribute('stroke-width', on ? '2' : '0');
      dot.setAttribute('fill-opacity', !any || on ? '0.85' : '0.25');
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
    const rect = normalizeRect(start.x, start.y, here.x, here.y);
    if (rectArea(rect) <= CLICK_AREA) {
      this.onSelect(this.clickTarget(here));
    } else {
      this.onSelect(keysInRect(this.dots, rect));
    }
  }

  private clickTarget(p: { x: number; y: number }): string[] {
    const grab = this.dotRadius + 2;
    let best: { key: string; d2: number } | null = null;
    for (const dot of this.dots) {
      const dx = dot.x - p.x;
      const dy = dot.y - p.y;
      const d2 = dx * dx + dy * dy;
      if (d2 <= grab * grab && (!best || d2 < best.d2)) {
        best = { key: dot.key, d2 };
      }
    }
    return best ? [best.key] : [];
  }
}
