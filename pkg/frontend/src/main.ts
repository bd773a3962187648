/**
 * Wires the map and series panels to one selection group on the cubble
 * service. Either panel's selection is POSTed to the service; both
 * panels highlight from the event stream, so after quiescence the two
 * views and the service agree exactly.
 */

import { ApiClient, SeriesRow, SelectionSource } from './api.js';
import { varianceOf } from './geometry.js';
import { MapPanel, MapSite } from './mapPanel.js';
import { RawPoint, RibbonPoint, SeriesPanel } from './seriesPanel.js';
import { Bucket, StateStore, canonicalKey } from './state.js';

export interface ExplorerOptions {
  group?: string;
  vars?: string[];
  bucket?: Bucket;
  mapOptions?: ConstructorParameters<typeof MapPanel>[1];
  seriesOptions?: ConstructorParameters<typeof SeriesPanel>[1];
}

export interface Explorer {
  map: MapPanel;
  series: SeriesPanel;
  state: StateStore;
  group: string;
  /** resolves once the next selection event at or past `seq` is applied */
  whenSeq(seq: number): Promise<void>;
  stop(): void;
}

function indexOrdinal(value: string | number | null): number {
  if (typeof value === 'number') return value;
  if (value === null) return 0;
  const parsed = Date.parse(value.length === 10 ? value + 'T00:00:00Z' : value);
  return Number.isNaN(parsed) ? 0 : parsed / 86_400_000;
}

export async function startExplorer(
  mapContainer: HTMLElement,
  seriesContainer: HTMLElement,
  baseUrl: string,
  options: ExplorerOptions = {},
): Promise<Explorer> {
  const api = new ApiClient(baseUrl);
  const group = options.group ?? 'cubble';
  const meta = await api.meta();
  const bucket: Bucket = options.bucket ?? 'raw';
  const vars = options.vars ?? defaultVars(meta.temporal_vars, bucket);
  const state = new StateStore(vars, bucket);

  const post = (keys: string[], source: SelectionSource) => {
    void api.postSelection(group, keys, source).catch(() => undefined);
  };

  const map = new MapPanel(mapContainer, {
    ...options.mapOptions,
    onSelect: (keys) => post(keys, 'map'),
  });
  const series = new SeriesPanel(seriesContainer, {
    ...options.seriesOptions,
    onSelect: (keys) => post(keys, 'series'),
  });

  const sites = await api.sites();
  const [lonCol, latCol] = meta.coords;

  let ribbonRows: SeriesRow[] = [];
  if (bucket === 'month') {
    ribbonRows = await api.summary('mean', 'month', vars);
    series.setRibbons(ribbonsByKey(ribbonRows, meta.key, vars));
  } else {
    const byKey = new Map<string, RawPoint[]>();
    for (const site of sites) {
      const key = canonicalKey(site[meta.key] as string | number);
      const rows = await api.series(site[meta.key] as string | number, [vars[0]]);
      byKey.set(
        key,
        rows.map((r) => ({
          t: indexOrdinal(r[meta.index] as string | number | null),
          v: r[vars[0]] as number | null,
        })),
      );
    }
    series.setRawSeries(byKey);
  }

  map.setSites(mapSites(sites, meta.key, lonCol, latCol, ribbonRows, vars));

  const applyToPanels = () => {
    const keys = state.current().selectedKeys;
    map.setHighlight(keys);
    series.setHighlight(keys);
  };
  state.subscribe(applyToPanels);

  const waiters: Array<{ seq: number; resolve: () => void }> = [];
  const controller = new AbortController();
  const subscription = api
    .subscribeSelection(
      group,
      (sel) => {
        state.applySelection(sel);
        const seen = state.current().seq;
        for (let i = waiters.length - 1; i >= 0; i--) {
          if (seen >= waiters[i].seq) {
            waiters[i].resolve();
            waiters.splice(i, 1);
          }
        }
      },
      controller.signal,
    )
    .catch(() => undefined);

  return {
    map,
    series,
    state,
    group,
    whenSeq(seq: number): Promise<void> {
      if (state.current().seq >= seq) return Promise.resolve();
      return new Promise((resolve) => waiters.push({ seq, resolve }));
    },
    stop(): void {
      controller.abort();
      void subscription;
    },
  };
}

function defaultVars(available: string[], bucket: Bucket): string[] {
  if (bucket === 'month') {
    const upper = available.includes('tmax') ? 'tmax' : available[0];
    const lower = available.includes('tmin')
      ? 'tmin'
      : available[1] ?? available[0];
    return [upper, lower];
  }
  return [available[0]];
}

function ribbonsByKey(
  rows: SeriesRow[],
  keyCol: string,
  vars: string[],
): Map<string, RibbonPoint[]> {
  const [upperVar, lowerVar] = [vars[0], vars[1] ?? vars[0]];
  const out = new Map<string, RibbonPoint[]>();
  for (const row of rows) {
    const key = canonicalKey(row[keyCol] as string | number);
    let bucketed = out.get(key);
    if (!bucketed) {
      bucketed = [];
      out.set(key, bucketed);
    }
    bucketed.push({
      t: row.month as number,
      upper: row[upperVar] as number | null,
      lower: row[lowerVar] as number | null,
    });
  }
  for (const points of out.values()) points.sort((a, b) => a.t - b.t);
  return out;
}

function mapSites(
  sites: Array<Record<string, unknown>>,
  keyCol: string,
  lonCol: string,
  latCol: string,
  ribbonRows: SeriesRow[],
  vars: string[],
): MapSite[] {
  // colour: variance of the per-month band width when monthly data is
  // loaded, neutral otherwise
  const widthsByKey = new Map<string, Array<number | null>>();
  if (ribbonRows.length && vars.length >= 2) {
    for (const row of ribbonRows) {
      const key = canonicalKey(row[keyCol] as string | number);
      const upper = row[vars[0]] as number | null;
      const lower = row[vars[1]] as number | null;
      const width = upper !== null && lower !== null ? upper - lower : null;
      const list = widthsByKey.get(key) ?? [];
      list.push(width);
      widthsByKey.set(key, list);
    }
  }
  return sites.map((site) => {
    const key = canonicalKey(site[keyCol] as string | number);
    const widths = widthsByKey.get(key);
    return {
      key,
      lon: site[lonCol] as number,
      lat: site[latCol] as number,
      label: typeof site.name === 'string' ? site.name : key,
      colourValue: widths ? varianceOf(widths) : null,
    };
  });
}
