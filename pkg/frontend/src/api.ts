/**
 * Typed client for the cubble HTTP service.
 *
 * The selection event stream is consumed with fetch + ReadableStream
 * rather than EventSource so the same code runs in browsers and in
 * node-based tests.
 */

export interface Selection {
  group: string;
  keys: Array<string | number>;
  source: string | null;
  seq: number;
}

export interface ServiceMeta {
  key: string;
  index: string;
  coords: [string, string];
  coord_mode: string;
  index_kind: string | null;
  interval: number | null;
  n_sites: number;
  temporal_vars: string[];
}

export interface VarStats {
  mean: number | null;
  min: number | null;
  max: number | null;
  count: number;
}

export type SiteRow = Record<string, unknown> & {
  stats: Record<string, VarStats>;
};

export type SeriesRow = Record<string, number | string | null>;

export type SelectionSource = 'map' | 'series' | 'api';

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function expectJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, '') + path;
  }

  meta(): Promise<ServiceMeta> {
    return this.fetchFn(this.url('/meta')).then((r) => expectJson<ServiceMeta>(r));
  }

  sites(): Promise<SiteRow[]> {
    return this.fetchFn(this.url('/sites')).then((r) => expectJson<SiteRow[]>(r));
  }

  series(
    key: string | number,
    vars?: string[],
    bucket: 'none' | 'month' = 'none',
  ): Promise<SeriesRow[]> {
    const params = new URLSearchParams();
    if (vars && vars.length) params.set('vars', vars.join(','));
    if (bucket !== 'none') params.set('bucket', bucket);
    const query = params.toString();
    const path = `/series/${encodeURIComponent(String(key))}${query ? '?' + query : ''}`;
    return this.fetchFn(this.url(path)).then((r) => expectJson<SeriesRow[]>(r));
  }

  summary(agg = 'mean', bucket = 'month', vars?: string[]): Promise<SeriesRow[]> {
    const params = new URLSearchParams({ agg, bucket });
    if (vars && vars.length) params.set('vars', vars.join(','));
    return this.fetchFn(this.url(`/summary?${params}`)).then((r) =>
      expectJson<SeriesRow[]>(r),
    );
  }

  getSelection(group: string): Promise<Selection> {
    return this.fetchFn(this.url(`/selection/${encodeURIComponent(group)}`)).then(
      (r) => expectJson<Selection>(r),
    );
  }

  postSelection(
    group: string,
    keys: Array<string | number>,
    source: SelectionSource,
  ): Promise<Selection> {
    return this.fetchFn(this.url(`/selection/${encodeURIComponent(group)}`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ keys, source }),
    }).then((r) => expectJson<Selection>(r));
  }

  /**
   * Follow a group's selection events until the signal aborts. Events are
   * delivered in arrival order; the caller decides staleness by seq.
   */
  async subscribeSelection(
    group: string,
    onEvent: (sel: Selection) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const resp = await this.fetchFn(
      this.url(`/selection/${encodeURIComponent(group)}/events`),
      { signal },
    );
    if (!resp.ok || !resp.body) {
      throw new ApiError(resp.status, 'event stream unavailable');
    }
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = '';
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        let cut;
        while ((cut = buffer.indexOf('\n\n')) >= 0) {
          const frame = buffer.slice(0, cut);
          buffer = buffer.slice(cut + 2);
          for (const line of frame.split('\n')) {
            if (line.startsWith('data: ')) {
              onEvent(JSON.parse(line.slice(6)) as Selection);
            }
          }
        }
      }
    } catch (err) {
      if (!(signal && signal.aborted)) throw err;
    }
  }
}
