/**
 * View state shared by the panels: the mirrored service selection plus
 * display choices. Selection events apply in seq order; stale events
 * (seq at or below the last seen) are dropped.
 */

import type { Selection } from './api.js';

export type Bucket = 'raw' | 'month';

export interface ViewState {
  selectedKeys: ReadonlySet<string>;
  seq: number;
  source: string | null;
  variables: string[];
  bucket: Bucket;
  colourVariable: string | null;
}

export type StateListener = (state: ViewState) => void;

export function canonicalKey(key: string | number): string {
  return String(key);
}

export class StateStore {
  private state: ViewState;
  private listeners: StateListener[] = [];

  constructor(variables: string[] = [], bucket: Bucket = 'raw',
              colourVariable: string | null = null) {
    this.state = {
      selectedKeys: new Set(),
      seq: 0,
      source: null,
      variables,
      bucket,
      colourVariable,
    };
  }

  current(): ViewState {
    return this.state;
  }

  subscribe(listener: StateListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  /** Apply a selection event; returns false when dropped as stale. */
  applySelection(sel: Selection): boolean {
    if (sel.seq <= this.state.seq && !(sel.seq === 0 && this.state.seq === 0)) {
      return false;
    }
    this.state = {
      ...this.state,
      selectedKeys: new Set(sel.keys.map(canonicalKey)),
      seq: sel.seq,
      source: sel.source,
    };
    this.emit();
    return true;
  }

  setDisplay(changes: Partial<Pick<ViewState, 'variables' | 'bucket' | 'colourVariable'>>): void {
    this.state = { ...this.state, ...changes };
    this.emit();
  }
}
