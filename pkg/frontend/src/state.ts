/** Client-side scenario state: nothing here persists beyond the page. */

import type { PlanParamsMirror } from "./params.js";
import { defaultParams } from "./params.js";

export type ScenarioStatus = "clean" | "stale" | "error";

export interface CurvePoints {
  axis: number[];
  epsilon: number[];
}

/** Last successful service responses for one scenario, kept verbatim. */
export interface StoredResult {
  epsilon: number;
  curveM: CurvePoints | null;
  curvePhi: CurvePoints | null;
  disclaimer: string;
  /** The parameters the service answered for, to label cached results. */
  params: PlanParamsMirror;
}

export interface Scenario {
  id: string;
  label: string;
  params: PlanParamsMirror;
  lastResult: StoredResult | null;
  status: ScenarioStatus;
  errorMessage: string | null;
}

export const MAX_PINNED_DEFAULT = 4;

export class ScenarioStore {
  readonly maxPinned: number;
  private scenarios: Scenario[] = [];
  private nextId = 1;
  private listeners: Array<() => void> = [];

  constructor(maxPinned: number = MAX_PINNED_DEFAULT) {
    if (!Number.isInteger(maxPinned) || maxPinned < 1) {
      throw new Error(`maxPinned must be a positive integer, got ${maxPinned}`);
    }
    this.maxPinned = maxPinned;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  list(): readonly Scenario[] {
    return this.scenarios;
  }

  get(id: string): Scenario {
    const scenario = this.scenarios.find((s) => s.id === id);
    if (!scenario) {
      throw new Error(`no scenario with id ${JSON.stringify(id)}`);
    }
    return scenario;
  }

  isFull(): boolean {
    return this.scenarios.length >= this.maxPinned;
  }

  add(label?: string, params?: PlanParamsMirror): Scenario {
    if (this.isFull()) {
      throw new Error(`at most ${this.maxPinned} scenarios can be pinned side by side`);
    }
    const id = `s${this.nextId++}`;
    const scenario: Scenario = {
      id,
      label: label ?? `scenario ${id.slice(1)}`,
      params: params ? { ...params, grid: params.grid ? { ...params.grid } : null } : defaultParams(),
      lastResult: null,
      status: "stale",
      errorMessage: null,
    };
    this.scenarios.push(scenario);
    this.emit();
    return scenario;
  }

  remove(id: string): void {
    const index = this.scenarios.findIndex((s) => s.id === id);
    if (index < 0) {
      throw new Error(`no scenario with id ${JSON.stringify(id)}`);
    }
    this.scenarios.splice(index, 1);
    this.emit();
  }

  setLabel(id: string, label: string): void {
    this.get(id).label = label;
    this.emit();
  }

  /** Any parameter edit leaves the old numbers on screen but marked stale. */
  updateParams(id: string, params: PlanParamsMirror): void {
    const scenario = this.get(id);
    scenario.params = { ...params, grid: params.grid ? { ...params.grid } : null };
    scenario.status = "stale";
    this.emit();
  }

  setResult(id: string, result: StoredResult): void {
    const scenario = this.get(id);
    scenario.lastResult = result;
    scenario.status = "clean";
    scenario.errorMessage = null;
    this.emit();
  }

  /** Service failure: keep the cached result so the view can still show it. */
  setError(id: string, message: string): void {
    const scenario = this.get(id);
    scenario.status = "error";
    scenario.errorMessage = message;
    this.emit();
  }
}

/** Discards stale responses: only the latest request per key may land.
 *
 * Concurrent requests are keyed by scenario id; each begin() bumps the
 * sequence number and responses carrying an older number are dropped.
 */
export class RequestGate {
  private sequences = new Map<string, number>();

  begin(key: string): number {
    const next = (this.sequences.get(key) ?? 0) + 1;
    this.sequences.set(key, next);
    return next;
  }

  isCurrent(key: string, sequence: number): boolean {
    return this.sequences.get(key) === sequence;
  }
}

export interface Debounced<A extends unknown[]> {
  call: (...args: A) => void;
  cancel: () => void;
}

export const DEBOUNCE_MS = 300;

/** Trailing-edge debounce so typing does not flood the service. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number = DEBOUNCE_MS,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return {
    call: (...args: A) => {
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(() => {
        timer = null;
        fn(...args);
      }, waitMs);
    },
    cancel: () => {
      if (timer !== null) clearTimeout(timer);
      timer = null;
    },
  };
}
