import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { fixed3 } from "../src/format.js";
import { apiBaseFromLocation, initApp } from "../src/app.js";
import type { AppHandle } from "../src/app.js";
import { PARAM_KEYS, importScenarioParams } from "../src/params.js";
import {
  epsilonRoutes,
  fixtureFetch,
  flushAsync,
  loadFixture,
  resultOf,
} from "./helpers.js";
import type { RecordedCall, Route } from "./helpers.js";

const POINT = loadFixture("plan_point");
const CURVE_M = loadFixture("plan_curve_m");
const CURVE_PHI = loadFixture("plan_curve_phi");
const BL_KV = loadFixture("compare_stb_bl_kv");
const KV_BL = loadFixture("compare_stb_kv_bl");

const POINT_EPSILON = resultOf<{ epsilon: number }>(POINT).epsilon;

interface CompareBodyShape {
  a: { n_plus: number };
}

function compareRoutes(): Route[] {
  return [
    {
      match: (path, body) =>
        path === "/v1/compare" && (body as CompareBodyShape).a.n_plus === 228,
      respond: () => BL_KV,
    },
    {
      match: (path, body) =>
        path === "/v1/compare" && (body as CompareBodyShape).a.n_plus === 144,
      respond: () => KV_BL,
    },
  ];
}

interface Booted {
  root: HTMLElement;
  app: AppHandle;
  calls: RecordedCall[];
}

function boot(options: { maxPinned?: number } = {}): Booted {
  const { fetchImpl, calls } = fixtureFetch([
    ...epsilonRoutes(POINT, CURVE_M, CURVE_PHI),
    ...compareRoutes(),
  ]);
  const root = document.createElement("div");
  document.body.append(root);
  const app = initApp(root, { apiBase: "http://svc.test", fetchImpl, ...options });
  return { root, app, calls };
}

async function settle(calls: RecordedCall[]): Promise<void> {
  await vi.advanceTimersByTimeAsync(300);
  await flushAsync();
  calls.length = 0;
}

function boardInput(root: HTMLElement, field: string): HTMLInputElement {
  return root.querySelector(`[data-role="board"] [data-field="${field}"]`) as HTMLInputElement;
}

function compareInput(root: HTMLElement, field: string): HTMLInputElement {
  return root.querySelector(
    `[data-role="compare-panel"] [data-field="${field}"]`,
  ) as HTMLInputElement;
}

function setInput(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input"));
}

beforeEach(() => {
  vi.useFakeTimers();
  document.body.innerHTML = "";
});

afterEach(() => {
  vi.useRealTimers();
});

describe("initApp", () => {
  it("boots with one scenario, prefilled gamma, and no fetch before the debounce window", async () => {
    const { root, calls } = boot();
    expect(root.querySelectorAll(".scenario-card")).toHaveLength(1);
    expect(boardInput(root, "gamma").value).toBe("0.05");
    expect(root.querySelector('[data-role="compare-panel"]')!.textContent).toContain(
      "no comparison yet",
    );
    expect(calls).toHaveLength(0);

    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    expect(calls.map((c) => c.path).sort()).toEqual([
      "/v1/plan",
      "/v1/plan/table",
      "/v1/plan/table",
    ]);
    const shown = root.querySelector(".epsilon-value") as HTMLElement;
    expect(shown.textContent).toBe(fixed3(POINT_EPSILON));
    const badge = root.querySelector('[data-role="status-badge"]') as HTMLElement;
    expect(badge.textContent).toBe("current");
  });

  it("collapses rapid edits into one re-query and keeps the editor focused", async () => {
    const { root, calls } = boot();
    await settle(calls);

    const nM = boardInput(root, "n_M");
    setInput(nM, "4000");
    setInput(nM, "900");
    setInput(nM, "1000");
    expect(calls).toHaveLength(0);
    // Edits mark the scenario stale immediately, with the cached result shown.
    const badge = root.querySelector('[data-role="status-badge"]') as HTMLElement;
    expect(badge.textContent).toBe("stale");
    expect(root.querySelector('[data-role="cached-note"]')).not.toBeNull();
    expect((root.querySelector(".epsilon-value") as HTMLElement).textContent).toBe(
      fixed3(POINT_EPSILON),
    );
    // The editor was not rebuilt while typing.
    expect(nM.isConnected).toBe(true);

    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    expect(calls.filter((c) => c.path === "/v1/plan")).toHaveLength(1);
    expect(calls).toHaveLength(3);
    const planBody = calls.find((c) => c.path === "/v1/plan")!.body as { n_M: number };
    expect(planBody.n_M).toBe(1000);
    expect((root.querySelector('[data-role="status-badge"]') as HTMLElement).textContent).toBe(
      "current",
    );
  });

  it("never queries the service while the editor is invalid", async () => {
    const { root, calls } = boot();
    await settle(calls);

    setInput(boardInput(root, "gamma"), "");
    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    expect(calls).toHaveLength(0);
    const card = root.querySelector(".scenario-card") as HTMLElement;
    const recompute = card.querySelector('[data-action="recompute"]') as HTMLButtonElement;
    expect(recompute.disabled).toBe(true);

    setInput(boardInput(root, "gamma"), "0.1");
    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    expect(calls).toHaveLength(3);
    expect((calls.find((c) => c.path === "/v1/plan")!.body as { gamma: number }).gamma).toBe(0.1);
  });

  it("caps the board at the configured number of pinned scenarios", async () => {
    const { root, calls } = boot({ maxPinned: 2 });
    await settle(calls);
    const add = root.querySelector('[data-action="add-scenario"]') as HTMLButtonElement;
    const importButton = root.querySelector('[data-action="import-scenario"]') as HTMLButtonElement;
    expect(add.disabled).toBe(false);

    add.click();
    expect(root.querySelectorAll(".scenario-card")).toHaveLength(2);
    expect(add.disabled).toBe(true);
    expect(importButton.disabled).toBe(true);
    expect(add.title).toContain("at most 2 scenarios");

    const removeButtons = root.querySelectorAll('[data-action="remove"]');
    (removeButtons[1] as HTMLButtonElement).click();
    expect(root.querySelectorAll(".scenario-card")).toHaveLength(1);
    expect(add.disabled).toBe(false);
  });

  it("cancels the pending re-query when a scenario is removed", async () => {
    const { root, calls } = boot();
    await settle(calls);

    setInput(boardInput(root, "n_M"), "777");
    (root.querySelector('[data-action="remove"]') as HTMLButtonElement).click();
    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    expect(calls).toHaveLength(0);
    expect(root.querySelectorAll(".scenario-card")).toHaveLength(0);
  });

  it("exports scenario parameters as importable JSON", async () => {
    const { root, app, calls } = boot();
    await settle(calls);

    (root.querySelector('[data-action="export"]') as HTMLButtonElement).click();
    const exported = (root.querySelector('[data-role="export-json"]') as HTMLTextAreaElement).value;
    const parsed = JSON.parse(exported) as Record<string, unknown>;
    expect(Object.keys(parsed)).toEqual([...PARAM_KEYS]);
    expect(parsed).toEqual({ ...app.store.list()[0].params });
    // The export round-trips through the strict importer.
    expect(importScenarioParams(exported)).toEqual(app.store.list()[0].params);
  });

  it("imports exported JSON as a new scenario and re-queries for it", async () => {
    const { root, app, calls } = boot();
    await settle(calls);
    (root.querySelector('[data-action="export"]') as HTMLButtonElement).click();
    const exported = (root.querySelector('[data-role="export-json"]') as HTMLTextAreaElement).value;

    const importText = root.querySelector('[data-field="import-json"]') as HTMLTextAreaElement;
    importText.value = exported.replace('"n_M": 1000', '"n_M": 2000');
    (root.querySelector('[data-action="import-scenario"]') as HTMLButtonElement).click();

    expect(root.querySelectorAll(".scenario-card")).toHaveLength(2);
    const imported = app.store.list()[1];
    expect(imported.label).toBe("imported");
    expect(imported.params.n_M).toBe(2000);

    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    expect((calls.find((c) => c.path === "/v1/plan")!.body as { n_M: number }).n_M).toBe(2000);
  });

  it("rejects malformed scenario JSON with a visible message", async () => {
    const { root, calls } = boot();
    await settle(calls);
    const importText = root.querySelector('[data-field="import-json"]') as HTMLTextAreaElement;
    importText.value = "not json";
    (root.querySelector('[data-action="import-scenario"]') as HTMLButtonElement).click();
    expect(root.querySelectorAll(".scenario-card")).toHaveLength(1);
    const message = root.querySelector('[data-msg-for="import-json"]') as HTMLElement;
    expect(message.textContent).toContain("scenario import");
  });

  it("runs the comparison from the panel and re-queries on swap", async () => {
    const { root, calls } = boot();
    await settle(calls);

    setInput(compareInput(root, "a.label"), "BL");
    setInput(compareInput(root, "a.n_plus"), "228");
    setInput(compareInput(root, "a.n_phi"), "600");
    setInput(compareInput(root, "b.label"), "KV");
    setInput(compareInput(root, "b.n_plus"), "144");
    setInput(compareInput(root, "b.n_phi"), "600");
    expect(calls.filter((c) => c.path === "/v1/compare")).toHaveLength(0);

    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    const compareCalls = calls.filter((c) => c.path === "/v1/compare");
    expect(compareCalls).toHaveLength(1);
    expect((compareCalls[0].body as { system_ids: string[] }).system_ids).toEqual(["BL", "KV"]);

    const panel = root.querySelector('[data-role="compare-panel"]') as HTMLElement;
    expect((panel.querySelector(".prob-greater") as HTMLElement).textContent).toBe("1.000");
    expect((panel.querySelector('[data-role="verdict"]') as HTMLElement).textContent).toBe(
      "significant at gamma = 0.05",
    );

    (panel.querySelector('[data-action="swap"]') as HTMLButtonElement).click();
    await flushAsync();
    const afterSwap = calls.filter((c) => c.path === "/v1/compare");
    expect(afterSwap).toHaveLength(2);
    expect((afterSwap[1].body as { system_ids: string[] }).system_ids).toEqual(["KV", "BL"]);
    const prob = panel.querySelector(".prob-greater") as HTMLElement;
    // The reflected probability is the service's own number, not 1 - P computed here.
    expect(prob.textContent).toBe("0.000");
    expect(prob.title).toBe(String(7.472513393749151e-8));
    expect((panel.querySelector('[data-role="verdict"]') as HTMLElement).textContent).toBe(
      "significant at gamma = 0.05",
    );
  });

  it("skips the comparison query while the panel is invalid", async () => {
    const { root, calls } = boot();
    await settle(calls);
    setInput(compareInput(root, "gamma"), "1.5");
    await vi.advanceTimersByTimeAsync(300);
    await flushAsync();
    expect(calls.filter((c) => c.path === "/v1/compare")).toHaveLength(0);
    const panel = root.querySelector('[data-role="compare-panel"]') as HTMLElement;
    expect(panel.querySelector('[data-msg-for="gamma"]')).not.toBeNull();
  });
});

describe("apiBaseFromLocation", () => {
  it("reads the service base from the query string", () => {
    expect(apiBaseFromLocation("?api=http://127.0.0.1:38240")).toBe("http://127.0.0.1:38240");
    expect(apiBaseFromLocation("")).toBeNull();
  });
});
