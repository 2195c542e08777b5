import { beforeEach, describe, expect, it, vi } from "vitest";

import { defaultParams } from "../src/params.js";
import type { Scenario } from "../src/state.js";
import { renderScenarioEditor } from "../src/views/editor.js";
import type { EditorCallbacks } from "../src/views/editor.js";

function scenarioWith(params = defaultParams()): Scenario {
  return {
    id: "s1",
    label: "first",
    params,
    lastResult: null,
    status: "stale",
    errorMessage: null,
  };
}

interface Rendered {
  container: HTMLElement;
  callbacks: { [K in keyof EditorCallbacks]: ReturnType<typeof vi.fn> };
}

function renderEditor(scenario = scenarioWith()): Rendered {
  const container = document.createElement("div");
  document.body.append(container);
  const callbacks = {
    onLabelChange: vi.fn(),
    onParamsChange: vi.fn(),
    onRecompute: vi.fn(),
  };
  renderScenarioEditor(container, scenario, callbacks);
  return { container, callbacks };
}

function input(container: HTMLElement, field: string): HTMLInputElement {
  const node = container.querySelector(`input[data-field="${field}"]`);
  if (!node) throw new Error(`no input for ${field}`);
  return node as HTMLInputElement;
}

function setField(container: HTMLElement, field: string, value: string): void {
  const node = input(container, field);
  node.value = value;
  node.dispatchEvent(new Event("input"));
}

function setMode(container: HTMLElement, mode: string): void {
  const select = container.querySelector('select[data-field="rho_eta_mode"]') as HTMLSelectElement;
  select.value = mode;
  select.dispatchEvent(new Event("change"));
}

function messageFor(container: HTMLElement, field: string): string {
  return (container.querySelector(`[data-msg-for="${field}"]`) as HTMLElement).textContent ?? "";
}

function recomputeButton(container: HTMLElement): HTMLButtonElement {
  return container.querySelector('[data-action="recompute"]') as HTMLButtonElement;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("scenario editor", () => {
  it("prefills gamma at 0.05 and starts submittable", () => {
    const { container } = renderEditor();
    expect(input(container, "gamma").value).toBe("0.05");
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(false);
  });

  it("shows the undefined-estimator message on the provided-mode diagonal", () => {
    const { container, callbacks } = renderEditor();
    setMode(container, "provided");
    setField(container, "rho", "0.5");
    setField(container, "eta", "0.5");
    expect(messageFor(container, "rho")).toContain("estimator undefined");
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(true);
    const last = callbacks.onParamsChange.mock.lastCall?.[0];
    expect(last.rho_eta_mode).toBe("provided");
    expect(last.rho).toBe(0.5);
  });

  it("blocks provided-mode accuracy below 0.5 with the flip hint", () => {
    const { container } = renderEditor();
    setMode(container, "provided");
    setField(container, "rho", "0.3");
    expect(messageFor(container, "rho")).toContain("(1 - rho, 1 - eta)");
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(true);
    setMode(container, "estimated");
    expect(messageFor(container, "rho")).toBe("");
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(false);
  });

  it("clamps out-of-range probabilities with a visible warning", () => {
    const { container, callbacks } = renderEditor();
    setField(container, "alpha", "1.5");
    expect(input(container, "alpha").value).toBe("1");
    expect(messageFor(container, "alpha")).toContain("clamped from 1.5 to 1");
    const last = callbacks.onParamsChange.mock.lastCall?.[0];
    expect(last.alpha).toBe(1);
    // A clamp is a warning, not an error: the form stays submittable.
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(false);
  });

  it("treats blank nullable fields as service defaults", () => {
    const { container, callbacks } = renderEditor();
    setField(container, "n_rho_eta", "");
    const last = callbacks.onParamsChange.mock.lastCall?.[0];
    expect(last.n_rho_eta).toBeNull();
    expect(last.psi).toBeNull();
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(false);
  });

  it("disables submit while any field is invalid and recovers", () => {
    const { container } = renderEditor();
    setField(container, "gamma", "");
    expect(messageFor(container, "gamma")).toContain("gamma");
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(true);
    setField(container, "gamma", "0.05");
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(false);
  });

  it("flags fractional counts inline", () => {
    const { container } = renderEditor();
    setField(container, "n_M", "10.5");
    expect(messageFor(container, "n_M")).toContain("non-negative integer");
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(true);
  });

  it("starts disabled when the stored params are already invalid", () => {
    const bad = scenarioWith({ ...defaultParams(), gamma: 1.5 });
    const { container } = renderEditor(bad);
    expect(recomputeButton(container).hasAttribute("disabled")).toBe(true);
    expect(messageFor(container, "gamma")).toContain("gamma");
  });

  it("routes recompute clicks and label edits", () => {
    const { container, callbacks } = renderEditor();
    recomputeButton(container).click();
    expect(callbacks.onRecompute).toHaveBeenCalledTimes(1);
    const label = container.querySelector('input[data-field="label"]') as HTMLInputElement;
    label.value = "renamed";
    label.dispatchEvent(new Event("input"));
    expect(callbacks.onLabelChange).toHaveBeenCalledWith("renamed");
  });
});
