/** Scenario editor: a form over the plan-request parameters with live
 * inline validation. Submit stays disabled while any field is invalid.
 */

import { el, clear } from "../dom.js";
import type { FieldMessage, PlanParamsMirror, ProbabilityField } from "../params.js";
import { clampProbability, validateParams } from "../params.js";
import type { Scenario } from "../state.js";

export interface EditorCallbacks {
  onLabelChange: (label: string) => void;
  onParamsChange: (params: PlanParamsMirror) => void;
  onRecompute: () => void;
}

interface FieldSpec {
  name: string;
  label: string;
  step: string;
  nullable: boolean;
  placeholder?: string;
}

const NUMBER_FIELDS: FieldSpec[] = [
  { name: "alpha", label: "alpha (hypothesized success rate)", step: "0.01", nullable: false },
  { name: "rho", label: "rho (metric accuracy on successes)", step: "0.01", nullable: false },
  { name: "eta", label: "eta (metric accuracy on failures)", step: "0.01", nullable: false },
  { name: "gamma", label: "gamma (error probability)", step: "0.01", nullable: false },
  { name: "n_phi", label: "n_phi (error-free ratings)", step: "1", nullable: false },
  { name: "n_M", label: "n_M (metric ratings)", step: "1", nullable: false },
  { name: "n_rho_eta", label: "n_rho_eta (gold-labeled set)", step: "1", nullable: true, placeholder: "= n_phi" },
  { name: "psi", label: "psi (gold-positive share)", step: "0.01", nullable: true, placeholder: "= alpha" },
];

const PROBABILITY_FIELD_NAMES = new Set(["alpha", "rho", "eta", "psi"]);

function readNumber(input: HTMLInputElement, nullable: boolean): number | null {
  if (input.value.trim() === "") {
    return nullable ? null : Number.NaN;
  }
  return Number(input.value);
}

export function renderScenarioEditor(
  container: HTMLElement,
  scenario: Scenario,
  callbacks: EditorCallbacks,
): void {
  clear(container);
  container.classList.add("editor");

  const labelInput = el("input", {
    type: "text",
    class: "editor-label",
    "data-field": "label",
    value: scenario.label,
  });
  labelInput.addEventListener("input", () => callbacks.onLabelChange(labelInput.value));
  container.append(el("div", { class: "editor-row" }, [labelInput]));

  const inputs = new Map<string, HTMLInputElement>();
  const messageSlots = new Map<string, HTMLElement>();
  let clampWarnings: FieldMessage[] = [];

  const modeSelect = el("select", { "data-field": "rho_eta_mode" });
  for (const mode of ["estimated", "provided"]) {
    const option = el("option", { value: mode }, [mode]);
    if (mode === scenario.params.rho_eta_mode) option.setAttribute("selected", "");
    modeSelect.append(option);
  }

  const recompute = el("button", { type: "button", class: "recompute", "data-action": "recompute" }, [
    "Recompute",
  ]);

  const readParams = (): PlanParamsMirror => {
    clampWarnings = [];
    const raw: Record<string, number | null> = {};
    for (const spec of NUMBER_FIELDS) {
      const input = inputs.get(spec.name)!;
      let value = readNumber(input, spec.nullable);
      if (value !== null && PROBABILITY_FIELD_NAMES.has(spec.name) && !Number.isNaN(value)) {
        const clamped = clampProbability(spec.name as ProbabilityField, value);
        if (clamped.warning) {
          clampWarnings.push(clamped.warning);
          input.value = String(clamped.value);
        }
        value = clamped.value;
      }
      raw[spec.name] = value;
    }
    return {
      alpha: raw["alpha"] as number,
      rho: raw["rho"] as number,
      eta: raw["eta"] as number,
      gamma: raw["gamma"] as number,
      n_phi: raw["n_phi"] as number,
      n_M: raw["n_M"] as number,
      n_rho_eta: raw["n_rho_eta"],
      psi: raw["psi"],
      rho_eta_mode: modeSelect.value as PlanParamsMirror["rho_eta_mode"],
      grid: scenario.params.grid,
    };
  };

  const showMessages = (messages: FieldMessage[]): void => {
    for (const slot of messageSlots.values()) {
      clear(slot);
      slot.className = "field-msg";
    }
    for (const message of messages) {
      const slot = messageSlots.get(message.field);
      if (!slot) continue;
      slot.classList.add(message.kind === "error" ? "field-msg-error" : "field-msg-warning");
      slot.append(el("span", {}, [message.message]));
    }
  };

  const revalidate = (): void => {
    const params = readParams();
    const result = validateParams(params);
    showMessages([...clampWarnings, ...result.messages]);
    if (result.ok) {
      recompute.removeAttribute("disabled");
    } else {
      recompute.setAttribute("disabled", "");
    }
    callbacks.onParamsChange(params);
  };

  for (const spec of NUMBER_FIELDS) {
    const current = scenario.params[spec.name as keyof PlanParamsMirror] as number | null;
    const input = el("input", {
      type: "number",
      step: spec.step,
      "data-field": spec.name,
      value: current === null ? "" : String(current),
    });
    if (spec.placeholder) input.setAttribute("placeholder", spec.placeholder);
    input.addEventListener("input", revalidate);
    inputs.set(spec.name, input);
    const slot = el("div", { class: "field-msg", "data-msg-for": spec.name });
    messageSlots.set(spec.name, slot);
    container.append(
      el("label", { class: "editor-row" }, [el("span", { class: "field-name" }, [spec.label]), input]),
      slot,
    );
  }

  modeSelect.addEventListener("change", revalidate);
  const modeSlot = el("div", { class: "field-msg", "data-msg-for": "rho_eta_mode" });
  messageSlots.set("rho_eta_mode", modeSlot);
  container.append(
    el("label", { class: "editor-row" }, [
      el("span", { class: "field-name" }, ["rho_eta_mode (rates taken as exact, or estimated from gold labels)"]),
      modeSelect,
    ]),
    modeSlot,
  );

  recompute.addEventListener("click", () => callbacks.onRecompute());
  container.append(el("div", { class: "editor-row" }, [recompute]));

  // Initial pass so pre-filled invalid params disable the button immediately.
  const initial = validateParams(scenario.params);
  showMessages(initial.messages);
  if (!initial.ok) recompute.setAttribute("disabled", "");
}
