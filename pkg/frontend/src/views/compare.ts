/** Compare view: two rated systems side by side, verdict straight from
 * the service. Swapping the sides re-queries rather than reflecting the
 * probability locally, so the displayed P is always a service number.
 */

import type { ApiClient, CompareRequest, CompareResultBody } from "../api.js";
import { ServiceError } from "../api.js";
import { el, clear } from "../dom.js";
import { numberSpan } from "../format.js";
import type { RequestGate } from "../state.js";

export interface CompareSideState {
  label: string;
  n_plus: number;
  n_phi: number;
}

export type CompareStatus = "clean" | "stale" | "error";

export interface CompareState {
  a: CompareSideState;
  b: CompareSideState;
  gamma: number;
  result: CompareResultBody | null;
  status: CompareStatus;
  errorMessage: string | null;
}

export function defaultCompareState(): CompareState {
  return {
    a: { label: "A", n_plus: 0, n_phi: 0 },
    b: { label: "B", n_plus: 0, n_phi: 0 },
    gamma: 0.05,
    result: null,
    status: "stale",
    errorMessage: null,
  };
}

export interface CompareMessage {
  field: string;
  message: string;
}

export function validateCompareState(state: CompareState): CompareMessage[] {
  const messages: CompareMessage[] = [];
  for (const side of ["a", "b"] as const) {
    const { n_plus, n_phi } = state[side];
    for (const [name, value] of [["n_plus", n_plus], ["n_phi", n_phi]] as const) {
      if (!Number.isInteger(value) || value < 0) {
        messages.push({ field: `${side}.${name}`, message: `${name} must be a non-negative integer` });
      }
    }
    if (Number.isInteger(n_plus) && Number.isInteger(n_phi) && n_plus > n_phi) {
      messages.push({ field: `${side}.n_plus`, message: "successes cannot exceed the number of ratings" });
    }
  }
  if (!Number.isFinite(state.gamma) || state.gamma <= 0 || state.gamma >= 1) {
    messages.push({ field: "gamma", message: "gamma must lie strictly inside (0, 1)" });
  }
  return messages;
}

export function compareRequest(state: CompareState): CompareRequest {
  return {
    a: { mode: "free", n_plus: state.a.n_plus, n_phi: state.a.n_phi },
    b: { mode: "free", n_plus: state.b.n_plus, n_phi: state.b.n_phi },
    gamma: state.gamma,
    system_ids: [state.a.label, state.b.label],
  };
}

export const COMPARE_GATE_KEY = "compare";

/** Run the comparison; stale responses by sequence number are dropped. */
export async function fetchComparison(
  api: ApiClient,
  gate: RequestGate,
  state: CompareState,
  apply: (update: Partial<CompareState>) => void,
): Promise<void> {
  const sequence = gate.begin(COMPARE_GATE_KEY);
  try {
    const result = await api.compare(compareRequest(state));
    if (!gate.isCurrent(COMPARE_GATE_KEY, sequence)) return;
    apply({ result, status: "clean", errorMessage: null });
  } catch (err) {
    if (!gate.isCurrent(COMPARE_GATE_KEY, sequence)) return;
    const message = err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err);
    apply({ status: "error", errorMessage: message });
  }
}

export interface CompareCallbacks {
  onSideEdit: (side: "a" | "b", field: "label" | "n_plus" | "n_phi", value: string) => void;
  onGammaEdit: (value: string) => void;
  onSwap: () => void;
  onRecompute: () => void;
}

function sideColumn(
  side: "a" | "b",
  state: CompareSideState,
  callbacks: CompareCallbacks,
): HTMLElement {
  const column = el("div", { class: "compare-side", "data-side": side });
  const labelInput = el("input", { type: "text", value: state.label, "data-field": `${side}.label` });
  labelInput.addEventListener("input", () => callbacks.onSideEdit(side, "label", labelInput.value));
  column.append(el("label", { class: "editor-row" }, [el("span", { class: "field-name" }, ["system"]), labelInput]));
  for (const field of ["n_plus", "n_phi"] as const) {
    const input = el("input", {
      type: "number",
      step: "1",
      value: String(state[field]),
      "data-field": `${side}.${field}`,
    });
    input.addEventListener("input", () => callbacks.onSideEdit(side, field, input.value));
    const caption = field === "n_plus" ? "successes (error-free)" : "ratings (error-free)";
    column.append(el("label", { class: "editor-row" }, [el("span", { class: "field-name" }, [caption]), input]));
  }
  return column;
}

export function renderCompareView(
  container: HTMLElement,
  state: CompareState,
  callbacks: CompareCallbacks,
): void {
  clear(container);
  container.classList.add("compare-view");

  const messages = validateCompareState(state);

  container.append(
    el("div", { class: "compare-sides" }, [
      sideColumn("a", state.a, callbacks),
      sideColumn("b", state.b, callbacks),
    ]),
  );

  const gammaInput = el("input", {
    type: "number",
    step: "0.01",
    value: String(state.gamma),
    "data-field": "gamma",
  });
  gammaInput.addEventListener("input", () => callbacks.onGammaEdit(gammaInput.value));

  const swap = el("button", { type: "button", "data-action": "swap" }, ["Swap sides"]);
  swap.addEventListener("click", () => callbacks.onSwap());
  const recompute = el("button", { type: "button", "data-action": "recompute" }, ["Compare"]);
  recompute.addEventListener("click", () => callbacks.onRecompute());
  if (messages.length > 0) recompute.setAttribute("disabled", "");

  container.append(
    el("div", { class: "compare-controls" }, [
      el("label", { class: "editor-row" }, [el("span", { class: "field-name" }, ["gamma"]), gammaInput]),
      swap,
      recompute,
    ]),
  );

  for (const message of messages) {
    container.append(
      el("div", { class: "field-msg field-msg-error", "data-msg-for": message.field }, [message.message]),
    );
  }

  if (state.status === "error" && state.errorMessage !== null) {
    container.append(
      el("div", { class: "banner", role: "alert", "data-role": "error-banner" }, [
        `service error: ${state.errorMessage}`,
      ]),
    );
  }

  const result = state.result;
  if (result === null) {
    container.append(el("p", { class: "placeholder" }, ["no comparison yet"]));
    return;
  }

  if (state.status === "stale") {
    container.append(
      el("p", { class: "cached-note", "data-role": "cached-note" }, [
        "inputs changed; showing the last computed comparison",
      ]),
    );
  }

  const [idA, idB] = result.system_ids ?? ["system 1", "system 2"];
  const verdictText = result.significant
    ? `significant at gamma = ${result.gamma}`
    : `not significant at gamma = ${result.gamma}`;
  container.append(
    el("div", { class: "compare-result" }, [
      el("div", { class: "result-row" }, [
        el("span", { class: "result-label" }, [`success rate ${idA}: `]),
        numberSpan(result.mode_1, "mode-1"),
        el("span", { class: "result-label" }, [` ${idB}: `]),
        numberSpan(result.mode_2, "mode-2"),
      ]),
      el("div", { class: "result-row" }, [
        el("span", { class: "result-label" }, ["difference of rates: "]),
        numberSpan(result.epsilon_hat, "epsilon-hat"),
      ]),
      el("div", { class: "result-row" }, [
        el("span", { class: "result-label" }, [`P(${idA} better than ${idB}): `]),
        numberSpan(result.prob_greater, "prob-greater"),
      ]),
      el("div", { class: "result-row" }, [
        el(
          "span",
          {
            class: `badge verdict ${result.significant ? "badge-significant" : "badge-not-significant"}`,
            "data-role": "verdict",
          },
          [verdictText],
        ),
      ]),
    ]),
  );
}
