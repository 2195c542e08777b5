/** Page wiring: scenario board plus compare panel. State lives only in
 * this page; scenarios move between sessions as exported JSON.
 */

import { ApiClient } from "./api.js";
import type { FetchLike } from "./api.js";
import { el, clear } from "./dom.js";
import type { PlanParamsMirror } from "./params.js";
import { exportScenarioParams, importScenarioParams, validateParams } from "./params.js";
import { DEBOUNCE_MS, RequestGate, ScenarioStore, debounce } from "./state.js";
import type { Debounced } from "./state.js";
import { renderScenarioEditor } from "./views/editor.js";
import { DEFAULT_AXES, refreshEpsilon, renderEpsilonView } from "./views/epsilon.js";
import type { EpsilonAxes } from "./views/epsilon.js";
import {
  defaultCompareState,
  fetchComparison,
  renderCompareView,
  validateCompareState,
} from "./views/compare.js";
import type { CompareState } from "./views/compare.js";

export interface AppOptions {
  apiBase?: string;
  fetchImpl?: FetchLike;
  maxPinned?: number;
  debounceMs?: number;
  axes?: EpsilonAxes;
}

export interface AppHandle {
  api: ApiClient;
  store: ScenarioStore;
  gate: RequestGate;
  compareState: CompareState;
  refreshScenario: (id: string) => Promise<void>;
  refreshCompare: () => Promise<void>;
}

export const DEFAULT_API_BASE = "http://127.0.0.1:8000";

export function apiBaseFromLocation(search: string): string | null {
  return new URLSearchParams(search).get("api");
}

export function initApp(root: HTMLElement, options: AppOptions = {}): AppHandle {
  const apiBase =
    options.apiBase ??
    (typeof window !== "undefined" ? apiBaseFromLocation(window.location.search) : null) ??
    DEFAULT_API_BASE;
  const api = new ApiClient(apiBase, options.fetchImpl);
  const store = new ScenarioStore(options.maxPinned);
  const gate = new RequestGate();
  const axes = options.axes ?? DEFAULT_AXES;
  const waitMs = options.debounceMs ?? DEBOUNCE_MS;
  const compareState = defaultCompareState();

  const refreshScenario = (id: string) => refreshEpsilon({ api, store, gate, axes }, id);
  const refreshCompare = () =>
    fetchComparison(api, gate, compareState, (update) => {
      Object.assign(compareState, update);
      renderComparePanel();
    });

  const scenarioDebouncers = new Map<string, Debounced<[]>>();
  const debouncedRefresh = (id: string): void => {
    let bouncer = scenarioDebouncers.get(id);
    if (!bouncer) {
      bouncer = debounce(() => {
        if (!store.list().some((s) => s.id === id)) return;
        if (!validateParams(store.get(id).params).ok) return;
        void refreshScenario(id);
      }, waitMs);
      scenarioDebouncers.set(id, bouncer);
    }
    bouncer.call();
  };

  const compareDebouncer = debounce(() => {
    if (validateCompareState(compareState).length > 0) {
      renderComparePanel();
      return;
    }
    void refreshCompare();
  }, waitMs);

  clear(root);
  root.classList.add("app");
  const header = el("header", { class: "app-head" }, [
    el("h1", {}, ["rating campaign planner"]),
    el("span", { class: "api-base" }, [`service: ${apiBase}`]),
  ]);
  const board = el("section", { class: "board", "data-role": "board" });
  const boardControls = el("div", { class: "board-controls" });
  const comparePanel = el("section", { class: "compare-panel", "data-role": "compare-panel" });
  root.append(header, boardControls, board, comparePanel);

  const addButton = el("button", { type: "button", "data-action": "add-scenario" }, ["Add scenario"]);
  addButton.addEventListener("click", () => {
    const scenario = store.add();
    renderBoard();
    debouncedRefresh(scenario.id);
  });

  const importText = el("textarea", {
    class: "import-text",
    placeholder: "paste exported scenario JSON",
    "data-field": "import-json",
  });
  const importMsg = el("span", { class: "field-msg", "data-msg-for": "import-json" });
  const importButton = el("button", { type: "button", "data-action": "import-scenario" }, [
    "Import scenario",
  ]);
  importButton.addEventListener("click", () => {
    clear(importMsg);
    let params: PlanParamsMirror;
    try {
      params = importScenarioParams(importText.value);
    } catch (err) {
      importMsg.classList.add("field-msg-error");
      importMsg.append(String(err instanceof Error ? err.message : err));
      return;
    }
    const scenario = store.add("imported", params);
    importText.value = "";
    renderBoard();
    debouncedRefresh(scenario.id);
  });
  boardControls.append(addButton, importText, importButton, importMsg);

  const syncControls = (): void => {
    if (store.isFull()) {
      addButton.setAttribute("disabled", "");
      importButton.setAttribute("disabled", "");
      addButton.title = `at most ${store.maxPinned} scenarios can be pinned side by side`;
    } else {
      addButton.removeAttribute("disabled");
      importButton.removeAttribute("disabled");
      addButton.removeAttribute("title");
    }
  };

  const epsilonContainers = new Map<string, HTMLElement>();

  const renderCard = (id: string): HTMLElement => {
    const scenario = store.get(id);
    const card = el("article", { class: "scenario-card", "data-scenario": id });
    const actions = el("div", { class: "card-actions" });

    const exportButton = el("button", { type: "button", "data-action": "export" }, ["Export JSON"]);
    const exportBox = el("textarea", { class: "export-text", "data-role": "export-json", readonly: "" });
    exportBox.style.display = "none";
    exportButton.addEventListener("click", () => {
      exportBox.value = exportScenarioParams(store.get(id).params);
      exportBox.style.display = "";
    });

    const duplicateButton = el("button", { type: "button", "data-action": "duplicate" }, ["Duplicate"]);
    duplicateButton.addEventListener("click", () => {
      if (store.isFull()) return;
      const source = store.get(id);
      const copy = store.add(`${source.label} (copy)`, source.params);
      renderBoard();
      debouncedRefresh(copy.id);
    });

    const removeButton = el("button", { type: "button", "data-action": "remove" }, ["Remove"]);
    removeButton.addEventListener("click", () => {
      store.remove(id);
      scenarioDebouncers.get(id)?.cancel();
      scenarioDebouncers.delete(id);
      renderBoard();
    });

    actions.append(duplicateButton, exportButton, removeButton);

    const editorBox = el("div", { class: "editor-box" });
    renderScenarioEditor(editorBox, scenario, {
      onLabelChange: (label) => store.setLabel(id, label),
      onParamsChange: (params) => {
        store.updateParams(id, params);
        debouncedRefresh(id);
      },
      onRecompute: () => {
        if (validateParams(store.get(id).params).ok) void refreshScenario(id);
      },
    });

    const epsilonBox = el("div", { class: "epsilon-box" });
    epsilonContainers.set(id, epsilonBox);
    renderEpsilonView(epsilonBox, scenario, { onRetry: () => void refreshScenario(id) });

    card.append(actions, editorBox, epsilonBox, exportBox);
    return card;
  };

  function renderBoard(): void {
    clear(board);
    epsilonContainers.clear();
    for (const scenario of store.list()) {
      board.append(renderCard(scenario.id));
    }
    syncControls();
  }

  function renderComparePanel(): void {
    renderCompareView(comparePanel, compareState, {
      onSideEdit: (side, field, value) => {
        if (field === "label") {
          compareState[side].label = value;
        } else {
          compareState[side][field] = value.trim() === "" ? Number.NaN : Number(value);
        }
        compareState.status = "stale";
        compareDebouncer.call();
      },
      onGammaEdit: (value) => {
        compareState.gamma = value.trim() === "" ? Number.NaN : Number(value);
        compareState.status = "stale";
        compareDebouncer.call();
      },
      onSwap: () => {
        const a = compareState.a;
        compareState.a = compareState.b;
        compareState.b = a;
        compareState.status = "stale";
        renderComparePanel();
        if (validateCompareState(compareState).length === 0) void refreshCompare();
      },
      onRecompute: () => {
        if (validateCompareState(compareState).length === 0) void refreshCompare();
      },
    });
  }

  let knownIds = "";
  store.onChange(() => {
    const ids = store.list().map((s) => s.id).join(",");
    if (ids !== knownIds) {
      knownIds = ids;
      renderBoard();
      return;
    }
    // Parameter or result updates: redraw the result panes, leave the
    // editor alone so typing does not lose focus.
    for (const scenario of store.list()) {
      const box = epsilonContainers.get(scenario.id);
      if (box) {
        renderEpsilonView(box, scenario, { onRetry: () => void refreshScenario(scenario.id) });
      }
    }
  });

  const first = store.add();
  knownIds = first.id;
  renderBoard();
  renderComparePanel();
  debouncedRefresh(first.id);

  return { api, store, gate, compareState, refreshScenario, refreshCompare };
}
