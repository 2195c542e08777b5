/** Epsilon view: the scenario's measurable-epsilon point plus what-if
 * curves along the metric and error-free axes. All epsilon numbers are
 * service responses carried through verbatim; this file only draws them.
 */

import type { ApiClient, PlanTableRequest } from "../api.js";
import { ServiceError } from "../api.js";
import { el, svgEl, clear } from "../dom.js";
import { numberSpan } from "../format.js";
import type { PlanParamsMirror } from "../params.js";
import type { CurvePoints, RequestGate, Scenario, ScenarioStore, StoredResult } from "../state.js";

export interface EpsilonAxes {
  m: number[];
  phi: number[];
}

/** Axis samples; at most 10 per axis, the service's table limit. */
export const DEFAULT_AXES: EpsilonAxes = {
  m: [0, 250, 500, 1000, 2000, 5000],
  phi: [0, 100, 250, 527, 1000, 2000],
};

export interface EpsilonDeps {
  api: ApiClient;
  store: ScenarioStore;
  gate: RequestGate;
  axes?: EpsilonAxes;
}

function tableRequest(params: PlanParamsMirror, phiValues: number[], mValues: number[]): PlanTableRequest {
  return {
    alpha: params.alpha,
    rho: params.rho,
    eta: params.eta,
    gamma: params.gamma,
    n_rho_eta: params.n_rho_eta,
    psi: params.psi,
    rho_eta_mode: params.rho_eta_mode,
    grid: params.grid,
    phi_values: phiValues,
    m_values: mValues,
  };
}

/** Recompute one scenario. Stale responses (an older sequence number for
 * this scenario id) are dropped without touching the store.
 */
export async function refreshEpsilon(deps: EpsilonDeps, id: string): Promise<void> {
  const { api, store, gate } = deps;
  const axes = deps.axes ?? DEFAULT_AXES;
  const scenario = store.list().find((s) => s.id === id);
  if (!scenario) return;
  const params: PlanParamsMirror = { ...scenario.params, grid: scenario.params.grid ? { ...scenario.params.grid } : null };
  const sequence = gate.begin(id);
  try {
    const [point, tableM, tablePhi] = await Promise.all([
      api.plan(params),
      api.planTable(tableRequest(params, [params.n_phi], axes.m)),
      api.planTable(tableRequest(params, axes.phi, [params.n_M])),
    ]);
    if (!gate.isCurrent(id, sequence) || !store.list().some((s) => s.id === id)) return;
    const result: StoredResult = {
      epsilon: point.epsilon,
      curveM: { axis: tableM.m_values, epsilon: tableM.epsilon[0] },
      curvePhi: { axis: tablePhi.phi_values, epsilon: tablePhi.epsilon.map((row) => row[0]) },
      disclaimer: point.disclaimer,
      params,
    };
    store.setResult(id, result);
  } catch (err) {
    if (!gate.isCurrent(id, sequence) || !store.list().some((s) => s.id === id)) return;
    const message = err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err);
    store.setError(id, message);
  }
}

const CHART_W = 340;
const CHART_H = 130;
const PAD = 28;

function scale(value: number, lo: number, hi: number, outLo: number, outHi: number): number {
  if (hi === lo) return (outLo + outHi) / 2;
  return outLo + ((value - lo) / (hi - lo)) * (outHi - outLo);
}

function curveChart(title: string, curve: CurvePoints, markerX: number): HTMLElement {
  const xs = [...curve.axis, markerX];
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  let yLo = Math.min(...curve.epsilon);
  let yHi = Math.max(...curve.epsilon);
  if (yHi === yLo) {
    const pad = Math.max(1e-6, Math.abs(yHi) * 0.05);
    yLo -= pad;
    yHi += pad;
  }
  const px = (x: number) => scale(x, xLo, xHi, PAD, CHART_W - 6);
  const py = (y: number) => scale(y, yLo, yHi, CHART_H - 18, 8);

  const points = curve.axis.map((x, i) => `${px(x).toFixed(1)},${py(curve.epsilon[i]).toFixed(1)}`);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${CHART_W} ${CHART_H}`,
    class: "curve-chart",
    role: "img",
    "aria-label": title,
  });
  svg.append(
    svgEl("line", {
      x1: String(PAD), y1: String(CHART_H - 18), x2: String(CHART_W - 6), y2: String(CHART_H - 18),
      class: "axis-line",
    }),
    svgEl("polyline", { points: points.join(" "), class: "curve-line", fill: "none" }),
  );
  // The scenario's own position: the vertical-line idiom.
  const marker = svgEl("line", {
    x1: px(markerX).toFixed(1), y1: "4",
    x2: px(markerX).toFixed(1), y2: String(CHART_H - 18),
    class: "marker-line",
    "data-role": "current-point",
  });
  svg.append(marker);
  curve.axis.forEach((x, i) => {
    const dot = svgEl("circle", {
      cx: px(x).toFixed(1), cy: py(curve.epsilon[i]).toFixed(1), r: "2.5", class: "curve-dot",
    });
    dot.append(svgEl("title", {}, [document.createTextNode(String(curve.epsilon[i]))]));
    svg.append(dot);
  });
  const xTicks = el("div", { class: "chart-xticks" });
  for (const x of curve.axis) {
    xTicks.append(el("span", { class: "xtick" }, [String(x)]));
  }
  const yLabels = el("div", { class: "chart-ylabels" }, []);
  const yMax = numberSpan(Math.max(...curve.epsilon), "ylabel");
  const yMin = numberSpan(Math.min(...curve.epsilon), "ylabel");
  yLabels.append(yMax, yMin);

  return el("figure", { class: "chart" }, [
    el("figcaption", {}, [title]),
    el("div", { class: "chart-body" }, [yLabels, svg]),
    xTicks,
  ]);
}

export interface EpsilonViewCallbacks {
  onRetry: () => void;
}

export function renderEpsilonView(
  container: HTMLElement,
  scenario: Scenario,
  callbacks: EpsilonViewCallbacks,
): void {
  clear(container);
  container.classList.add("epsilon-view");

  const badgeText = scenario.status === "clean" ? "current" : scenario.status;
  container.append(
    el("div", { class: "view-head" }, [
      el("span", { class: "view-title" }, ["measurable epsilon"]),
      el("span", { class: `badge badge-${scenario.status}`, "data-role": "status-badge" }, [badgeText]),
    ]),
  );

  if (scenario.status === "error" && scenario.errorMessage !== null) {
    const retry = el("button", { type: "button", "data-action": "retry" }, ["Retry"]);
    retry.addEventListener("click", () => callbacks.onRetry());
    container.append(
      el("div", { class: "banner", role: "alert", "data-role": "error-banner" }, [
        el("span", {}, [`service error: ${scenario.errorMessage}`]),
        retry,
      ]),
    );
  }

  const result = scenario.lastResult;
  if (result === null) {
    container.append(el("p", { class: "placeholder" }, ["no result yet"]));
    return;
  }

  if (scenario.status !== "clean") {
    container.append(
      el("p", { class: "cached-note", "data-role": "cached-note" }, [
        "showing the last computed result",
      ]),
    );
  }

  const epsilon = numberSpan(result.epsilon, "epsilon-value");
  container.append(
    el("p", { class: "epsilon-line" }, [
      el("span", {}, [`epsilon at gamma = ${result.params.gamma}: `]),
      epsilon,
    ]),
  );

  if (result.curveM) {
    container.append(curveChart("epsilon vs n_M (metric ratings)", result.curveM, result.params.n_M));
  }
  if (result.curvePhi) {
    container.append(curveChart("epsilon vs n_phi (error-free ratings)", result.curvePhi, result.params.n_phi));
  }
  container.append(el("p", { class: "disclaimer" }, [result.disclaimer]));
}
