/** Campaign parameters mirrored from the planning service.
 *
 * The shape matches the /v1/plan request body field for field, so an
 * exported scenario can be posted back to the service unchanged.
 */

export interface GridSpec {
  n_alpha: number;
  n_rho: number;
  n_eta: number;
}

export type RhoEtaMode = "provided" | "estimated";

export interface PlanParamsMirror {
  alpha: number;
  rho: number;
  eta: number;
  gamma: number;
  n_phi: number;
  n_M: number;
  /** Gold-labeled set size; null means the service default (n_phi). */
  n_rho_eta: number | null;
  /** Gold-positive proportion; null means the service default (alpha). */
  psi: number | null;
  rho_eta_mode: RhoEtaMode;
  grid: GridSpec | null;
}

export interface FieldMessage {
  field: string;
  kind: "error" | "warning";
  message: string;
}

export interface ValidationResult {
  ok: boolean;
  messages: FieldMessage[];
}

/** Field order of the scenario export schema. */
export const PARAM_KEYS = [
  "alpha",
  "rho",
  "eta",
  "gamma",
  "n_phi",
  "n_M",
  "n_rho_eta",
  "psi",
  "rho_eta_mode",
  "grid",
] as const;

const GRID_KEYS = ["n_alpha", "n_rho", "n_eta"] as const;

const PROBABILITY_FIELDS = ["alpha", "rho", "eta", "psi"] as const;

export type ProbabilityField = (typeof PROBABILITY_FIELDS)[number];

export function defaultParams(): PlanParamsMirror {
  return {
    alpha: 0.65,
    rho: 0.6,
    eta: 0.6,
    gamma: 0.05,
    n_phi: 527,
    n_M: 1000,
    n_rho_eta: null,
    psi: null,
    rho_eta_mode: "estimated",
    grid: null,
  };
}

/** Clamp a probability-valued input to [0, 1], reporting when it changed.
 *
 * Out-of-range entries are pulled back with a visible warning rather than
 * silently rewritten.
 */
export function clampProbability(
  field: ProbabilityField,
  value: number,
): { value: number; warning: FieldMessage | null } {
  if (Number.isNaN(value)) {
    return {
      value,
      warning: { field, kind: "error", message: `${field} must be a number` },
    };
  }
  const clamped = Math.min(1, Math.max(0, value));
  if (clamped !== value) {
    return {
      value: clamped,
      warning: {
        field,
        kind: "warning",
        message: `${field} clamped from ${value} to ${clamped}; probabilities live in [0, 1]`,
      },
    };
  }
  return { value, warning: null };
}

function countMessage(field: string, value: number): FieldMessage | null {
  if (!Number.isFinite(value) || !Number.isInteger(value) || value < 0) {
    return {
      field,
      kind: "error",
      message: `${field} must be a non-negative integer`,
    };
  }
  return null;
}

/** Validate a full parameter set, returning inline messages per field. */
export function validateParams(p: PlanParamsMirror): ValidationResult {
  const messages: FieldMessage[] = [];
  for (const field of ["alpha", "rho", "eta"] as const) {
    const value = p[field];
    if (!Number.isFinite(value) || value < 0 || value > 1) {
      messages.push({
        field,
        kind: "error",
        message: `${field} must lie in [0, 1]`,
      });
    }
  }
  if (p.psi !== null && (!Number.isFinite(p.psi) || p.psi < 0 || p.psi > 1)) {
    messages.push({ field: "psi", kind: "error", message: "psi must lie in [0, 1]" });
  }
  if (!Number.isFinite(p.gamma) || p.gamma <= 0 || p.gamma >= 1) {
    messages.push({
      field: "gamma",
      kind: "error",
      message: "gamma must lie strictly inside (0, 1)",
    });
  }
  const phiMsg = countMessage("n_phi", p.n_phi);
  if (phiMsg) messages.push(phiMsg);
  const mMsg = countMessage("n_M", p.n_M);
  if (mMsg) messages.push(mMsg);
  if (p.n_rho_eta !== null) {
    const msg = countMessage("n_rho_eta", p.n_rho_eta);
    if (msg) messages.push(msg);
  }
  if (p.rho_eta_mode !== "provided" && p.rho_eta_mode !== "estimated") {
    messages.push({
      field: "rho_eta_mode",
      kind: "error",
      message: 'rho_eta_mode must be "provided" or "estimated"',
    });
  }
  if (p.grid !== null) {
    for (const key of GRID_KEYS) {
      const value = p.grid[key];
      if (!Number.isInteger(value) || value < 2) {
        messages.push({
          field: `grid.${key}`,
          kind: "error",
          message: `grid.${key} must be an integer of at least 2`,
        });
      }
    }
  }

  // Rates taken as exact: the degenerate diagonal and inverted metrics are
  // blocked here so the what-if loop cannot be driven into them.
  if (p.rho_eta_mode === "provided" && Number.isFinite(p.rho) && Number.isFinite(p.eta)) {
    if (p.rho + p.eta === 1) {
      messages.push({
        field: "rho",
        kind: "error",
        message:
          "estimator undefined: at rho + eta = 1 the metric's positive rate does not depend on alpha",
      });
    } else {
      for (const field of ["rho", "eta"] as const) {
        if (p[field] >= 0 && p[field] < 0.5) {
          messages.push({
            field,
            kind: "error",
            message:
              `${field} below 0.5 means the metric disagrees with the gold labels more often than not; ` +
              "invert its outputs and plan with (1 - rho, 1 - eta) instead",
          });
        }
      }
    }
  }

  return { ok: messages.every((m) => m.kind !== "error"), messages };
}

/** Serialize scenario parameters; the JSON schema is the plan request mirror. */
export function exportScenarioParams(p: PlanParamsMirror): string {
  const ordered: Record<string, unknown> = {};
  for (const key of PARAM_KEYS) {
    ordered[key] = p[key];
  }
  return JSON.stringify(ordered, null, 2);
}

function fail(message: string): never {
  throw new Error(`scenario import: ${message}`);
}

/** Parse exported scenario JSON, rejecting unknown fields and bad types. */
export function importScenarioParams(text: string): PlanParamsMirror {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    fail("not valid JSON");
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    fail("expected a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  for (const key of Object.keys(obj)) {
    if (!(PARAM_KEYS as readonly string[]).includes(key)) {
      fail(`unknown field ${JSON.stringify(key)}`);
    }
  }
  for (const key of PARAM_KEYS) {
    if (!(key in obj)) {
      fail(`missing field ${JSON.stringify(key)}`);
    }
  }
  const num = (key: string): number => {
    const value = obj[key];
    if (typeof value !== "number" || !Number.isFinite(value)) {
      fail(`${key} must be a finite number`);
    }
    return value;
  };
  const numOrNull = (key: string): number | null => {
    const value = obj[key];
    if (value === null) return null;
    if (typeof value !== "number" || !Number.isFinite(value)) {
      fail(`${key} must be a finite number or null`);
    }
    return value;
  };
  const mode = obj["rho_eta_mode"];
  if (mode !== "provided" && mode !== "estimated") {
    fail('rho_eta_mode must be "provided" or "estimated"');
  }
  let grid: GridSpec | null = null;
  const rawGrid = obj["grid"];
  if (rawGrid !== null) {
    if (typeof rawGrid !== "object" || Array.isArray(rawGrid)) {
      fail("grid must be an object or null");
    }
    const gridObj = rawGrid as Record<string, unknown>;
    for (const key of Object.keys(gridObj)) {
      if (!(GRID_KEYS as readonly string[]).includes(key)) {
        fail(`unknown grid field ${JSON.stringify(key)}`);
      }
    }
    const part = (key: string): number => {
      const value = gridObj[key];
      if (typeof value !== "number" || !Number.isInteger(value)) {
        fail(`grid.${key} must be an integer`);
      }
      return value;
    };
    grid = { n_alpha: part("n_alpha"), n_rho: part("n_rho"), n_eta: part("n_eta") };
  }
  const params: PlanParamsMirror = {
    alpha: num("alpha"),
    rho: num("rho"),
    eta: num("eta"),
    gamma: num("gamma"),
    n_phi: num("n_phi"),
    n_M: num("n_M"),
    n_rho_eta: numOrNull("n_rho_eta"),
    psi: numOrNull("psi"),
    rho_eta_mode: mode,
    grid,
  };
  const check = validateParams(params);
  const firstError = check.messages.find((m) => m.kind === "error");
  if (firstError) {
    fail(`${firstError.field}: ${firstError.message}`);
  }
  return params;
}
