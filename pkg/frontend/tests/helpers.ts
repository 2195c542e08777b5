/** Test support: recorded service fixtures and a fixture-backed fetch. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

export interface Recorded {
  status: number;
  body: unknown;
}

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadFixture(name: string): Recorded {
  const text = readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf8");
  return JSON.parse(text) as Recorded;
}

export function resultOf<T>(recorded: Recorded): T {
  return (recorded.body as { result: T }).result;
}

export interface Route {
  match: (path: string, body: unknown) => boolean;
  respond: (path: string, body: unknown) => Recorded | Promise<Recorded>;
}

export interface RecordedCall {
  path: string;
  body: unknown;
}

export interface FixtureFetch {
  fetchImpl: FetchLike;
  calls: RecordedCall[];
}

function asResponse(recorded: Recorded): Response {
  return {
    status: recorded.status,
    json: async () => recorded.body,
  } as unknown as Response;
}

/** A fetch stub that answers from recorded fixtures and logs every call. */
export function fixtureFetch(routes: Route[]): FixtureFetch {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const path = new URL(url).pathname;
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    calls.push({ path, body });
    for (const route of routes) {
      if (route.match(path, body)) {
        return asResponse(await route.respond(path, body));
      }
    }
    throw new Error(`no fixture route for ${path} with body ${JSON.stringify(body)}`);
  };
  return { fetchImpl, calls };
}

/** One-route fetch: every call to `path` answers with `recorded`. */
export function fixtureFetchOf(path: string, recorded: Recorded): FixtureFetch {
  return fixtureFetch([{ match: (p) => p === path, respond: () => recorded }]);
}

interface TableBodyShape {
  phi_values?: unknown[];
  m_values?: unknown[];
}

/** Routes matching the epsilon view's three requests for one scenario. */
export function epsilonRoutes(
  point: Recorded,
  curveM: Recorded,
  curvePhi: Recorded,
): Route[] {
  return [
    { match: (path) => path === "/v1/plan", respond: () => point },
    {
      match: (path, body) =>
        path === "/v1/plan/table" && ((body as TableBodyShape).phi_values?.length ?? 0) === 1,
      respond: () => curveM,
    },
    {
      match: (path, body) =>
        path === "/v1/plan/table" && ((body as TableBodyShape).m_values?.length ?? 0) === 1,
      respond: () => curvePhi,
    },
  ];
}

/** All numbers in a fixture tree, for display-audit assertions. */
export function numbersIn(value: unknown, into: Set<number> = new Set()): Set<number> {
  if (typeof value === "number") {
    into.add(value);
  } else if (Array.isArray(value)) {
    for (const item of value) numbersIn(item, into);
  } else if (typeof value === "object" && value !== null) {
    for (const item of Object.values(value)) numbersIn(item, into);
  }
  return into;
}

export async function flushAsync(times = 6): Promise<void> {
  for (let i = 0; i < times; i++) {
    await Promise.resolve();
  }
}
