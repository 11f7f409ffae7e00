import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T = unknown>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, name), "utf-8")) as T;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export type Route = (call: RecordedCall) => { status?: number; body: unknown } | undefined;

/**
 * A fetch stand-in that serves recorded API fixtures. Routes are tried in
 * order; the first one returning a response wins. Every call is recorded so
 * tests can assert on request counts and payloads.
 */
export function fixtureFetch(routes: Route[]): { fetch: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const call: RecordedCall = {
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    };
    calls.push(call);
    for (const route of routes) {
      const result = route(call);
      if (result !== undefined) {
        return new Response(JSON.stringify(result.body), {
          status: result.status ?? 200,
          headers: { "content-type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ detail: `no fixture for ${call.method} ${url}` }), {
      status: 404,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetch: fetchImpl, calls };
}

/** Route helper: serve a fixture file for a GET path prefix. */
export function get(pathPrefix: string, fixtureName: string): Route {
  return (call) =>
    call.method === "GET" && call.url.startsWith(pathPrefix)
      ? { body: fixture(fixtureName) }
      : undefined;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
