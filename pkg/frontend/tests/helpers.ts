import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import type { GraphDoc, SearchResponse } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixtureBytes(name: string): Uint8Array {
  return new Uint8Array(readFileSync(join(FIXTURES, name)));
}

export function fixtureJson<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export const graphFixture = (): GraphDoc => fixtureJson<GraphDoc>("graph_fragment.json");
export const nodeH33 = (): SearchResponse => fixtureJson<SearchResponse>("node_H33.json");
export const nodeI7 = (): SearchResponse => fixtureJson<SearchResponse>("node_I7.json");
export const queryIr = (): SearchResponse => fixtureJson<SearchResponse>("query_ir.json");

export interface RecordedRequest {
  url: string;
}

/**
 * Route-driven fetch stub: maps URL substrings to canned bodies, recording
 * every request so tests can assert which endpoints were hit.
 */
export function mockFetch(
  routes: Array<[match: string, body: Uint8Array | object, status?: number]>,
  log: RecordedRequest[] = [],
  delays?: Map<string, Promise<void>>,
): FetchLike {
  return async (url: string): Promise<Response> => {
    log.push({ url });
    for (const [match, body, status = 200] of routes) {
      if (url.includes(match)) {
        const gate = delays?.get(match);
        if (gate) {
          await gate;
        }
        const payload =
          body instanceof Uint8Array
            ? (body.buffer.slice(body.byteOffset, body.byteOffset + body.byteLength) as ArrayBuffer)
            : JSON.stringify(body);
        return new Response(payload, {
          status,
          headers: {
            "Content-Type":
              body instanceof Uint8Array
                ? "text/plain; charset=utf-8"
                : "application/json; charset=utf-8",
          },
        });
      }
    }
    return new Response(JSON.stringify({ error: `no route for ${url}` }), { status: 404 });
  };
}
