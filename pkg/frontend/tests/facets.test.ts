import { describe, expect, it } from "vitest";

import { facetsEqual, recomputeFacets } from "../src/facets.js";
import { nodeI7, queryIr } from "./helpers.js";

describe("client-side facet recomputation", () => {
  it("matches the server facets for the query fixture", () => {
    const payload = queryIr();
    expect(facetsEqual(recomputeFacets(payload.results), payload.facets)).toBe(true);
  });

  it("matches the server facets for the node fixture", () => {
    const payload = nodeI7();
    expect(facetsEqual(recomputeFacets(payload.results), payload.facets)).toBe(true);
  });

  it("buckets missing values under unknown", () => {
    const counts = recomputeFacets([
      {
        record: { id: "x", entry_type: "misc", title: "t", authors: [] },
        score: 1,
        link: "https://e",
        link_kind: "scholar",
        coins: "",
      },
    ]);
    expect(counts.by_year).toEqual({ unknown: 1 });
    expect(counts.by_venue).toEqual({ unknown: 1 });
    expect(counts.by_type).toEqual({ misc: 1 });
  });

  it("detects mismatches", () => {
    const payload = queryIr();
    const skewed = { ...payload.facets, by_type: { book: 99 } };
    expect(facetsEqual(recomputeFacets(payload.results), skewed)).toBe(false);
  });
});
