import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { fixtureBytes, graphFixture, mockFetch, queryIr, type RecordedRequest } from "./helpers.js";

describe("ApiClient", () => {
  it("fetches and parses the graph document", async () => {
    const log: RecordedRequest[] = [];
    const api = new ApiClient("", mockFetch([["/api/graph", graphFixture()]], log));
    const graph = await api.graph();
    expect(graph.root).toBe("H");
    expect(graph.nodes).toHaveLength(4);
    expect(log[0].url).toBe("/api/graph");
  });

  it("encodes query parameters", async () => {
    const log: RecordedRequest[] = [];
    const api = new ApiClient("", mockFetch([["/api/query", queryIr()]], log));
    await api.query("recherche d'information", "fr", 5);
    expect(log[0].url).toBe("/api/query?q=recherche+d%27information&lang=fr&limit=5");
  });

  it("encodes node ids in the path", async () => {
    const log: RecordedRequest[] = [];
    const api = new ApiClient("", mockFetch([["/api/node/", queryIr()]], log));
    await api.node("H.3.3", "en");
    expect(log[0].url).toBe("/api/node/H.3.3?lang=en");
  });

  it("returns export bytes verbatim with a filename hint", async () => {
    const bib = fixtureBytes("export_muller.bib");
    const api = new ApiClient("", mockFetch([["/api/export", bib]]));
    const download = await api.exportRecords(["journals/ir/Muller05"], "bibtex");
    expect(download.filename).toBe("export.bib");
    expect(download.bytes).toEqual(bib);
  });

  it("joins multiple export ids with commas", async () => {
    const log: RecordedRequest[] = [];
    const api = new ApiClient("", mockFetch([["/api/export", fixtureBytes("export_muller.ris")]], log));
    await api.exportRecords(["a/1", "b/2"], "ris");
    expect(log[0].url).toBe("/api/export?ids=a%2F1%2Cb%2F2&format=ris");
  });

  it("surfaces API errors with status and message", async () => {
    const api = new ApiClient(
      "",
      mockFetch([["/api/query", { error: "query parameter q must be non-empty" }, 400]]),
    );
    await expect(api.query("", "en")).rejects.toMatchObject({
      status: 400,
      message: "query parameter q must be non-empty",
    });
    await expect(api.query("", "en")).rejects.toBeInstanceOf(ApiError);
  });
});
