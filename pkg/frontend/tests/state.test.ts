import { describe, expect, it } from "vitest";

import { navFromSearch, navToSearch, type NavState } from "../src/state.js";

describe("URL-addressable navigation state", () => {
  const cases: NavState[] = [
    { view: "home", lang: "en" },
    { view: "query", q: "information retrieval", lang: "en" },
    { view: "query", q: "recherche d'information", lang: "fr" },
    { view: "query", q: "spaces & ampersands = fun", lang: "en" },
    { view: "node", node: "H.3.3", lang: "en" },
    { view: "node", node: "I.7", lang: "fr" },
  ];

  for (const nav of cases) {
    it(`round-trips ${JSON.stringify(nav)}`, () => {
      expect(navFromSearch(navToSearch(nav))).toEqual(nav);
    });
  }

  it("parses a hand-written URL", () => {
    expect(navFromSearch("?node=H.3.3&lang=fr")).toEqual({
      view: "node",
      node: "H.3.3",
      lang: "fr",
    });
  });

  it("defaults to english and home", () => {
    expect(navFromSearch("")).toEqual({ view: "home", lang: "en" });
    expect(navFromSearch("?lang=de")).toEqual({ view: "home", lang: "en" });
  });

  it("node beats query when both are present", () => {
    expect(navFromSearch("?q=x&node=H.3&lang=en").view).toBe("node");
  });
});
