import type { Lang } from "./types.js";

/**
 * Navigation state lives in the URL so exploration paths are shareable and
 * the back button retraces hops: ?q=... for queries, ?node=... for node
 * positioning, plus the language toggle.
 */
export interface NavState {
  view: "home" | "query" | "node";
  q?: string;
  node?: string;
  lang: Lang;
}

export function navToSearch(nav: NavState): string {
  const params = new URLSearchParams();
  if (nav.view === "query" && nav.q !== undefined) {
    params.set("q", nav.q);
  } else if (nav.view === "node" && nav.node !== undefined) {
    params.set("node", nav.node);
  }
  params.set("lang", nav.lang);
  return "?" + params.toString();
}

export function navFromSearch(search: string): NavState {
  const params = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  const langParam = params.get("lang");
  const lang: Lang = langParam === "fr" ? "fr" : "en";
  const node = params.get("node");
  if (node) {
    return { view: "node", node, lang };
  }
  const q = params.get("q");
  if (q) {
    return { view: "query", q, lang };
  }
  return { view: "home", lang };
}
