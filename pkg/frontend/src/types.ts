/** Payload shapes mirroring the read-only search API. */

export type Lang = "fr" | "en";

export interface GraphNode {
  id: string;
  labels: Record<string, string>;
  aliases?: Record<string, string[]>;
}

export interface GraphEdge {
  source: string;
  target: string;
  kind: "hierarchy" | "crossref";
}

export interface GraphDoc {
  root: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface RecordFields {
  id: string;
  entry_type: string;
  title: string;
  authors: string[];
  year?: number;
  venue?: string;
  pages?: string;
  volume?: string;
  number?: string;
  url?: string;
}

export interface ResultItem {
  record: RecordFields;
  score: number;
  link: string;
  link_kind: "direct" | "scholar";
  coins: string;
}

export interface NodeMatchView {
  node: string;
  score: number;
  kind: "match" | "crossref" | "near";
  label: string;
  labels: Record<string, string>;
  path: string[];
}

export interface FacetCounts {
  by_year: Record<string, number>;
  by_venue: Record<string, number>;
  by_type: Record<string, number>;
}

export interface SearchResponse {
  query_echo: string;
  lang: string;
  matches: NodeMatchView[];
  results: ResultItem[];
  facets: FacetCounts;
  near_matches?: NodeMatchView[];
}

export type ExportFormat = "bibtex" | "ris";

/** Display label with fallback to the other language. */
export function nodeLabel(labels: Record<string, string>, lang: Lang): string {
  const preferred = labels[lang];
  if (preferred !== undefined) {
    return preferred;
  }
  const any = Object.values(labels);
  return any.length > 0 ? any[0] : "";
}
