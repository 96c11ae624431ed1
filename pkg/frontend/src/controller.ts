import type { ApiClient, ExportDownload } from "./api.js";
import { navToSearch, type NavState } from "./state.js";
import { expandableIds } from "./tree.js";
import type {
  ExportFormat,
  FacetCounts,
  GraphDoc,
  Lang,
  NodeMatchView,
  ResultItem,
  SearchResponse,
} from "./types.js";

export interface AppState {
  graph: GraphDoc | null;
  lang: Lang;
  nav: NavState;
  expanded: Set<string>;
  selected: string | null;
  matches: NodeMatchView[];
  nearMatches: NodeMatchView[];
  results: ResultItem[];
  facets: FacetCounts | null;
  /** taxonomy nodes to highlight for the current query */
  highlights: Set<string>;
  /** show all k matched branches, or only the best one */
  highlightAll: boolean;
  /** record ids ticked for export */
  selection: Set<string>;
  validationMessage: string | null;
  errorMessage: string | null;
  loading: boolean;
}

export interface AppHooks {
  /** called after every state change so the view layer can re-render */
  render?: (state: AppState) => void;
  /** push a URL without a page load (history.pushState in the browser) */
  navigate?: (search: string) => void;
}

/**
 * Orchestrates the berrypicking loop: query or node positioning, hops along
 * cross-references, facet display, and export of the current selection. At
 * most one request is live per panel; stale responses are discarded by
 * sequence number.
 */
export class App {
  state: AppState = {
    graph: null,
    lang: "en",
    nav: { view: "home", lang: "en" },
    expanded: new Set(),
    selected: null,
    matches: [],
    nearMatches: [],
    results: [],
    facets: null,
    highlights: new Set(),
    highlightAll: true,
    selection: new Set(),
    validationMessage: null,
    errorMessage: null,
    loading: false,
  };

  private seq = 0;

  constructor(private api: ApiClient, private hooks: AppHooks = {}) {}

  async load(): Promise<void> {
    this.state.graph = await this.api.graph();
    this.state.expanded = expandableIds(this.state.graph);
    this.emit();
  }

  setLang(lang: Lang): void {
    this.state.lang = lang;
    this.state.nav = { ...this.state.nav, lang };
    this.emit();
  }

  setHighlightAll(all: boolean): void {
    this.state.highlightAll = all;
    this.applyHighlights(this.state.matches);
    this.emit();
  }

  toggleExpanded(id: string): void {
    if (this.state.expanded.has(id)) {
      this.state.expanded.delete(id);
    } else {
      this.state.expanded.add(id);
    }
    this.emit();
  }

  toggleSelection(recordId: string): void {
    if (this.state.selection.has(recordId)) {
      this.state.selection.delete(recordId);
    } else {
      this.state.selection.add(recordId);
    }
    this.emit();
  }

  /** Run a free-text query; whitespace-only input never reaches the API. */
  async runQuery(text: string): Promise<void> {
    if (text.trim() === "") {
      this.state.validationMessage = "Type a query first.";
      this.emit();
      return;
    }
    this.state.validationMessage = null;
    const nav: NavState = { view: "query", q: text, lang: this.state.lang };
    await this.request(nav, () => this.api.query(text, this.state.lang));
  }

  /** Position on a taxonomy node (also the cross-reference hop target). */
  async selectNode(id: string): Promise<void> {
    const nav: NavState = { view: "node", node: id, lang: this.state.lang };
    await this.request(nav, () => this.api.node(id, this.state.lang));
  }

  /** A cross-reference hop is just node positioning on the target. */
  async crossrefHop(targetId: string): Promise<void> {
    await this.selectNode(targetId);
  }

  /** Re-apply state from a URL (initial load or history traversal). */
  async applyNav(nav: NavState): Promise<void> {
    this.state.lang = nav.lang;
    if (nav.view === "query" && nav.q) {
      await this.request(nav, () => this.api.query(nav.q as string, nav.lang), false);
    } else if (nav.view === "node" && nav.node) {
      await this.request(nav, () => this.api.node(nav.node as string, nav.lang), false);
    } else {
      this.state.nav = nav;
      this.emit();
    }
  }

  async exportSelection(format: ExportFormat): Promise<ExportDownload | null> {
    if (this.state.selection.size === 0) {
      return null;
    }
    const ids = this.state.results
      .map((item) => item.record.id)
      .filter((id) => this.state.selection.has(id));
    return this.api.exportRecords(ids, format);
  }

  get exportEnabled(): boolean {
    return this.state.selection.size > 0;
  }

  private async request(
    nav: NavState,
    call: () => Promise<SearchResponse>,
    pushUrl: boolean = true,
  ): Promise<void> {
    const token = ++this.seq;
    this.state.loading = true;
    this.state.errorMessage = null;
    this.emit();
    let response: SearchResponse;
    try {
      response = await call();
    } catch (error) {
      if (token !== this.seq) {
        return; // superseded while failing: the newer action owns the panel
      }
      this.state.loading = false;
      this.state.errorMessage = error instanceof Error ? error.message : String(error);
      this.emit();
      return;
    }
    if (token !== this.seq) {
      return; // a newer action superseded this response
    }
    this.state.loading = false;
    this.state.nav = nav;
    this.state.matches = response.matches;
    this.state.nearMatches = response.near_matches ?? [];
    this.state.results = response.results;
    this.state.facets = response.facets;
    this.state.selection = new Set();
    if (nav.view === "node" && nav.node) {
      this.state.selected = nav.node;
      this.expandPath(nav.node);
      this.applyHighlights([]);
    } else {
      this.state.selected = null;
      this.applyHighlights(response.matches);
    }
    if (pushUrl && this.hooks.navigate) {
      this.hooks.navigate(navToSearch(nav));
    }
    this.emit();
  }

  private applyHighlights(matches: NodeMatchView[]): void {
    const branch = matches.filter((m) => m.kind === "match");
    const shown = this.state.highlightAll ? branch : branch.slice(0, 1);
    this.state.highlights = new Set(shown.map((m) => m.node));
  }

  private expandPath(nodeId: string): void {
    const match = this.state.matches.find((m) => m.node === nodeId);
    for (const ancestor of match?.path ?? []) {
      this.state.expanded.add(ancestor);
    }
  }

  private emit(): void {
    this.hooks.render?.(this.state);
  }
}
