import { ApiClient } from "./api.js";
import { App } from "./controller.js";
import {
  renderFacets,
  renderMatches,
  renderResults,
  renderTree,
  triggerDownload,
  type ViewHandlers,
} from "./dom.js";
import { navFromSearch } from "./state.js";
import type { ExportFormat, Lang } from "./types.js";

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing #${id}`);
  }
  return element as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const app = new App(api, {
    render: () => paint(),
    navigate: (search) => history.pushState(null, "", search),
  });

  const handlers: ViewHandlers = {
    onSelectNode: (id) => void app.selectNode(id),
    onCrossrefHop: (id) => void app.crossrefHop(id),
    onToggleExpanded: (id) => app.toggleExpanded(id),
    onToggleSelection: (recordId) => app.toggleSelection(recordId),
  };

  const paint = (): void => {
    const state = app.state;
    byId("tree-panel").replaceChildren(renderTree(state, handlers));
    byId("matches-panel").replaceChildren(
      renderMatches(state.matches, state.nearMatches, handlers),
    );
    byId("results-panel").replaceChildren(renderResults(state, handlers));
    byId("facets-panel").replaceChildren(renderFacets(state));
    byId<HTMLButtonElement>("export-bibtex").disabled = !app.exportEnabled;
    byId<HTMLButtonElement>("export-ris").disabled = !app.exportEnabled;
    byId("notice").textContent =
      state.validationMessage ?? state.errorMessage ?? (state.loading ? "Loading…" : "");
    const retry = byId<HTMLButtonElement>("retry");
    retry.hidden = state.errorMessage === null;
  };

  byId<HTMLFormElement>("query-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void app.runQuery(byId<HTMLInputElement>("query-input").value);
  });

  byId<HTMLSelectElement>("lang-select").addEventListener("change", (event) => {
    app.setLang((event.target as HTMLSelectElement).value as Lang);
  });

  byId<HTMLInputElement>("highlight-all").addEventListener("change", (event) => {
    app.setHighlightAll((event.target as HTMLInputElement).checked);
  });

  const exportHandler = (format: ExportFormat) => async () => {
    const download = await app.exportSelection(format);
    if (download) {
      triggerDownload(download.bytes, download.filename);
    }
  };
  byId("export-bibtex").addEventListener("click", () => void exportHandler("bibtex")());
  byId("export-ris").addEventListener("click", () => void exportHandler("ris")());

  byId<HTMLButtonElement>("retry").addEventListener("click", () => {
    void app.applyNav(app.state.nav);
  });

  window.addEventListener("popstate", () => {
    void app.applyNav(navFromSearch(window.location.search));
  });

  await app.load();
  const nav = navFromSearch(window.location.search);
  if (nav.view !== "home") {
    await app.applyNav(nav);
  }
}

void boot();
