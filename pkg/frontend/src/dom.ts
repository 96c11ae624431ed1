import type { AppState } from "./controller.js";
import { recomputeFacets } from "./facets.js";
import { buildTree, type TreeNodeModel } from "./tree.js";
import type { FacetCounts, NodeMatchView, ResultItem } from "./types.js";

export interface ViewHandlers {
  onSelectNode: (id: string) => void;
  onCrossrefHop: (id: string) => void;
  onToggleExpanded: (id: string) => void;
  onToggleSelection: (recordId: string) => void;
}

/** Build the taxonomy tree DOM; children render only when expanded. */
export function renderTree(state: AppState, handlers: ViewHandlers): HTMLElement {
  const container = document.createElement("div");
  container.className = "tree";
  if (!state.graph) {
    container.textContent = "Loading the classification…";
    return container;
  }
  const model = buildTree(state.graph, {
    lang: state.lang,
    expanded: state.expanded,
    selected: state.selected,
    highlights: state.highlights,
  });
  container.appendChild(renderTreeNode(model, handlers));
  return container;
}

function renderTreeNode(model: TreeNodeModel, handlers: ViewHandlers): HTMLElement {
  const item = document.createElement("li");
  item.dataset.nodeId = model.id;
  item.className = "tree-node";
  if (model.selected) {
    item.classList.add("selected");
  }
  if (model.highlighted) {
    item.classList.add("highlighted");
  }

  if (model.children.length > 0) {
    const toggle = document.createElement("button");
    toggle.className = "toggle";
    toggle.textContent = model.expanded ? "−" : "+";
    toggle.addEventListener("click", () => handlers.onToggleExpanded(model.id));
    item.appendChild(toggle);
  }

  const label = document.createElement("button");
  label.className = "node-label";
  label.textContent = `${model.id} ${model.label}`;
  label.addEventListener("click", () => handlers.onSelectNode(model.id));
  item.appendChild(label);

  for (const target of model.crossrefs) {
    const hop = document.createElement("a");
    hop.className = "crossref-hop";
    hop.href = `?node=${encodeURIComponent(target)}`;
    hop.textContent = `→ ${target}`;
    hop.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onCrossrefHop(target);
    });
    item.appendChild(hop);
  }

  if (model.expanded && model.children.length > 0) {
    const list = document.createElement("ul");
    for (const child of model.children) {
      list.appendChild(renderTreeNode(child, handlers));
    }
    item.appendChild(list);
  }

  const root = document.createElement("ul");
  root.appendChild(item);
  return root;
}

export function renderMatches(
  matches: NodeMatchView[],
  near: NodeMatchView[],
  handlers: ViewHandlers,
): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "matches";
  const source = matches.length > 0 ? matches : near;
  if (source.length === 0) {
    return panel;
  }
  if (matches.length === 0) {
    const note = document.createElement("p");
    note.className = "empty-state";
    note.textContent =
      "No branch is a close match; these are the nearest places to start browsing:";
    panel.appendChild(note);
  }
  const list = document.createElement("ol");
  for (const match of source) {
    const item = document.createElement("li");
    const link = document.createElement("a");
    link.href = `?node=${encodeURIComponent(match.node)}`;
    link.textContent = `${match.node} ${match.label}`;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onSelectNode(match.node);
    });
    item.appendChild(link);
    const score = document.createElement("span");
    score.className = "score";
    score.textContent = match.kind === "crossref" ? "crossref" : match.score.toFixed(4);
    item.appendChild(score);
    const crumb = document.createElement("span");
    crumb.className = "path";
    crumb.textContent = [...match.path].reverse().join(" > ");
    item.appendChild(crumb);
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}

export function renderResults(state: AppState, handlers: ViewHandlers): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "results";
  if (state.results.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No records here; follow a taxonomy branch or reword the query.";
    panel.appendChild(empty);
    return panel;
  }
  const list = document.createElement("ol");
  for (const item of state.results) {
    list.appendChild(renderResultItem(item, state, handlers));
  }
  panel.appendChild(list);
  return panel;
}

function renderResultItem(
  item: ResultItem,
  state: AppState,
  handlers: ViewHandlers,
): HTMLElement {
  const row = document.createElement("li");
  row.className = "result";
  row.dataset.recordId = item.record.id;

  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.checked = state.selection.has(item.record.id);
  checkbox.addEventListener("change", () => handlers.onToggleSelection(item.record.id));
  row.appendChild(checkbox);

  const title = document.createElement("a");
  title.className = "title";
  title.href = item.link;
  title.textContent = item.record.title;
  row.appendChild(title);

  const meta = document.createElement("span");
  meta.className = "meta";
  const bits = [
    item.record.authors.join(", "),
    item.record.venue ?? "",
    item.record.year !== undefined ? String(item.record.year) : "",
    item.link_kind,
  ].filter((bit) => bit !== "");
  meta.textContent = bits.join(" · ");
  row.appendChild(meta);

  // Gleanable spans live on the server-rendered page, not in this view.
  const glean = document.createElement("a");
  glean.className = "glean";
  glean.href = `/results?q=${encodeURIComponent(item.record.title)}&lang=en`;
  glean.textContent = "gleanable page";
  row.appendChild(glean);

  return row;
}

export function renderFacets(state: AppState): HTMLElement {
  const panel = document.createElement("aside");
  panel.className = "facets";
  const counts: FacetCounts | null =
    state.results.length > 0 ? recomputeFacets(state.results) : state.facets;
  if (!counts) {
    return panel;
  }
  const sections: Array<[string, Record<string, number>]> = [
    ["Year", counts.by_year],
    ["Venue", counts.by_venue],
    ["Type", counts.by_type],
  ];
  for (const [heading, mapping] of sections) {
    const title = document.createElement("h3");
    title.textContent = heading;
    panel.appendChild(title);
    const list = document.createElement("ul");
    for (const key of Object.keys(mapping).sort()) {
      const row = document.createElement("li");
      row.textContent = `${key} (${mapping[key]})`;
      list.appendChild(row);
    }
    panel.appendChild(list);
  }
  return panel;
}

/** Hand the export bytes to the browser as a file download. */
export function triggerDownload(bytes: Uint8Array, filename: string): void {
  const buffer = bytes.buffer.slice(
    bytes.byteOffset,
    bytes.byteOffset + bytes.byteLength,
  ) as ArrayBuffer;
  const blob = new Blob([buffer], { type: "text/plain;charset=utf-8" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
