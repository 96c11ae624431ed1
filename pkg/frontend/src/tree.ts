import type { GraphDoc, Lang } from "./types.js";
import { nodeLabel } from "./types.js";

/**
 * Render model for the taxonomy tree: plain hierarchy with cross-reference
 * jump links attached to their source nodes. Kept DOM-free so the shape is
 * testable without a browser.
 */
export interface TreeNodeModel {
  id: string;
  label: string;
  children: TreeNodeModel[];
  crossrefs: string[];
  expanded: boolean;
  selected: boolean;
  highlighted: boolean;
}

export interface TreeOptions {
  lang: Lang;
  expanded: Set<string>;
  selected: string | null;
  highlights: Set<string>;
}

export function buildTree(graph: GraphDoc, options: TreeOptions): TreeNodeModel {
  const labels = new Map(graph.nodes.map((n) => [n.id, n.labels]));
  const children = new Map<string, string[]>();
  const crossrefs = new Map<string, string[]>();
  for (const edge of graph.edges) {
    const bucket = edge.kind === "hierarchy" ? children : crossrefs;
    const list = bucket.get(edge.source) ?? [];
    list.push(edge.target);
    bucket.set(edge.source, list);
  }
  for (const list of children.values()) {
    list.sort();
  }

  const build = (id: string): TreeNodeModel => ({
    id,
    label: nodeLabel(labels.get(id) ?? {}, options.lang),
    children: (children.get(id) ?? []).map(build),
    crossrefs: crossrefs.get(id) ?? [],
    expanded: options.expanded.has(id),
    selected: options.selected === id,
    highlighted: options.highlights.has(id),
  });
  return build(graph.root);
}

export function countNodes(model: TreeNodeModel): number {
  return 1 + model.children.reduce((sum, child) => sum + countNodes(child), 0);
}

/** Ids of every node that has children (used for the expand-all default). */
export function expandableIds(graph: GraphDoc): Set<string> {
  const ids = new Set<string>();
  for (const edge of graph.edges) {
    if (edge.kind === "hierarchy") {
      ids.add(edge.source);
    }
  }
  return ids;
}
