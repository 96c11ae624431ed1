import type { FacetCounts, ResultItem } from "./types.js";

/**
 * Recompute facet counts over the displayed items, mirroring the server's
 * bucketing (missing year or venue counts under "unknown"). The sidebar
 * asserts these equal the server's facets for the same result list.
 */
export function recomputeFacets(items: ResultItem[]): FacetCounts {
  const counts: FacetCounts = { by_year: {}, by_venue: {}, by_type: {} };
  for (const item of items) {
    const record = item.record;
    const year = record.year !== undefined ? String(record.year) : "unknown";
    const venue = record.venue !== undefined && record.venue !== "" ? record.venue : "unknown";
    counts.by_year[year] = (counts.by_year[year] ?? 0) + 1;
    counts.by_venue[venue] = (counts.by_venue[venue] ?? 0) + 1;
    counts.by_type[record.entry_type] = (counts.by_type[record.entry_type] ?? 0) + 1;
  }
  return counts;
}

export function facetsEqual(a: FacetCounts, b: FacetCounts): boolean {
  return (
    mapEqual(a.by_year, b.by_year) &&
    mapEqual(a.by_venue, b.by_venue) &&
    mapEqual(a.by_type, b.by_type)
  );
}

function mapEqual(a: Record<string, number>, b: Record<string, number>): boolean {
  const keys = new Set([...Object.keys(a), ...Object.keys(b)]);
  for (const key of keys) {
    if (a[key] !== b[key]) {
      return false;
    }
  }
  return true;
}
