// Pure UI state and transitions for the analyst's drill-down loop.
// Breadcrumb entries cache the grid they showed, so popping restores the
// exact prior heatmap without trusting anything but server purity.

import type { FilterBody, FindingRow, HeatmapData } from "./types.js";

export type Crumb = {
  /** Cumulative feature=value conjuncts active at this level. */
  equals: [string, string][];
  /** Feature whose heatmap is displayed at this level. */
  feature: string;
  heatmap: HeatmapData;
};

export type UiState = {
  view: string;
  quantile: number | null;
  breadcrumb: Crumb[];
  findings: FindingRow[];
};

export function initState(view: string, feature: string, heatmap: HeatmapData): UiState {
  return {
    view,
    quantile: null,
    breadcrumb: [{ equals: [], feature, heatmap }],
    findings: [],
  };
}

export function currentCrumb(state: UiState): Crumb {
  return state.breadcrumb[state.breadcrumb.length - 1];
}

/** The filter body matching the current breadcrumb level. */
export function currentFilter(state: UiState): FilterBody {
  return {
    equals: currentCrumb(state).equals.map((pair) => [...pair] as [string, string]),
    score_quantile: state.quantile,
  };
}

/** Filter for one level deeper: the clicked value joins the conjuncts. */
export function drilldownFilter(state: UiState, value: string): FilterBody {
  const top = currentCrumb(state);
  return {
    equals: [...top.equals.map((p) => [...p] as [string, string]), [top.feature, value]],
    score_quantile: state.quantile,
  };
}

export function pushDrilldown(
  state: UiState,
  value: string,
  nextFeature: string,
  heatmap: HeatmapData,
): UiState {
  const top = currentCrumb(state);
  const crumb: Crumb = {
    equals: [...top.equals, [top.feature, value]],
    feature: nextFeature,
    heatmap,
  };
  return { ...state, breadcrumb: [...state.breadcrumb, crumb] };
}

/** Pop one drill-down level; the root level never pops. */
export function popBreadcrumb(state: UiState): UiState {
  if (state.breadcrumb.length <= 1) {
    return state;
  }
  return { ...state, breadcrumb: state.breadcrumb.slice(0, -1) };
}

export function setQuantile(state: UiState, quantile: number | null): UiState {
  if (quantile !== null && !(quantile > 0 && quantile <= 1)) {
    throw new Error(`quantile ${quantile} outside (0, 1]`);
  }
  return { ...state, quantile };
}

export function switchView(state: UiState, view: string): UiState {
  return { ...state, view };
}

/** Swap in a freshly fetched grid for the current level (same filter). */
export function replaceTopHeatmap(state: UiState, heatmap: HeatmapData): UiState {
  const breadcrumb = [...state.breadcrumb];
  const top = breadcrumb[breadcrumb.length - 1];
  breadcrumb[breadcrumb.length - 1] = { ...top, heatmap };
  return { ...state, breadcrumb };
}

export function setFindings(state: UiState, findings: FindingRow[]): UiState {
  return { ...state, findings };
}

export function breadcrumbLabels(state: UiState): string[] {
  return state.breadcrumb.map((crumb, i) => {
    if (i === 0) {
      return `all cases / ${crumb.feature}`;
    }
    const [feature, value] = crumb.equals[crumb.equals.length - 1];
    return `${feature}=${value} / ${crumb.feature}`;
  });
}
