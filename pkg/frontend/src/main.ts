// Page wiring: session form, view/weight controls, breadcrumb drill-down,
// findings. At most one heatmap request is in flight; stale responses are
// discarded by token so the latest interaction always wins.

import { ApiClient, ApiError } from "./api.js";
import { renderFindings } from "./findings.js";
import { renderHeatmap } from "./heatmap.js";
import {
  breadcrumbLabels,
  currentCrumb,
  currentFilter,
  drilldownFilter,
  initState,
  popBreadcrumb,
  pushDrilldown,
  replaceTopHeatmap,
  setFindings,
  setQuantile,
  switchView,
  type UiState,
} from "./state.js";
import type { NormDocument, SessionSummary } from "./types.js";

const api = new ApiClient();
let state: UiState | null = null;
let norm: NormDocument | null = null;
let summary: SessionSummary | null = null;
let requestToken = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function banner(message: string | null): void {
  const box = el<HTMLDivElement>("banner");
  box.textContent = message ?? "";
  box.style.display = message ? "block" : "none";
}

function caseFeatures(): string[] {
  if (!summary) return [];
  return summary.feature_catalog
    .filter((f) => f.level === "case" && f.kind === "categorical")
    .map((f) => f.name);
}

async function loadSession(): Promise<void> {
  const logPath = el<HTMLInputElement>("log-path").value.trim();
  try {
    norm = JSON.parse(el<HTMLTextAreaElement>("norm-json").value) as NormDocument;
  } catch (err) {
    banner(`norm document is not valid JSON: ${err}`);
    return;
  }
  try {
    summary = await api.createSession(logPath, norm);
  } catch (err) {
    banner(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
    return;
  }
  banner(null);

  const viewSelect = el<HTMLSelectElement>("view-select");
  viewSelect.innerHTML = "";
  for (const name of summary.views) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    viewSelect.appendChild(option);
  }
  const featureSelect = el<HTMLSelectElement>("feature-select");
  featureSelect.innerHTML = "";
  for (const name of caseFeatures()) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    featureSelect.appendChild(option);
  }
  el<HTMLSpanElement>("session-info").textContent =
    `${summary.n_cases} cases, ${summary.n_events} events`;

  const view = summary.views[0];
  const feature = caseFeatures()[0];
  if (!feature) {
    banner("the log has no case-level categorical features to group by");
    return;
  }
  const heatmap = await api.heatmap(view, feature);
  state = initState(view, feature, heatmap);
  renderWeightSliders(view);
  await refreshFindings();
  render();
}

function renderWeightSliders(viewName: string): void {
  if (!norm) return;
  const doc = norm.views.find((v) => v.name === viewName);
  const host = el<HTMLDivElement>("weights");
  host.innerHTML = "";
  if (!doc) return;
  for (const [layer, weight] of Object.entries(doc.weights)) {
    const label = document.createElement("label");
    label.textContent = `${layer} ${Number(weight).toFixed(2)}`;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "1";
    slider.step = "0.05";
    slider.value = String(weight);
    slider.addEventListener("change", async () => {
      doc.weights[layer] = Number(slider.value);
      await loadSessionWithCurrentNorm();
    });
    label.appendChild(slider);
    host.appendChild(label);
  }
}

async function loadSessionWithCurrentNorm(): Promise<void> {
  if (!norm) return;
  el<HTMLTextAreaElement>("norm-json").value = JSON.stringify(norm, null, 2);
  await loadSession();
}

async function refreshHeatmap(): Promise<void> {
  if (!state) return;
  const token = ++requestToken;
  const top = currentCrumb(state);
  try {
    const heatmap = await api.heatmap(state.view, top.feature, currentFilter(state));
    if (token !== requestToken || !state) return; // a newer request won
    state = replaceTopHeatmap(state, heatmap);
    render();
  } catch (err) {
    banner(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
  }
}

async function refreshFindings(): Promise<void> {
  if (!state) return;
  try {
    const findings = await api.findings(state.view, 5, 1);
    state = setFindings(state, findings);
  } catch (err) {
    banner(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
  }
}

async function drillDown(value: string): Promise<void> {
  if (!state) return;
  const token = ++requestToken;
  const nextFeature = el<HTMLSelectElement>("feature-select").value;
  try {
    const heatmap = await api.heatmap(state.view, nextFeature, drilldownFilter(state, value));
    if (token !== requestToken || !state) return;
    state = pushDrilldown(state, value, nextFeature, heatmap);
    render();
  } catch (err) {
    banner(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
  }
}

function render(): void {
  if (!state) return;
  renderHeatmap(el<HTMLDivElement>("heatmap"), currentCrumb(state).heatmap, {
    onDrilldown: (value) => void drillDown(value),
  });
  renderFindings(el<HTMLDivElement>("findings"), state.findings);

  const trail = el<HTMLDivElement>("breadcrumb");
  trail.innerHTML = "";
  breadcrumbLabels(state).forEach((label, index) => {
    const link = document.createElement("button");
    link.textContent = label;
    link.className = "crumb";
    link.disabled = index === state!.breadcrumb.length - 1;
    link.addEventListener("click", () => {
      while (state!.breadcrumb.length - 1 > index) {
        state = popBreadcrumb(state!);
      }
      render();
    });
    trail.appendChild(link);
  });
}

export function bootstrap(): void {
  el<HTMLButtonElement>("load-session").addEventListener("click", () => void loadSession());

  el<HTMLSelectElement>("view-select").addEventListener("change", async (event) => {
    if (!state) return;
    const view = (event.target as HTMLSelectElement).value;
    state = switchView(state, view);
    renderWeightSliders(view);
    await refreshFindings();
    await refreshHeatmap();
  });

  el<HTMLInputElement>("quantile").addEventListener("change", async (event) => {
    if (!state) return;
    const raw = Number((event.target as HTMLInputElement).value);
    state = setQuantile(state, raw >= 1 ? null : raw);
    el<HTMLSpanElement>("quantile-label").textContent =
      raw >= 1 ? "all cases" : `lowest ${Math.round(raw * 100)}%`;
    await refreshHeatmap();
  });

  el<HTMLSelectElement>("feature-select").addEventListener("change", async (event) => {
    if (!state) return;
    // switching the grouping feature re-targets the current level
    const feature = (event.target as HTMLSelectElement).value;
    const top = currentCrumb(state);
    state = {
      ...state,
      breadcrumb: [
        ...state.breadcrumb.slice(0, -1),
        { ...top, feature },
      ],
    };
    await refreshHeatmap();
  });

  void api
    .health()
    .then(() => banner(null))
    .catch(() => banner("API not reachable; start it with: wise serve"));
}

if (typeof document !== "undefined" && document.getElementById("load-session")) {
  bootstrap();
}
