// The analyst's loop against exchanges recorded from the real server on the
// Logistic fixture: worst-first rendering, drill-down equal to a direct API
// call, lossless breadcrumb pop, quantile filter, view toggle.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderHeatmap } from "../src/heatmap.js";
import {
  currentCrumb,
  drilldownFilter,
  initState,
  popBreadcrumb,
  pushDrilldown,
  setQuantile,
  switchView,
} from "../src/state.js";
import type { HeatmapData } from "../src/types.js";
import { recordedData, replayFetch } from "./replay.js";

function client(): ApiClient {
  return new ApiClient("", replayFetch());
}

function gridNumbers(container: HTMLElement): string[][] {
  return [...container.querySelectorAll("tbody tr")].map((row) =>
    [...row.querySelectorAll("td.score-cell")].map((cell) => cell.textContent ?? ""),
  );
}

describe("heatmap rendering", () => {
  let container: HTMLElement;

  beforeEach(() => {
    container = document.createElement("div");
    document.body.appendChild(container);
  });

  it("renders the Logistic fixture worst-first with one row per value", async () => {
    const heatmap = await client().heatmap("standardization", "Category");
    renderHeatmap(container, heatmap);
    const labels = [...container.querySelectorAll("tbody th")].map((n) => n.textContent);
    expect(labels[0]).toBe("Logistic");
    expect(labels).toEqual(heatmap.rows);
    expect(container.querySelectorAll("tbody tr").length).toBe(4);
    // 6 score columns per row, cell text equals the server's numbers
    const rendered = gridNumbers(container);
    expect(rendered[0]).toEqual(heatmap.cells[0].map((c) => c.toFixed(3)));
    expect(rendered[0].length).toBe(6);
  });

  it("renders an explicit empty state when no cases match", () => {
    const empty: HeatmapData = {
      feature: "Category",
      columns: [],
      rows: [],
      cells: [],
      volumes: [],
    };
    renderHeatmap(container, empty);
    expect(container.querySelector("table")).toBeNull();
    expect(container.querySelector(".empty-state")).not.toBeNull();
  });

  it("row header clicks invoke the drill-down handler", async () => {
    const heatmap = await client().heatmap("standardization", "Category");
    const clicked: string[] = [];
    renderHeatmap(container, heatmap, { onDrilldown: (value) => clicked.push(value) });
    (container.querySelector("tbody th") as HTMLElement).click();
    expect(clicked).toEqual(["Logistic"]);
  });
});

describe("drill-down loop", () => {
  it("sub-heatmap equals the direct API response, pop restores the prior grid", async () => {
    const api = client();
    const root = await api.heatmap("standardization", "Category");
    let state = initState("standardization", "Category", root);
    expect(currentCrumb(state).heatmap.rows[0]).toBe("Logistic");

    // drill into Logistic, regrouping by Vendor
    const sub = await api.heatmap("standardization", "Vendor", drilldownFilter(state, "Logistic"));
    state = pushDrilldown(state, "Logistic", "Vendor", sub);

    const direct = recordedData<HeatmapData>("POST", "/api/heatmap", {
      view: "standardization",
      feature: "Vendor",
      filter: { equals: [["Category", "Logistic"]], score_quantile: null },
    });
    expect(currentCrumb(state).heatmap).toEqual(direct);

    const popped = popBreadcrumb(state);
    expect(currentCrumb(popped).heatmap).toEqual(root);
  });

  it("quantile slider filters through the same endpoint as the CLI", async () => {
    const api = client();
    const root = await api.heatmap("standardization", "Category");
    let state = initState("standardization", "Category", root);
    state = setQuantile(state, 0.2);
    const filtered = await api.heatmap("standardization", "Category", {
      equals: [],
      score_quantile: state.quantile,
    });
    const direct = recordedData<HeatmapData>("POST", "/api/heatmap", {
      view: "standardization",
      feature: "Category",
      filter: { equals: [], score_quantile: 0.2 },
    });
    expect(filtered).toEqual(direct);
    // the low quantile is exactly the injected Logistic population
    expect(filtered.rows).toEqual(["Logistic"]);
    expect(filtered.volumes.reduce((a, b) => a + b, 0)).toBeLessThan(
      root.volumes.reduce((a, b) => a + b, 0),
    );
  });

  it("switching views changes layer means but not the case population", async () => {
    const api = client();
    const std = await api.heatmap("standardization", "Category");
    let state = initState("standardization", "Category", std);
    state = switchView(state, "costs");
    const costs = await api.heatmap(state.view, "Category");
    expect(costs.volumes).toEqual(std.volumes); // same cases
    expect(costs.cells).not.toEqual(std.cells); // different weighting
  });

  it("every rendered number is traceable to an API response field", async () => {
    const api = client();
    const heatmap = await api.heatmap("standardization", "Category");
    const container = document.createElement("div");
    renderHeatmap(container, heatmap);
    const rendered = gridNumbers(container);
    heatmap.cells.forEach((row, i) =>
      row.forEach((score, j) => expect(rendered[i][j]).toBe(score.toFixed(3))),
    );
  });
});

describe("findings panel", () => {
  it("lists statements in rank order", async () => {
    const { renderFindings } = await import("../src/findings.js");
    const findings = await client().findings("standardization", 5, 1);
    expect(findings.length).toBeGreaterThan(0);
    expect(findings[0].value).toBe("Logistic");
    const container = document.createElement("div");
    renderFindings(container, findings);
    const items = [...container.querySelectorAll("li")];
    expect(items.map((i) => i.textContent)).toEqual(findings.map((f) => f.statement));
  });
});
