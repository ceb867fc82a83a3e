// Drives the composed page: load a session through the form and watch the
// heatmap, breadcrumb and findings appear, all backed by recorded exchanges.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { RECORDED_NORM, replayFetch } from "./replay.js";

const PAGE = `
  <div id="banner"></div>
  <input id="log-path" value="logistic_200.xes" />
  <textarea id="norm-json"></textarea>
  <button id="load-session">load</button>
  <span id="session-info"></span>
  <select id="view-select"></select>
  <select id="feature-select"></select>
  <input id="quantile" type="range" min="0.05" max="1" step="0.05" value="1" />
  <span id="quantile-label"></span>
  <div id="weights"></div>
  <nav id="breadcrumb"></nav>
  <div id="heatmap"></div>
  <div id="findings"></div>
`;

describe("page bootstrap", () => {
  beforeEach(() => {
    document.body.innerHTML = PAGE;
    vi.stubGlobal("fetch", replayFetch());
  });

  it("loads a session and renders the worst-first heatmap and findings", async () => {
    const { bootstrap } = await import("../src/main.js");
    bootstrap();
    (document.getElementById("norm-json") as HTMLTextAreaElement).value =
      JSON.stringify(RECORDED_NORM);
    (document.getElementById("load-session") as HTMLButtonElement).click();

    await vi.waitFor(() => {
      const labels = [...document.querySelectorAll("#heatmap tbody th")];
      expect(labels.length).toBe(4);
      expect(labels[0].textContent).toBe("Logistic");
    });

    expect(document.getElementById("session-info")!.textContent).toContain("200 cases");
    const views = [...document.querySelectorAll("#view-select option")].map(
      (o) => (o as HTMLOptionElement).value,
    );
    expect(views).toEqual(["standardization", "costs"]);

    await vi.waitFor(() => {
      const items = document.querySelectorAll("#findings li");
      expect(items.length).toBeGreaterThan(0);
    });

    const crumbs = [...document.querySelectorAll("#breadcrumb button")];
    expect(crumbs.map((c) => c.textContent)).toEqual(["all cases / Category"]);
  });

  it("shows API errors in the banner instead of crashing", async () => {
    const { bootstrap } = await import("../src/main.js");
    bootstrap();
    (document.getElementById("norm-json") as HTMLTextAreaElement).value = "{broken";
    (document.getElementById("load-session") as HTMLButtonElement).click();

    await vi.waitFor(() => {
      const banner = document.getElementById("banner")!;
      expect(banner.style.display).toBe("block");
      expect(banner.textContent).toContain("not valid JSON");
    });
  });
});
