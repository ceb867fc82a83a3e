// Renders a heatmap matrix as a table: rows worst-first as delivered by the
// server, one colored cell per layer with its numeric label, row headers
// shaded by case volume. Clicking a row header starts a drill-down.

import { labelTextColor, scoreColor, volumeShade } from "./color.js";
import type { HeatmapData } from "./types.js";

export type HeatmapHandlers = {
  onDrilldown?: (value: string) => void;
};

export function renderHeatmap(
  container: HTMLElement,
  data: HeatmapData,
  handlers: HeatmapHandlers = {},
): void {
  container.innerHTML = "";
  if (data.rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no cases match the current filter";
    container.appendChild(empty);
    return;
  }

  const table = document.createElement("table");
  table.className = "heatmap";

  const head = table.createTHead().insertRow();
  head.appendChild(document.createElement("th")).textContent = data.feature;
  head.appendChild(document.createElement("th")).textContent = "cases";
  for (const column of data.columns) {
    head.appendChild(document.createElement("th")).textContent = column;
  }

  const body = table.createTBody();
  const maxVolume = Math.max(...data.volumes);
  data.rows.forEach((value, rowIndex) => {
    const row = body.insertRow();
    row.dataset.value = value;

    const label = document.createElement("th");
    label.textContent = value;
    label.className = "row-label";
    label.style.backgroundColor = volumeShade(data.volumes[rowIndex], maxVolume);
    label.style.color = labelTextColor(data.volumes[rowIndex], maxVolume);
    if (handlers.onDrilldown) {
      label.classList.add("clickable");
      label.addEventListener("click", () => handlers.onDrilldown!(value));
    }
    row.appendChild(label);

    const volume = row.insertCell();
    volume.textContent = String(data.volumes[rowIndex]);
    volume.className = "volume";

    data.cells[rowIndex].forEach((score) => {
      const cell = row.insertCell();
      cell.textContent = score.toFixed(3);
      cell.style.backgroundColor = scoreColor(score);
      cell.className = "score-cell";
    });
  });

  container.appendChild(table);
}
