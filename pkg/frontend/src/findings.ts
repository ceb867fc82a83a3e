import type { FindingRow } from "./types.js";

export function renderFindings(container: HTMLElement, findings: FindingRow[]): void {
  container.innerHTML = "";
  if (findings.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no findings above the support threshold";
    container.appendChild(empty);
    return;
  }
  const list = document.createElement("ol");
  list.className = "findings";
  for (const finding of findings) {
    const item = document.createElement("li");
    item.textContent = finding.statement;
    item.dataset.feature = finding.feature;
    item.dataset.value = finding.value;
    item.dataset.layer = finding.layer;
    list.appendChild(item);
  }
  container.appendChild(list);
}
