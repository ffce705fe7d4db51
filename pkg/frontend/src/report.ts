/**
 * Admin report view: renders the service report as a table. Values come
 * straight from the server response; nothing is recomputed or rounded
 * here, only stringified.
 */

import { StudyReport } from "./api.js";

export function reportTableRows(report: StudyReport): string[][] {
  return report.datasets.map((d) => [
    d.dataset,
    String(d.mean_original),
    String(d.mean_inpainted),
    String(d.improvement_pct) + "%",
    `${d.volunteers_original}/${d.volunteers_inpainted}`,
  ]);
}

export function renderReport(report: StudyReport, table: HTMLTableElement): void {
  table.innerHTML = "";
  const head = table.createTHead().insertRow();
  for (const label of [
    "Subset",
    "Original",
    "Inpainted",
    "Improvement",
    "Volunteers (orig/inp)",
  ]) {
    const cell = document.createElement("th");
    cell.textContent = label;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of reportTableRows(report)) {
    const tr = body.insertRow();
    for (const value of row) {
      tr.insertCell().textContent = value;
    }
  }
}
