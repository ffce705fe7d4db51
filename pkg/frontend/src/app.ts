/**
 * Volunteer page wiring: join a session, loop through trials (click the
 * destination on the image, then confirm with Found), finish on the
 * completion screen. The admin report page lives in report.ts.
 */

import { ApiError, StudyApi } from "./api.js";
import { renderReport } from "./report.js";
import { TrialRunner } from "./trial.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function show(id: string, visible: boolean): void {
  el(id).style.display = visible ? "" : "none";
}

export function initVolunteerPage(): void {
  const api = new StudyApi("");
  const image = el<HTMLImageElement>("trial-image");
  let runner: TrialRunner | null = null;
  let pendingClick: { x: number; y: number } | null = null;
  let marker = el<HTMLElement>("click-marker");

  async function advance(): Promise<void> {
    if (!runner) return;
    pendingClick = null;
    marker.style.display = "none";
    el<HTMLButtonElement>("found-button").disabled = true;
    show("banner", false);
    const state = await runner.next();
    if (state.kind === "done") {
      show("trial-screen", false);
      show("done-screen", true);
    } else if (state.kind === "retry") {
      show("banner", true);
      el("banner").textContent = state.message + " - press Retry";
      show("retry-button", true);
    } else if (state.kind === "active") {
      el("instruction").textContent = `Find: ${state.view.targetName}`;
    }
  }

  el("join-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const studyId = el<HTMLInputElement>("study-id").value.trim();
    const volunteerId = el<HTMLInputElement>("volunteer-id").value.trim();
    const group = el<HTMLInputElement>("group").value.trim();
    try {
      const sessionId = await api.openSession(studyId, volunteerId, group);
      runner = new TrialRunner(api, sessionId, image);
      show("join-screen", false);
      show("trial-screen", true);
      await advance();
    } catch (err) {
      show("banner", true);
      el("banner").textContent = err instanceof ApiError ? err.detail : String(err);
    }
  });

  image.addEventListener("click", (event) => {
    if (!runner || runner.state.kind !== "active") return;
    pendingClick = { x: event.clientX, y: event.clientY };
    const rect = image.getBoundingClientRect();
    marker.style.left = `${event.clientX - rect.left}px`;
    marker.style.top = `${event.clientY - rect.top}px`;
    marker.style.display = "block";
    el<HTMLButtonElement>("found-button").disabled = false;
  });

  el("found-button").addEventListener("click", async () => {
    if (!runner || !pendingClick) return;
    try {
      await runner.submitFound(pendingClick.x, pendingClick.y);
      await advance();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await advance(); // already recorded server-side; move on
        return;
      }
      show("banner", true);
      el("banner").textContent = err instanceof ApiError ? err.detail : String(err);
    }
  });

  el("retry-button").addEventListener("click", () => {
    show("retry-button", false);
    void advance();
  });
}

export function initReportPage(): void {
  const api = new StudyApi("");
  el("report-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const studyId = el<HTMLInputElement>("report-study-id").value.trim();
    const hitsOnly = el<HTMLInputElement>("hits-only").checked;
    try {
      const report = await api.report(studyId, hitsOnly);
      renderReport(report, el<HTMLTableElement>("report-table"));
      el("aggregation-note").textContent = report.aggregation;
      el("excluded-note").textContent = report.excluded_volunteers.length
        ? `excluded volunteers: ${report.excluded_volunteers.join(", ")}`
        : "";
    } catch (err) {
      el("aggregation-note").textContent =
        err instanceof ApiError ? err.detail : String(err);
    }
  });
}

declare global {
  interface Window {
    wayclearInit?: () => void;
  }
}

if (typeof document !== "undefined" && document.getElementById("join-form")) {
  initVolunteerPage();
} else if (typeof document !== "undefined" && document.getElementById("report-form")) {
  initReportPage();
}
