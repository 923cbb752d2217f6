// HTML rendering. Pure string builders so they are testable without a DOM.

import type { ReviewSession } from "./session";
import type { MetricsPayload, TaskInfo } from "./types";

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function inBand(score: number, tLow: number, tHigh: number): boolean {
  return score >= tLow && score <= tHigh;
}

/** Keyboard hint for a label row: 1..9 then 0 for the tenth label. */
function keyHint(index: number): string {
  if (index < 9) return String(index + 1);
  if (index === 9) return "0";
  return "";
}

/**
 * The annotation form for the current case: the report text verbatim, one
 * checkbox per label in schema order, scores to two decimals, and a flag on
 * every score inside the uncertainty band.
 */
export function renderCase(session: ReviewSession): string {
  const current = session.currentCase;
  if (!current) {
    return `<section class="done"><h2>Queue empty</h2>
      <p>No pending cases. ${session.pending} left in this task.</p></section>`;
  }
  const rows = session.labels
    .map((label, index) => {
      const score = current.scores[index];
      const flagged = inBand(score, session.tLow, session.tHigh);
      const checked = session.isChecked(index) ? " checked" : "";
      const hint = keyHint(index);
      return `<li class="label-row${flagged ? " uncertain" : ""}">
        <label>
          <input type="checkbox" data-label-index="${index}"${checked}>
          <span class="key-hint">${hint}</span>
          <span class="label-name">${escapeHtml(label)}</span>
          <span class="score${flagged ? " flagged" : ""}">${score.toFixed(2)}${flagged ? " ⚠" : ""}</span>
        </label>
      </li>`;
    })
    .join("\n");
  return `<section class="case" data-case-id="${escapeHtml(current.id)}">
    <header>
      <h2>${escapeHtml(current.id)}</h2>
      <span class="pending-count">${session.pending} pending</span>
    </header>
    <pre class="report-text">${escapeHtml(current.text)}</pre>
    <ul class="labels">${rows}</ul>
    ${session.error ? `<p class="error" role="alert">${escapeHtml(session.error)}</p>` : ""}
    <button type="button" id="submit" ${session.busy ? "disabled" : ""}>Submit (Enter)</button>
  </section>`;
}

export function renderDashboard(tasks: TaskInfo[], metrics: MetricsPayload[]): string {
  const byTask = new Map(metrics.map((m) => [m.task, m]));
  const rows = tasks
    .map((task) => {
      const m = byTask.get(task.task);
      const triage = m?.triage;
      const pct = (v: number | null | undefined) =>
        v === null || v === undefined ? "n/a" : `${(100 * v).toFixed(2)}%`;
      return `<tr data-task="${escapeHtml(task.task)}">
        <td><a href="#" class="open-task" data-task="${escapeHtml(task.task)}">${escapeHtml(task.task)}</a></td>
        <td>${task.pending}</td>
        <td>${task.annotated}</td>
        <td>${pct(triage?.uncertain_pct)}</td>
        <td>${pct(triage?.auto_accuracy)}</td>
        <td>${pct(triage?.full_accuracy)}</td>
        <td>${m?.consistency === null || m?.consistency === undefined ? "n/a" : m.consistency.toFixed(4)}</td>
      </tr>`;
    })
    .join("\n");
  return `<section class="dashboard">
    <h2>Review queues</h2>
    <table>
      <thead><tr>
        <th>Task</th><th>Pending</th><th>Annotated</th>
        <th>Uncertain</th><th>Auto accuracy</th><th>Full-set accuracy</th><th>Consistency</th>
      </tr></thead>
      <tbody>${rows}</tbody>
    </table>
  </section>`;
}
