// Wiring: dashboard -> review loop, DOM events -> session methods.

import { ApiClient } from "./api";
import { keyToAction } from "./keyboard";
import { ReviewSession } from "./session";
import { renderCase, renderDashboard } from "./view";

const api = new ApiClient("");
const root = document.getElementById("app") as HTMLElement;

let session: ReviewSession | null = null;

function reviewerId(): string {
  const stored = localStorage.getItem("reviewer_id");
  if (stored) return stored;
  const entered = window.prompt("Reviewer id:", "") || "anonymous";
  localStorage.setItem("reviewer_id", entered);
  return entered;
}

function paintCase(): void {
  if (!session) return;
  root.innerHTML = renderCase(session);
  root.querySelectorAll<HTMLInputElement>("input[data-label-index]").forEach((box) => {
    box.addEventListener("change", () => {
      session?.toggle(Number(box.dataset.labelIndex));
      paintCase();
    });
  });
  root.querySelector("#submit")?.addEventListener("click", () => void submit());
}

async function submit(): Promise<void> {
  if (!session) return;
  await session.submit();
  paintCase();
}

async function openTask(task: string): Promise<void> {
  session = new ReviewSession(api, task, reviewerId());
  await session.start();
  paintCase();
}

async function paintDashboard(): Promise<void> {
  const tasks = await api.listTasks();
  const metrics = await Promise.all(tasks.map((t) => api.fetchMetrics(t.task)));
  root.innerHTML = renderDashboard(tasks, metrics);
  root.querySelectorAll<HTMLAnchorElement>("a.open-task").forEach((link) => {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      void openTask(link.dataset.task as string);
    });
  });
}

document.addEventListener("keydown", (event) => {
  if (!session) return;
  const action = keyToAction(event, session.labels.length);
  if (action.kind === "toggle") {
    event.preventDefault();
    session.toggle(action.index);
    paintCase();
  } else if (action.kind === "submit") {
    event.preventDefault();
    void submit();
  }
});

void paintDashboard();
