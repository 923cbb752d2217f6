// End-to-end review loop against a real service instance on a synthetic run.
//
// Builds the 5,000-case demo pipeline with the Python CLI, starts
// `casetriage serve`, and drives it through the UI's own API client and
// session machinery.

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtemp, readFile, rm } from "node:fs/promises";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { ReviewSession } from "../src/session";

const execFileAsync = promisify(execFile);
const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "../..");

let workdir: string;
let server: ChildProcess | null = null;
let base: string;
let logPath: string;
let smokeCaseId: string;

async function waitForServer(url: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(url);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error(`service at ${url} did not come up`);
}

beforeAll(async () => {
  workdir = await mkdtemp(path.join(tmpdir(), "casetriage-ui-"));
  await execFileAsync(
    "python3",
    [path.join(REPO_ROOT, "scripts", "make_demo_run.py"), "--dir", workdir],
    { timeout: 150_000 },
  );
  logPath = path.join(workdir, "annotations.jsonl");
  const port = 8200 + Math.floor(Math.random() * 700);
  base = `http://127.0.0.1:${port}`;
  server = spawn(
    "casetriage",
    [
      "serve",
      "--queue", path.join(workdir, "run", "queue.json"),
      "--dataset", path.join(workdir, "cases.jsonl"),
      "--schema", path.join(workdir, "schema.json"),
      "--report", path.join(workdir, "run", "triage_report.json"),
      "--log", logPath,
      "--port", String(port),
    ],
    { stdio: "ignore" },
  );
  await waitForServer(`${base}/api/tasks`);
}, 200_000);

afterAll(async () => {
  server?.kill("SIGTERM");
  if (workdir) await rm(workdir, { recursive: true, force: true });
});

describe("review loop against the live service", () => {
  it("fetches a pending case, submits once, log gains one event, pending drops", async () => {
    const api = new ApiClient(base);
    const [before] = await api.listTasks();
    expect(before.pending).toBeGreaterThan(11);

    const session = new ReviewSession(api, before.task, "ui-smoke");
    await session.start();
    const current = session.currentCase;
    expect(current).not.toBeNull();
    expect(current!.text.length).toBeGreaterThan(0);
    expect(current!.scores).toHaveLength(before.labels.length);
    smokeCaseId = current!.id;

    const outcome = await session.submit();
    expect(outcome).toBe("advanced");

    const logLines = (await readFile(logPath, "utf8")).trim().split("\n");
    expect(logLines).toHaveLength(1);
    const event = JSON.parse(logLines[0]);
    expect(event.case_id).toBe(smokeCaseId);
    expect(event.reviewer_id).toBe("ui-smoke");

    const [after] = await api.listTasks();
    expect(after.pending).toBe(before.pending - 1);
  }, 60_000);

  it("three scripted reviewers on ten shared cases match the CLI consistency exactly", async () => {
    const api = new ApiClient(base);
    const [task] = await api.listTasks();
    const queue = await api.fetchQueue(task.task, 12);
    const ids = queue.cases
      .map((c) => c.id)
      .filter((id) => id !== smokeCaseId)
      .slice(0, 10);
    expect(ids).toHaveLength(10);

    // r1 and r2 always agree; r3 agrees only on every third case
    const first = queue.labels[0];
    const second = queue.labels[1];
    for (const reviewer of ["r1", "r2", "r3"]) {
      for (const [index, caseId] of ids.entries()) {
        let labels = [first];
        if (reviewer === "r3" && index % 3 !== 0) {
          labels = index % 3 === 1 ? [second] : [];
        }
        const response = await api.submitAnnotation(task.task, caseId, reviewer, labels);
        expect(response.event.case_id).toBe(caseId);
      }
    }

    const logLines = (await readFile(logPath, "utf8")).trim().split("\n");
    expect(logLines).toHaveLength(31); // smoke annotation + 3 reviewers x 10 cases

    const metrics = await api.fetchMetrics(task.task);
    expect(metrics.consistency_cases).toBe(10);

    const { stdout } = await execFileAsync("casetriage", [
      "consistency",
      "--log", logPath,
      "--ids", ids.join(","),
      "--task", task.task,
    ]);
    const cliValue = JSON.parse(stdout).consistency as number;
    expect(metrics.consistency).toBe(cliValue);

    // 4 all-agree cases and 6 two-agree cases: (4 * 1 + 6 * 2/3) / 10
    expect(cliValue).toBeCloseTo((4 + 6 * (2 / 3)) / 10, 12);
  }, 60_000);
});
