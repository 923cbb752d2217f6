// Test doubles: a scripted fetch and payload builders for the service API.

import type { QueuePayload, ReviewCase } from "../src/types";

export function makeCase(id: string, scores: number[], text = `report ${id}`): ReviewCase {
  return {
    id,
    text,
    scores,
    labels: scores.map((_, i) => `label${i}`),
    status: "pending",
  };
}

export function queuePayload(cases: ReviewCase[], pending = cases.length): QueuePayload {
  return {
    task: "demo",
    t_low: 0.1,
    t_high: 0.9,
    labels: cases[0]?.labels ?? ["label0", "label1", "label2"],
    pending,
    cases,
  };
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

/**
 * A fetch stub fed from a queue of responses. Records every call so tests can
 * assert on request counts and payloads.
 */
export function scriptedFetch(
  responses: Array<{ status?: number; body: unknown } | Error>,
) {
  const calls: RecordedCall[] = [];
  const fetchImpl = async (input: RequestInfo | URL, init?: RequestInit) => {
    const entry = responses.shift();
    if (entry === undefined) {
      throw new Error(`unexpected fetch call: ${String(input)}`);
    }
    calls.push({
      url: String(input),
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    if (entry instanceof Error) throw entry;
    const status = entry.status ?? 200;
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: String(status),
      json: async () => entry.body,
    } as Response;
  };
  return { fetchImpl: fetchImpl as typeof fetch, calls };
}
