import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { ReviewSession } from "../src/session";
import { makeCase, queuePayload, scriptedFetch } from "./helpers";

const HEAD = makeCase("c1", [0.95, 0.5, 0.05]);
const NEXT = makeCase("c2", [0.12, 0.5, 0.97]);
const THIRD = makeCase("c3", [0.5, 0.5, 0.5]);

function sessionWith(responses: Array<{ status?: number; body: unknown } | Error>) {
  const { fetchImpl, calls } = scriptedFetch(responses);
  const session = new ReviewSession(new ApiClient("", fetchImpl), "demo", "r1");
  return { session, calls };
}

describe("ReviewSession.start", () => {
  it("loads the head case and pre-checks labels scored above t_high", async () => {
    const { session } = sessionWith([{ body: queuePayload([HEAD, NEXT], 5) }]);
    await session.start();
    expect(session.currentCase?.id).toBe("c1");
    expect(session.pending).toBe(5);
    // 0.95 > 0.9 pre-checked; 0.5 and 0.05 not
    expect(session.isChecked(0)).toBe(true);
    expect(session.isChecked(1)).toBe(false);
    expect(session.isChecked(2)).toBe(false);
    expect(session.labelSet()).toEqual(["label0"]);
  });
});

describe("ReviewSession.submit", () => {
  it("submits exactly the visible checkbox state", async () => {
    const { session, calls } = sessionWith([
      { body: queuePayload([HEAD, NEXT], 5) },
      { body: { event: {}, pending: 4 } },
      { body: queuePayload([NEXT, THIRD], 4) },
    ]);
    await session.start();
    session.toggle(1);
    session.toggle(0);
    expect(session.labelSet()).toEqual(["label1"]);
    await session.submit();
    const post = calls.find((c) => c.method === "POST");
    expect(post?.body).toMatchObject({ case_id: "c1", labels: ["label1"] });
  });

  it("issues exactly one POST and one queue GET per cycle and advances", async () => {
    const { session, calls } = sessionWith([
      { body: queuePayload([HEAD, NEXT], 5) },
      { body: { event: {}, pending: 4 } },
      { body: queuePayload([NEXT, THIRD], 4) },
    ]);
    await session.start();
    const before = calls.length;
    const outcome = await session.submit();
    expect(outcome).toBe("advanced");
    const cycle = calls.slice(before);
    expect(cycle.map((c) => c.method)).toEqual(["POST", "GET"]);
    expect(session.currentCase?.id).toBe("c2");
    expect(session.pending).toBe(4);
    // the new case gets its own pre-checks (0.97 > 0.9 at index 2)
    expect(session.labelSet()).toEqual(["label2"]);
  });

  it("empty label sets are submittable", async () => {
    const empty = makeCase("c9", [0.05, 0.04, 0.5]);
    const { session, calls } = sessionWith([
      { body: queuePayload([empty], 1) },
      { body: { event: {}, pending: 0 } },
      { body: queuePayload([], 0) },
    ]);
    await session.start();
    expect(session.labelSet()).toEqual([]);
    const outcome = await session.submit();
    expect(outcome).toBe("advanced");
    const post = calls.find((c) => c.method === "POST");
    expect(post?.body).toMatchObject({ labels: [] });
    expect(session.currentCase).toBeNull();
  });

  it("keeps the queue and form state on a 4xx and surfaces the detail", async () => {
    const { session, calls } = sessionWith([
      { body: queuePayload([HEAD, NEXT], 5) },
      { status: 400, body: { detail: "bad label" } },
    ]);
    await session.start();
    session.toggle(1);
    const checkedBefore = session.labelSet();
    const outcome = await session.submit();
    expect(outcome).toBe("rejected");
    expect(session.currentCase?.id).toBe("c1");
    expect(session.labelSet()).toEqual(checkedBefore);
    expect(session.error).toContain("bad label");
    expect(calls.filter((c) => c.method === "GET")).toHaveLength(1); // only start()
  });

  it("asks for a retry when the network fails, without losing state", async () => {
    const { session } = sessionWith([
      { body: queuePayload([HEAD, NEXT], 5) },
      new TypeError("fetch failed"),
      { body: { event: {}, pending: 4 } },
      { body: queuePayload([NEXT], 4) },
    ]);
    await session.start();
    session.toggle(1);
    expect(await session.submit()).toBe("offline");
    expect(session.error).toMatch(/retry/i);
    expect(session.currentCase?.id).toBe("c1");
    // retry succeeds and advances
    expect(await session.submit()).toBe("advanced");
    expect(session.currentCase?.id).toBe("c2");
  });

  it("allows at most one in-flight submission", async () => {
    const { session } = sessionWith([
      { body: queuePayload([HEAD, NEXT], 5) },
      { body: { event: {}, pending: 4 } },
      { body: queuePayload([NEXT], 4) },
    ]);
    await session.start();
    const [first, second] = await Promise.all([session.submit(), session.submit()]);
    expect([first, second].sort()).toEqual(["advanced", "noop"]);
  });

  it("resyncs when the server queue moved under the prefetch", async () => {
    const { session } = sessionWith([
      { body: queuePayload([HEAD, NEXT], 5) },
      { body: { event: {}, pending: 4 } },
      // another reviewer took c2 meanwhile; server now leads with c3
      { body: queuePayload([THIRD], 3) },
    ]);
    await session.start();
    await session.submit();
    expect(session.currentCase?.id).toBe("c3");
    expect(session.pending).toBe(3);
  });
});
