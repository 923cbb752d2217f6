import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";
import { makeCase, queuePayload, scriptedFetch } from "./helpers";

describe("ApiClient", () => {
  it("requests the queue with task and limit", async () => {
    const { fetchImpl, calls } = scriptedFetch([
      { body: queuePayload([makeCase("a", [0.5, 0.9, 0.1])]) },
    ]);
    const client = new ApiClient("http://svc", fetchImpl);
    const queue = await client.fetchQueue("main organ", 2);
    expect(calls[0].url).toBe("http://svc/api/queue/main%20organ?limit=2");
    expect(queue.cases[0].id).toBe("a");
  });

  it("posts annotations as JSON with the full label set", async () => {
    const { fetchImpl, calls } = scriptedFetch([
      { body: { event: { case_id: "a" }, pending: 4 } },
    ]);
    const client = new ApiClient("", fetchImpl);
    await client.submitAnnotation("demo", "a", "r1", ["label0", "label2"]);
    expect(calls[0]).toMatchObject({
      url: "/api/annotations",
      method: "POST",
      body: { task: "demo", case_id: "a", reviewer_id: "r1", labels: ["label0", "label2"] },
    });
  });

  it("surfaces server detail on non-2xx responses", async () => {
    const { fetchImpl } = scriptedFetch([
      { status: 400, body: { detail: "labels not in schema: ['zz']" } },
    ]);
    const client = new ApiClient("", fetchImpl);
    const failure = await client
      .submitAnnotation("demo", "a", "r1", ["zz"])
      .catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(400);
    expect((failure as ApiError).message).toContain("zz");
  });

  it("propagates network failures untouched", async () => {
    const { fetchImpl } = scriptedFetch([new TypeError("fetch failed")]);
    const client = new ApiClient("", fetchImpl);
    await expect(client.listTasks()).rejects.toThrow("fetch failed");
  });
});
