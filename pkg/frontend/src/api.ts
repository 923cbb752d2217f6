import type {
  AnnotationResponse,
  MetricsPayload,
  QueuePayload,
  TaskInfo,
} from "./types";

/** Error carrying the server's status code and detail message. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = typeof fetch;

/** Thin typed client over the review service JSON API. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listTasks(): Promise<TaskInfo[]> {
    return this.request<TaskInfo[]>("/api/tasks");
  }

  fetchQueue(task: string, limit = 1): Promise<QueuePayload> {
    const name = encodeURIComponent(task);
    return this.request<QueuePayload>(`/api/queue/${name}?limit=${limit}`);
  }

  submitAnnotation(
    task: string,
    caseId: string,
    reviewerId: string,
    labels: string[],
  ): Promise<AnnotationResponse> {
    return this.request<AnnotationResponse>("/api/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        task,
        case_id: caseId,
        reviewer_id: reviewerId,
        labels,
      }),
    });
  }

  fetchMetrics(task: string): Promise<MetricsPayload> {
    return this.request<MetricsPayload>(`/api/metrics/${encodeURIComponent(task)}`);
  }
}
