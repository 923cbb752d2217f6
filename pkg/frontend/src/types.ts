// Payload shapes of the review service HTTP API.

export interface TaskInfo {
  task: string;
  labels: string[];
  queue_size: number;
  pending: number;
  annotated: number;
  t_low: number;
  t_high: number;
}

export interface ReviewCase {
  id: string;
  text: string;
  scores: number[];
  labels: string[];
  status: "pending" | "annotated";
}

export interface QueuePayload {
  task: string;
  t_low: number;
  t_high: number;
  labels: string[];
  pending: number;
  cases: ReviewCase[];
}

export interface AnnotationEvent {
  task: string;
  case_id: string;
  reviewer_id: string;
  labels: string[];
  timestamp: string;
}

export interface AnnotationResponse {
  event: AnnotationEvent;
  pending: number;
}

export interface TriageReportPayload {
  task: string;
  uncertain_pct: number;
  auto_accuracy: number | null;
  auto_recall: number | null;
  full_accuracy: number;
  n_total: number;
  n_high_confidence: number;
  n_low_confidence: number;
}

export interface MetricsPayload {
  task: string;
  triage: TriageReportPayload | null;
  consistency: number | null;
  consistency_cases: number;
  pending: number;
  annotated: number;
}
