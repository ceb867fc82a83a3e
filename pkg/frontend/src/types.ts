// Payload shapes of the scoring API (all responses arrive in an envelope).

export type Envelope<T> =
  | { ok: true; data: T }
  | { ok: false; error: { code: string; message: string } };

export type SessionSummary = {
  session_id: string;
  views: string[];
  n_cases: number;
  n_events: number;
  feature_catalog: FeatureInfo[];
  warnings: NormWarning[];
  log_digest: string;
  norm_digest: string;
  created: string;
};

export type FeatureInfo = {
  name: string;
  level: "case" | "event";
  kind: "categorical" | "numeric" | "timestamp";
  distinct_values: number;
};

export type NormWarning = {
  view: string;
  layer: string;
  activity: string;
  message: string;
};

export type HeatmapData = {
  feature: string;
  columns: string[];
  rows: string[];
  cells: number[][];
  volumes: number[];
};

export type FilterBody = {
  equals: [string, string][];
  score_quantile: number | null;
};

export type ScoreRow = {
  case_id: string;
  view: string;
  penalty: number;
  score: number;
  normalized_score: number;
  [key: string]: unknown;
};

export type ScorePage = {
  view: string;
  offset: number;
  limit: number;
  total: number;
  rows: ScoreRow[];
};

export type FindingRow = {
  rank: number;
  feature: string;
  value: string;
  layer: string;
  deficit: number;
  n_cases: number;
  statement: string;
};

export type NormDocument = {
  views: NormViewDocument[];
  metadata?: Record<string, string>;
};

export type NormViewDocument = {
  name: string;
  description?: string;
  weights: Record<string, number>;
  constraints: Record<string, unknown>;
  element_weights?: Record<string, Record<string, number>>;
};
