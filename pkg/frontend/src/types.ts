// DTOs mirroring the service's JSON contracts. The dashboard never
// recomputes a metric: every number on screen originated in one of these.

export type Stage =
  | 'SurveyIntake'
  | 'ThresholdSpecification'
  | 'ProxyFeatureReview'
  | 'Inference'
  | 'CompositeScoring'
  | 'Complete';

export const STAGES: Stage[] = [
  'SurveyIntake',
  'ThresholdSpecification',
  'ProxyFeatureReview',
  'Inference',
  'CompositeScoring',
  'Complete',
];

export interface ApiError {
  code: string;
  message: string;
  details?: unknown;
}

export interface SurveyItem {
  id: string;
  domain: string;
  text: string;
  factor: 'process' | 'technical';
  weight: number;
}

export interface RiskProfile {
  domain_scores: Record<string, number>;
  process_score: number;
  technical_score: number;
  composite: number;
  category: string;
}

export interface ThresholdEntry {
  lower: number;
  upper: number;
  parity: number;
  provenance: string;
}

export interface ThresholdSpec {
  category: string;
  table_version: string;
  metrics: Record<string, ThresholdEntry>;
}

export interface ProxyFinding {
  feature: string;
  sensitive_attribute: string;
  association: number;
  measure: string;
  flagged: boolean;
  warning: string | null;
}

export interface DatasetPayload {
  dataset_fingerprint: string;
  n_rows: number;
  schema: ColumnSchema;
  proxy_findings: ProxyFinding[];
  proxy_threshold: number;
  rejected_rows: number[];
}

export interface ColumnSchema {
  feature_columns: string[];
  sensitive_columns: string[];
  label_column: string;
  prediction_column: string;
  score_column?: string | null;
}

export interface MetricResult {
  metric: string;
  attribute: string;
  value: number | null;
  ci_lower: number | null;
  ci_upper: number | null;
  defined: boolean;
  groups: Record<string, number | null>;
  warning: string | null;
}

export interface SubgroupRow {
  subgroup: string;
  n: number;
  fpr: number | null;
  fnr: number | null;
}

export interface InferencePayload {
  seed: number;
  replicates: number;
  level: number;
  with_ci: boolean;
  fairness: MetricResult[];
  performance: MetricResult[];
  subgroup_rates: SubgroupRow[];
  warnings: string[];
}

export interface VerdictCheck {
  metric: string;
  attribute: string;
  value: number | null;
  defined: boolean;
  lower: number;
  upper: number;
  pass: boolean;
  reason: string;
}

export interface Verdict {
  checks: VerdictCheck[];
  overall_pass: boolean;
  bias_index: Record<string, number | null>;
  bi_metrics: string[];
  fairness_score: number | null;
  fairness_score_clamped: number | null;
  reference: Record<string, unknown>;
  warnings: string[];
}

export interface SessionState {
  schema_version: number;
  session_id: string;
  created_at: string;
  updated_at: string;
  stage: Stage;
  revision: number;
  payloads: {
    SurveyIntake?: { responses: { item_id: string; rating: number }[]; risk_profile: RiskProfile };
    ThresholdSpecification?: {
      model_profile: ModelProfile;
      sector_policy: SectorPolicy;
      threshold_spec: ThresholdSpec;
    };
    ProxyFeatureReview?: DatasetPayload;
    Inference?: InferencePayload;
    CompositeScoring?: { verdict: Verdict };
  };
}

export interface ModelProfile {
  model_type: string;
  task: string;
  purpose: string;
  intended_use: string;
  version: string;
}

export interface SectorPolicy {
  sector: string;
  selected_metrics?: string[];
  threshold_overrides?: Record<string, [number, number]>;
}

export interface PlotSeries {
  label: string;
  x: (string | number)[];
  y: (number | null)[];
  lower?: number[];
  upper?: number[];
}

export interface PlotData {
  kind: string;
  series: PlotSeries[];
  axes: Record<string, string>;
}
