/** Wire types for the hpolens HTTP API. Shapes mirror the service payloads. */

export interface RunSummary {
  id: string;
  name: string;
  objectives: ObjectiveInfo[];
  budgets: number[];
  n_trials: number;
  live: boolean;
}

export interface ObjectiveInfo {
  name: string;
  direction: 'min' | 'max';
  lower: number | null;
  upper: number | null;
}

export interface HyperparameterInfo {
  name: string;
  type: string;
  default: unknown;
  lower?: number | null;
  upper?: number | null;
  log_scale?: boolean;
  choices?: string[];
  condition?: { parent: string; values: unknown[] } | null;
}

export interface OverviewData {
  meta: { id: string; name: string; optimizer: string };
  objectives: ObjectiveInfo[];
  budgets: number[];
  space: { n_hyperparameters: number; hyperparameters: HyperparameterInfo[] };
  n_trials: number;
  n_configs: number;
  status_counts: {
    all: Record<string, number>;
    per_budget: { budget: number; counts: Record<string, number> }[];
  };
  best: { objective: string; config_id: string | null; value: number | null }[];
  duration: number | null;
}

export interface RunDetail extends OverviewData {
  registry_id: string;
  live: boolean;
}

export interface ConfigDetailData {
  config_id: string;
  values: Record<string, unknown>;
  encoded: number[];
  trials: {
    budget: number;
    status: string;
    seed: number | null;
    objectives: Record<string, number | null>;
    start: number;
    end: number | null;
  }[];
  incumbent: Record<string, boolean>;
}

export interface FootprintPoint {
  x: number;
  y: number;
  kind: 'evaluated' | 'incumbent' | 'border' | 'random_support';
  config_id: string | null;
  value: number | null;
}

export interface FootprintData {
  stress: number;
  points: FootprintPoint[];
}

export interface TrajectoryData {
  x_axis: 'trials' | 'time';
  xs: number[];
  ys: number[];
  std: number[] | null;
}

export interface ParetoData {
  objective_a: string;
  objective_b: string;
  points: {
    run_id: string;
    config_id: string;
    a: number;
    b: number;
    frontier: boolean;
  }[];
}

export interface ParallelData {
  axes: string[];
  config_ids: string[];
  lines: (number | string | null)[][];
}

export interface PdpData {
  name: string;
  grid: number[];
  display: (number | string)[];
  mean: number[];
  std: number[];
}

export interface ImportancesData {
  method: 'fanova' | 'lpi';
  objective: string;
  budget: number | string;
  names: string[];
  importance: number[];
  spread: number[];
}

export interface AblationData {
  origin: Record<string, unknown>;
  target: Record<string, unknown>;
  origin_prediction: number;
  steps: { name: string; value: unknown; prediction: number }[];
}

export interface BudgetCorrelationData {
  objective: string;
  budgets: number[];
  rho: (number | null)[][];
  n_common: number[][];
}

/** Envelope every finished job carries. */
export interface Payload<T = unknown> {
  plugin: string;
  run_ids: string[];
  params: Record<string, unknown>;
  data: T;
}

export type JobState = 'queued' | 'running' | 'finished' | 'failed';

export interface JobStatus {
  job_id: string;
  state: JobState;
  error?: string;
  result?: Payload;
}

export interface ApiErrorBody {
  error: { code: string; message: string; field?: string };
}
