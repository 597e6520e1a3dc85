export type EvidenceBody = {
  age_group?: number;
  gender?: number;
  device?: number;
  condition?: number;
  symptoms?: Record<string, number>;
  measures?: Record<string, number>;
};

export type BinaryTarget = {
  mean: number;
  ci95: [number, number];
};

export type CategoricalTarget = {
  mean: number[];
  ci95: [number[], number[]];
};

export type TargetSummary = BinaryTarget | CategoricalTarget;

export type PredictResponse = {
  targets: Record<string, TargetSummary>;
  evidence: EvidenceBody;
};

export type ScenarioInfo = {
  name: string;
  activities: string[];
  measure_indices: number[];
  symptoms: number[];
  targets: string[];
};

export type ModelInfo = {
  schema_version: number;
  encodings: {
    age_group: { bands: string[] };
    symptoms: string[];
    [key: string]: unknown;
  };
  dims: { age_groups: number; symptoms: number; measures: number };
  dag: { adjacency: number[][]; order: number[] };
};

export function isBinaryTarget(t: TargetSummary): t is BinaryTarget {
  return typeof t.mean === "number";
}

export const SYMPTOM_COUNT = 8;
export const MEASURE_COUNT = 16;

export const MEASURE_ACTIVITY: Record<string, number[]> = {
  nback: [0, 1],
  image: [2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
  paragraph: [12, 13, 14, 15],
};
