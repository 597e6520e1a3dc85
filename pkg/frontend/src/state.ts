/**
 * Evidence form state and pinned scenario cards.
 *
 * Symptom entries are tri-state (unknown / low / high) because absence of
 * evidence and a "low" answer mean different things to the model. An
 * activity is entered wholesale: either all of its measures carry values or
 * the activity is marked not performed.
 */

import type { EvidenceBody, PredictResponse } from "./types.js";
import { MEASURE_ACTIVITY } from "./types.js";

export type TriState = "unknown" | "low" | "high";

export type FormState = {
  age_group: number | null;
  gender: number | null;
  device: number | null;
  symptoms: TriState[]; // length 8
  activityEnabled: Record<string, boolean>;
  measureText: string[]; // length 16, raw field contents
};

export function emptyForm(): FormState {
  return {
    age_group: null,
    gender: null,
    device: null,
    symptoms: Array(8).fill("unknown"),
    activityEnabled: { nback: false, image: false, paragraph: false },
    measureText: Array(16).fill(""),
  };
}

export type FieldError = { field: string; message: string };

export function formToEvidence(
  form: FormState
): { ok: true; evidence: EvidenceBody } | { ok: false; errors: FieldError[] } {
  const errors: FieldError[] = [];
  const evidence: EvidenceBody = {};
  if (form.age_group !== null) evidence.age_group = form.age_group;
  if (form.gender !== null) evidence.gender = form.gender;
  if (form.device !== null) evidence.device = form.device;

  const symptoms: Record<string, number> = {};
  form.symptoms.forEach((tri, i) => {
    if (tri !== "unknown") symptoms[String(i)] = tri === "high" ? 1 : 0;
  });
  if (Object.keys(symptoms).length) evidence.symptoms = symptoms;

  const measures: Record<string, number> = {};
  for (const [activity, indices] of Object.entries(MEASURE_ACTIVITY)) {
    if (!form.activityEnabled[activity]) continue;
    for (const idx of indices) {
      const text = form.measureText[idx].trim();
      if (text === "") {
        errors.push({
          field: `measure_${idx}`,
          message: `${activity} measure ${idx} is enabled but empty`,
        });
        continue;
      }
      const value = Number(text);
      if (!Number.isFinite(value)) {
        errors.push({
          field: `measure_${idx}`,
          message: `${activity} measure ${idx}: "${text}" is not a number`,
        });
        continue;
      }
      measures[String(idx)] = value;
    }
  }
  if (Object.keys(measures).length) evidence.measures = measures;

  if (errors.length) return { ok: false, errors };
  return { ok: true, evidence };
}

export type ScenarioCard = {
  label: string;
  evidence: EvidenceBody;
  response: PredictResponse;
  pinnedAt: string; // ISO timestamp
};

export function pinScenario(
  cards: readonly ScenarioCard[],
  label: string,
  evidence: EvidenceBody,
  response: PredictResponse,
  now: () => string = () => new Date().toISOString()
): ScenarioCard[] {
  const card: ScenarioCard = {
    label,
    evidence: structuredClone(evidence),
    response: structuredClone(response),
    pinnedAt: now(),
  };
  return [...cards, Object.freeze(card)];
}

export function evidenceSize(evidence: EvidenceBody): number {
  let n = 0;
  for (const key of ["age_group", "gender", "device", "condition"] as const) {
    if (evidence[key] !== undefined) n += 1;
  }
  n += Object.keys(evidence.symptoms ?? {}).length;
  n += Object.keys(evidence.measures ?? {}).length;
  return n;
}
