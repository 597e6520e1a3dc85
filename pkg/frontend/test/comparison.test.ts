/**
 * Scenario comparison: the A -> D evidence nesting renders four cards whose
 * values match the recorded service calls, ordered by evidence amount.
 */

import { describe, expect, it } from "vitest";
import { buildComparison, comparisonHtml } from "../src/render.js";
import { pinScenario, type ScenarioCard } from "../src/state.js";
import type { PredictResponse } from "../src/types.js";
import nesting from "../fixtures/nesting_fixture.json";
import modelFixture from "../fixtures/model.json";

const symptomNames: string[] = modelFixture.encodings.symptoms;

function pinAll(): ScenarioCard[] {
  let cards: ScenarioCard[] = [];
  let tick = 0;
  for (const step of nesting.steps) {
    cards = pinScenario(
      cards,
      step.label,
      step.request.evidence,
      step.response as PredictResponse,
      () => `2026-01-01T00:00:0${tick++}Z`
    );
  }
  return cards;
}

describe("scenario comparison", () => {
  it("renders four cards matching the service values exactly", () => {
    const cards = pinAll();
    const entries = buildComparison(cards, "condition", symptomNames);
    expect(entries).toHaveLength(4);
    for (const entry of entries) {
      const step = nesting.steps.find((s) => s.label === entry.label)!;
      const cond = (step.response as PredictResponse).targets.condition;
      if (typeof cond.mean !== "number") throw new Error("unexpected categorical");
      expect(entry.row.mean).toBe(cond.mean);
      expect(entry.row.lower).toBe(cond.ci95[0]);
      expect(entry.row.upper).toBe(cond.ci95[1]);
    }
  });

  it("orders cards monotonically by evidence count (A -> D)", () => {
    const entries = buildComparison(pinAll(), "condition", symptomNames);
    expect(entries.map((entry) => entry.label)).toEqual(["A", "B", "C", "D"]);
    const counts = entries.map((entry) => entry.evidenceCount);
    for (let i = 1; i < counts.length; i++) {
      expect(counts[i]).toBeGreaterThan(counts[i - 1]);
    }
  });

  it("duplicate evidence pinned twice yields identical bars", () => {
    const step = nesting.steps[1];
    let cards: ScenarioCard[] = [];
    cards = pinScenario(cards, "first", step.request.evidence,
      step.response as PredictResponse);
    cards = pinScenario(cards, "second", step.request.evidence,
      step.response as PredictResponse);
    const [a, b] = buildComparison(cards, "condition", symptomNames);
    expect(a.row.mean).toBe(b.row.mean);
    expect(a.row.meanExact).toBe(b.row.meanExact);
  });

  it("single card renders a single bar with its exact values", () => {
    const step = nesting.steps[0];
    const cards = pinScenario([], "A", step.request.evidence,
      step.response as PredictResponse);
    const entries = buildComparison(cards, "condition", symptomNames);
    expect(entries).toHaveLength(1);
    const html = comparisonHtml(entries);
    expect(html).toContain(`data-exact-mean="${entries[0].row.meanExact}"`);
  });

  it("pinned cards are immutable snapshots", () => {
    const step = nesting.steps[0];
    const evidence = structuredClone(step.request.evidence) as Record<string, number>;
    const cards = pinScenario([], "A", evidence, step.response as PredictResponse);
    evidence["age_group"] = 3; // mutate the source after pinning
    expect(cards[0].evidence).toEqual(step.request.evidence);
    expect(Object.isFrozen(cards[0])).toBe(true);
  });
});
