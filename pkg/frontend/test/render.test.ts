/**
 * Passthrough guarantee: every probability and interval endpoint in a
 * render model is the service JSON value, untouched.
 */

import { describe, expect, it } from "vitest";
import { buildIntervalRows, intervalBarHtml, panelHtml, targetLabel } from "../src/render.js";
import type { PredictResponse } from "../src/types.js";
import predictFixtures from "../fixtures/predict_fixtures.json";
import modelFixture from "../fixtures/model.json";

const symptomNames: string[] = modelFixture.encodings.symptoms;

describe("render passthrough", () => {
  it("carries all 20 fixture responses through verbatim", () => {
    expect(predictFixtures.fixtures).toHaveLength(20);
    for (const { response } of predictFixtures.fixtures) {
      const rows = buildIntervalRows(response as PredictResponse, symptomNames);
      expect(rows.length).toBeGreaterThan(0);
      for (const row of rows) {
        const summary = (response as PredictResponse).targets[row.target];
        if (typeof summary.mean !== "number") throw new Error("unexpected categorical");
        expect(row.mean).toBe(summary.mean);
        expect(row.lower).toBe(summary.ci95[0]);
        expect(row.upper).toBe(summary.ci95[1]);
        // exact strings round-trip to the identical double
        expect(JSON.parse(row.meanExact)).toBe(summary.mean);
        expect(JSON.parse(row.lowerExact)).toBe(summary.ci95[0]);
        expect(JSON.parse(row.upperExact)).toBe(summary.ci95[1]);
      }
    }
  });

  it("embeds exact values in the DOM template", () => {
    const { response } = predictFixtures.fixtures[7];
    const rows = buildIntervalRows(response as PredictResponse, symptomNames);
    const html = intervalBarHtml(rows[0]);
    expect(html).toContain(`data-exact-mean="${rows[0].meanExact}"`);
    expect(html).toContain(`data-exact-lower="${rows[0].lowerExact}"`);
    expect(html).toContain(`data-exact-upper="${rows[0].upperExact}"`);
  });

  it("orders condition first then symptoms by index", () => {
    const { response } = predictFixtures.fixtures[0];
    const rows = buildIntervalRows(response as PredictResponse, symptomNames);
    expect(rows[0].target).toBe("condition");
    const symptomRows = rows.slice(1).map((r) => r.target);
    expect(symptomRows).toEqual([...symptomRows].sort(
      (a, b) => Number(a.slice(1)) - Number(b.slice(1))
    ));
  });

  it("panel renders one row per binary target", () => {
    const { response } = predictFixtures.fixtures[0];
    const html = panelHtml(response as PredictResponse, symptomNames);
    const count = (html.match(/class="target-row"/g) ?? []).length;
    expect(count).toBe(Object.keys((response as PredictResponse).targets).length);
  });

  it("labels symptoms with their clinical names", () => {
    expect(targetLabel("s2", symptomNames)).toContain("sleep");
    expect(targetLabel("condition", symptomNames)).toContain("PHQ-8");
  });

  it("evidence echo in fixtures matches what was sent", () => {
    for (const { request, response } of predictFixtures.fixtures) {
      const sent = request.evidence as Record<string, unknown>;
      const echoed = (response as PredictResponse).evidence as Record<string, unknown>;
      for (const key of Object.keys(sent)) {
        expect(echoed[key]).toEqual(sent[key]);
      }
    }
  });
});
