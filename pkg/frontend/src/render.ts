/**
 * Pure render models and HTML templates.
 *
 * The UI performs no probability math: every displayed number is carried
 * verbatim from a service response. Render models keep the raw values plus
 * their exact JSON serialization (data-exact attributes), so rendered output
 * is byte-traceable to the wire payload; bar geometry is layout only.
 */

import type { PredictResponse, TargetSummary } from "./types.js";
import { isBinaryTarget } from "./types.js";
import type { ScenarioCard } from "./state.js";

export type IntervalRow = {
  target: string;
  label: string;
  mean: number;
  lower: number;
  upper: number;
  meanExact: string;
  lowerExact: string;
  upperExact: string;
};

export function targetLabel(target: string, symptomNames: string[]): string {
  if (target === "condition") return "depression (PHQ-8 ≥ 10)";
  const m = target.match(/^s(\d+)$/);
  if (m) {
    const idx = Number(m[1]);
    return symptomNames[idx] ? `${symptomNames[idx]} (s${idx})` : target;
  }
  return target;
}

export function buildIntervalRows(
  response: PredictResponse,
  symptomNames: string[]
): IntervalRow[] {
  const rows: IntervalRow[] = [];
  for (const [target, summary] of Object.entries(response.targets)) {
    if (!isBinaryTarget(summary)) continue; // age distribution rendered apart
    rows.push({
      target,
      label: targetLabel(target, symptomNames),
      mean: summary.mean,
      lower: summary.ci95[0],
      upper: summary.ci95[1],
      meanExact: JSON.stringify(summary.mean),
      lowerExact: JSON.stringify(summary.ci95[0]),
      upperExact: JSON.stringify(summary.ci95[1]),
    });
  }
  const order = (t: string) => (t === "condition" ? -1 : Number(t.slice(1)));
  rows.sort((a, b) => order(a.target) - order(b.target));
  return rows;
}

const pct = (v: number) => `${(100 * v).toFixed(1)}%`;

export function intervalBarHtml(row: IntervalRow): string {
  const left = (100 * row.lower).toFixed(3);
  const width = Math.max(0.5, 100 * (row.upper - row.lower)).toFixed(3);
  const mean = (100 * row.mean).toFixed(3);
  return `
    <div class="target-row" data-target="${row.target}"
         data-exact-mean="${row.meanExact}"
         data-exact-lower="${row.lowerExact}"
         data-exact-upper="${row.upperExact}">
      <div class="target-label" title="mean ${row.meanExact}, 95% CI [${row.lowerExact}, ${row.upperExact}]">${row.label}</div>
      <div class="bar-track">
        <div class="bar-ci" style="left:${left}%;width:${width}%"></div>
        <div class="bar-mean" style="left:${mean}%"></div>
      </div>
      <div class="target-value">${pct(row.mean)}
        <span class="ci">[${pct(row.lower)}, ${pct(row.upper)}]</span>
      </div>
    </div>`;
}

export function panelHtml(response: PredictResponse, symptomNames: string[]): string {
  const rows = buildIntervalRows(response, symptomNames);
  return rows.map(intervalBarHtml).join("\n");
}

export type ComparisonEntry = {
  label: string;
  evidenceCount: number;
  row: IntervalRow;
  pinnedAt: string;
};

export function buildComparison(
  cards: readonly ScenarioCard[],
  target: string,
  symptomNames: string[]
): ComparisonEntry[] {
  const entries: ComparisonEntry[] = [];
  for (const card of cards) {
    const summary: TargetSummary | undefined = card.response.targets[target];
    if (!summary || !isBinaryTarget(summary)) continue;
    entries.push({
      label: card.label,
      evidenceCount: countEvidence(card),
      pinnedAt: card.pinnedAt,
      row: {
        target,
        label: targetLabel(target, symptomNames),
        mean: summary.mean,
        lower: summary.ci95[0],
        upper: summary.ci95[1],
        meanExact: JSON.stringify(summary.mean),
        lowerExact: JSON.stringify(summary.ci95[0]),
        upperExact: JSON.stringify(summary.ci95[1]),
      },
    });
  }
  // x-axis ordered by how much evidence each scenario carries (A -> D style)
  entries.sort((a, b) => a.evidenceCount - b.evidenceCount);
  return entries;
}

function countEvidence(card: ScenarioCard): number {
  const ev = card.evidence;
  let n = 0;
  for (const key of ["age_group", "gender", "device", "condition"] as const) {
    if (ev[key] !== undefined) n += 1;
  }
  n += Object.keys(ev.symptoms ?? {}).length;
  n += Object.keys(ev.measures ?? {}).length;
  return n;
}

export function comparisonHtml(entries: ComparisonEntry[]): string {
  if (!entries.length) return '<p class="hint">Pin a scenario to compare.</p>';
  return entries
    .map(
      (e) => `
    <div class="compare-card" data-label="${e.label}"
         data-exact-mean="${e.row.meanExact}"
         data-exact-lower="${e.row.lowerExact}"
         data-exact-upper="${e.row.upperExact}">
      <div class="compare-label">${e.label}
        <span class="hint">${e.evidenceCount} evidence values</span>
      </div>
      ${intervalBarHtml(e.row)}
    </div>`
    )
    .join("\n");
}
