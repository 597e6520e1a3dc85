/**
 * What-if panel: iterative evidence entry against the inference service.
 * Enter partial evidence, read posterior condition/symptom probabilities
 * with 95% intervals, pin scenarios, and compare them side by side.
 */

import { ApiClient, ServiceError } from "./api.js";
import { validateEvidence } from "./schema.js";
import {
  FormState,
  ScenarioCard,
  emptyForm,
  formToEvidence,
  pinScenario,
} from "./state.js";
import { buildComparison, comparisonHtml, panelHtml } from "./render.js";
import type { EvidenceBody, ModelInfo, PredictResponse } from "./types.js";
import { MEASURE_ACTIVITY } from "./types.js";

const api = new ApiClient("");
let form: FormState = emptyForm();
let cards: ScenarioCard[] = [];
let symptomNames: string[] = [];
let lastResponse: PredictResponse | null = null;
let lastEvidence: EvidenceBody = {};

const el = (id: string) => document.getElementById(id)!;

function renderForm(info: ModelInfo) {
  symptomNames = info.encodings.symptoms;
  const bands = info.encodings.age_group.bands;
  el("confounds").innerHTML = `
    <label>age band
      <select id="age_group">
        <option value="">unknown</option>
        ${bands.map((b, i) => `<option value="${i}">${b}</option>`).join("")}
      </select>
    </label>
    <label>gender
      <select id="gender">
        <option value="">unknown</option>
        <option value="0">male</option>
        <option value="1">female</option>
      </select>
    </label>
    <label>device
      <select id="device">
        <option value="">unknown</option>
        <option value="0">smartphone</option>
        <option value="1">PC</option>
      </select>
    </label>`;

  el("symptoms").innerHTML = symptomNames
    .map(
      (name, i) => `
      <label class="tri">${name}
        <select data-symptom="${i}">
          <option value="unknown">unknown</option>
          <option value="low">low</option>
          <option value="high">high</option>
        </select>
      </label>`
    )
    .join("");

  el("activities").innerHTML = Object.entries(MEASURE_ACTIVITY)
    .map(
      ([activity, indices]) => `
      <fieldset class="activity" data-activity="${activity}">
        <legend>
          <label><input type="checkbox" data-toggle="${activity}"> ${activity} performed</label>
        </legend>
        <div class="measure-grid" data-measures="${activity}" hidden>
          ${indices
            .map(
              (i) =>
                `<label>m${i}<input type="text" inputmode="decimal" data-measure="${i}" placeholder="0.0"></label>`
            )
            .join("")}
        </div>
      </fieldset>`
    )
    .join("");
}

function readForm(): FormState {
  const next = emptyForm();
  for (const key of ["age_group", "gender", "device"] as const) {
    const value = (el(key) as HTMLSelectElement).value;
    next[key] = value === "" ? null : Number(value);
  }
  document.querySelectorAll<HTMLSelectElement>("[data-symptom]").forEach((sel) => {
    next.symptoms[Number(sel.dataset.symptom)] = sel.value as FormState["symptoms"][number];
  });
  document.querySelectorAll<HTMLInputElement>("[data-toggle]").forEach((box) => {
    next.activityEnabled[box.dataset.toggle!] = box.checked;
  });
  document.querySelectorAll<HTMLInputElement>("[data-measure]").forEach((input) => {
    next.measureText[Number(input.dataset.measure)] = input.value;
  });
  return next;
}

function showErrors(messages: string[]) {
  el("errors").innerHTML = messages
    .map((m) => `<div class="error">${m}</div>`)
    .join("");
}

async function submit() {
  form = readForm();
  document.querySelectorAll(".invalid").forEach((node) => node.classList.remove("invalid"));
  const built = formToEvidence(form);
  if (!built.ok) {
    for (const err of built.errors) {
      const idx = err.field.replace("measure_", "");
      document
        .querySelector(`[data-measure="${idx}"]`)
        ?.classList.add("invalid");
    }
    showErrors(built.errors.map((e) => e.message));
    return; // invalid fields highlighted, no request sent
  }
  const checked = validateEvidence(built.evidence);
  if (!checked.ok) {
    showErrors(checked.issues.map((i) => `${i.path}: ${i.message}`));
    return;
  }
  showErrors([]);
  el("panel").innerHTML = '<p class="hint">querying&hellip;</p>';
  try {
    const response = await api.predict(checked.evidence);
    lastResponse = response;
    lastEvidence = checked.evidence;
    el("panel").innerHTML = panelHtml(response, symptomNames);
  } catch (err) {
    const detail =
      err instanceof ServiceError ? `service ${err.status}: ${err.message}` : String(err);
    el("panel").innerHTML = "";
    showErrors([detail]);
    el("errors").insertAdjacentHTML(
      "beforeend",
      '<button id="retry" type="button">retry</button>'
    );
    el("retry").addEventListener("click", submit);
  }
}

function pinCurrent() {
  if (!lastResponse) return;
  const label = String.fromCharCode(65 + (cards.length % 26));
  cards = pinScenario(cards, label, lastEvidence, lastResponse);
  el("comparison").innerHTML = comparisonHtml(
    buildComparison(cards, "condition", symptomNames)
  );
}

async function boot() {
  try {
    const info = (await api.model()) as ModelInfo;
    renderForm(info);
  } catch (err) {
    showErrors([`cannot load model metadata: ${String(err)}`]);
    return;
  }
  el("form-root").addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches("[data-toggle]")) {
      const activity = (target as HTMLInputElement).dataset.toggle!;
      const grid = document.querySelector<HTMLElement>(`[data-measures="${activity}"]`)!;
      grid.hidden = !(target as HTMLInputElement).checked;
    }
    void submit();
  });
  el("pin").addEventListener("click", pinCurrent);
  el("clear-pins").addEventListener("click", () => {
    cards = [];
    el("comparison").innerHTML = comparisonHtml([]);
  });
  await submit(); // empty form: prior-predictive display
}

void boot();
