/**
 * Evidence form state and pinned scenario cards.
 *
 * Symptom entries are tri-state (unknown / low / high) because absence of
 * evidence and a "low" answer mean different things to the model. An
 * activity is entered wholesale: either all of its measures carry values or
 * the activity is marked not performed.
 */
import { MEASURE_ACTIVITY } from "./types.js";
export function emptyForm() {
    return {
        age_group: null,
        gender: null,
        device: null,
        symptoms: Array(8).fill("unknown"),
        activityEnabled: { nback: false, image: false, paragraph: false },
        measureText: Array(16).fill(""),
    };
}
export function formToEvidence(form) {
    const errors = [];
    const evidence = {};
    if (form.age_group !== null)
        evidence.age_group = form.age_group;
    if (form.gender !== null)
        evidence.gender = form.gender;
    if (form.device !== null)
        evidence.device = form.device;
    const symptoms = {};
    form.symptoms.forEach((tri, i) => {
        if (tri !== "unknown")
            symptoms[String(i)] = tri === "high" ? 1 : 0;
    });
    if (Object.keys(symptoms).length)
        evidence.symptoms = symptoms;
    const measures = {};
    for (const [activity, indices] of Object.entries(MEASURE_ACTIVITY)) {
        if (!form.activityEnabled[activity])
            continue;
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
    if (Object.keys(measures).length)
        evidence.measures = measures;
    if (errors.length)
        return { ok: false, errors };
    return { ok: true, evidence };
}
export function pinScenario(cards, label, evidence, response, now = () => new Date().toISOString()) {
    const card = {
        label,
        evidence: structuredClone(evidence),
        response: structuredClone(response),
        pinnedAt: now(),
    };
    return [...cards, Object.freeze(card)];
}
export function evidenceSize(evidence) {
    let n = 0;
    for (const key of ["age_group", "gender", "device", "condition"]) {
        if (evidence[key] !== undefined)
            n += 1;
    }
    n += Object.keys(evidence.symptoms ?? {}).length;
    n += Object.keys(evidence.measures ?? {}).length;
    return n;
}
