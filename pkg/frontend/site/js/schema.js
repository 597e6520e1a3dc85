/**
 * Client-side evidence validation, mirroring the service's rules exactly:
 * the shared fixtures (evidence.schema.json / evidence_cases.json) are
 * asserted against both this validator and the live service, so neither
 * side can drift. Null values mean "unobserved" and are stripped.
 */
import { z } from "zod";
const code = (upper) => z.number().int().min(0).max(upper).nullish();
const indexRecord = (maxIndex, value) => z
    .record(z.string(), value)
    .superRefine((rec, ctx) => {
    for (const key of Object.keys(rec)) {
        const idx = Number(key);
        if (!Number.isInteger(idx) || String(idx) !== key || idx < 0 || idx > maxIndex) {
            ctx.addIssue({
                code: z.ZodIssueCode.custom,
                message: `index ${key} must be a canonical integer in 0..${maxIndex}`,
            });
        }
    }
});
export const evidenceSchema = z
    .object({
    age_group: code(3),
    gender: code(1),
    device: code(1),
    condition: code(1),
    symptoms: indexRecord(7, z.number().int().min(0).max(1).nullable()).optional(),
    measures: indexRecord(15, z.number().finite().nullable()).optional(),
})
    .strict();
function stripNulls(data) {
    const out = {};
    for (const key of ["age_group", "gender", "device", "condition"]) {
        const v = data[key];
        if (v !== null && v !== undefined)
            out[key] = v;
    }
    for (const key of ["symptoms", "measures"]) {
        const rec = data[key];
        if (!rec)
            continue;
        const clean = {};
        for (const [k, v] of Object.entries(rec)) {
            if (v !== null && v !== undefined)
                clean[k] = v;
        }
        if (Object.keys(clean).length)
            out[key] = clean;
    }
    return out;
}
export function validateEvidence(body) {
    const parsed = evidenceSchema.safeParse(body);
    if (parsed.success) {
        return { ok: true, evidence: stripNulls(parsed.data) };
    }
    return {
        ok: false,
        issues: parsed.error.issues.map((issue) => ({
            path: issue.path.join("."),
            message: issue.message,
        })),
    };
}
