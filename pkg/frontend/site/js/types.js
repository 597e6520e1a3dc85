export function isBinaryTarget(t) {
    return typeof t.mean === "number";
}
export const SYMPTOM_COUNT = 8;
export const MEASURE_COUNT = 16;
export const MEASURE_ACTIVITY = {
    nback: [0, 1],
    image: [2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
    paragraph: [12, 13, 14, 15],
};
