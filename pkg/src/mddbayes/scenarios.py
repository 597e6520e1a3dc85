"""Evidence-subset scenarios for evaluation and the what-if service.

Each scenario names which variable groups are observed at query time:
confounds (always), activity measure groups, and optionally one symptom.
Targets are condition plus every symptom not in the evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import StructuralError
from .types import ACTIVITIES, MEASURE_SLICES, N_SYMPTOMS, SYMPTOM_LABELS


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    activities: tuple[str, ...]  # whose measures are observed
    symptoms: tuple[int, ...] = ()  # observed symptom indices

    def __post_init__(self):
        for a in self.activities:
            if a not in ACTIVITIES:
                raise StructuralError(f"unknown activity {a!r}")
        for s in self.symptoms:
            if not 0 <= s < N_SYMPTOMS:
                raise StructuralError(f"symptom index {s} out of range")

    @property
    def measure_indices(self) -> tuple[int, ...]:
        out: list[int] = []
        for a in ACTIVITIES:  # fixed measure order regardless of listing order
            if a in self.activities:
                out.extend(MEASURE_SLICES[a])
        return tuple(out)

    @property
    def targets(self) -> tuple[str, ...]:
        return ("condition",) + tuple(
            f"s{i}" for i in range(N_SYMPTOMS) if i not in self.symptoms
        )


def full_scenario_grid() -> list[ScenarioSpec]:
    """The full evidence-subset grid: confounds only, single activities,
    activity pairs, all activities, and all activities plus one symptom."""
    out = [ScenarioSpec(name="confounds_only", activities=())]
    for a in ACTIVITIES:
        out.append(ScenarioSpec(name=f"confounds+{a}", activities=(a,)))
    for pair in combinations(ACTIVITIES, 2):
        out.append(ScenarioSpec(name="confounds+" + "+".join(pair), activities=pair))
    out.append(ScenarioSpec(name="all_activities", activities=ACTIVITIES))
    for s in range(N_SYMPTOMS):
        out.append(
            ScenarioSpec(
                name=f"all_activities+{SYMPTOM_LABELS[s]}",
                activities=ACTIVITIES,
                symptoms=(s,),
            )
        )
    return out


def trend_scenarios() -> list[ScenarioSpec]:
    """Minimal nested subset used for the evidence-amount trend check."""
    return [
        ScenarioSpec(name="confounds_only", activities=()),
        ScenarioSpec(name="confounds+nback", activities=("nback",)),
        ScenarioSpec(name="all_activities", activities=ACTIVITIES),
    ]
