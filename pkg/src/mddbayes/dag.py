"""Directed acyclic graph over the binarized symptom variables.

Adjacency convention: ``adjacency[j, s] == 1`` means symptom ``j`` is a
parent of symptom ``s``. ``order`` is a topological order of the graph and
fixes the ancestral sampling order; parent blocks in the model weights are
ordered by ascending parent index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DagError, StructuralError


@dataclass(frozen=True)
class SymptomDag:
    adjacency: np.ndarray  # (d, d) 0/1, [j, s] = 1 iff j -> s
    order: tuple[int, ...]

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=np.int8)  # copy: frozen below
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise StructuralError(f"adjacency must be square, got shape {adj.shape}")
        adj.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        validate_dag(self)

    @property
    def n_symptoms(self) -> int:
        return self.adjacency.shape[0]

    def parents(self, s: int) -> tuple[int, ...]:
        """Parent indices of symptom s, ascending."""
        return tuple(int(j) for j in np.flatnonzero(self.adjacency[:, s]))

    def k(self, s: int) -> int:
        return int(self.adjacency[:, s].sum())

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum())

    def to_dict(self) -> dict:
        return {
            "adjacency": self.adjacency.astype(int).tolist(),
            "order": list(self.order),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SymptomDag":
        return cls(adjacency=np.asarray(d["adjacency"]), order=tuple(d["order"]))


def empty_dag(n_symptoms: int) -> SymptomDag:
    return SymptomDag(
        adjacency=np.zeros((n_symptoms, n_symptoms), dtype=np.int8),
        order=tuple(range(n_symptoms)),
    )


def validate_dag(dag: SymptomDag) -> None:
    """Check acyclicity (Kahn's algorithm) and that `order` sorts the graph.

    Raises DagError naming the failure: a cycle, or an order that is not a
    permutation / not topological.
    """
    adj = np.asarray(dag.adjacency)
    d = adj.shape[0]
    if not np.isin(adj, (0, 1)).all():
        raise StructuralError("adjacency entries must be 0 or 1")
    if np.any(np.diag(adj) != 0):
        raise DagError("self-loop detected")

    # Kahn: repeatedly remove zero-in-degree nodes.
    indeg = adj.sum(axis=0).astype(int)
    frontier = [i for i in range(d) if indeg[i] == 0]
    removed = 0
    while frontier:
        j = frontier.pop()
        removed += 1
        for s in np.flatnonzero(adj[j]):
            indeg[s] -= 1
            if indeg[s] == 0:
                frontier.append(int(s))
    if removed != d:
        raise DagError("cycle detected in symptom adjacency")

    if sorted(dag.order) != list(range(d)):
        raise DagError(f"order {dag.order} is not a permutation of 0..{d - 1}")
    pos = {node: i for i, node in enumerate(dag.order)}
    for j, s in zip(*np.nonzero(adj)):
        if pos[int(j)] >= pos[int(s)]:
            raise DagError(f"order inconsistent with edge {int(j)}->{int(s)}")
