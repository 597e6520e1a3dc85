import numpy as np
import pytest

from mddbayes.dag import SymptomDag, empty_dag, validate_dag
from mddbayes.errors import DagError, StructuralError

from conftest import random_dag


def test_empty_dag_identity_order_ok():
    dag = empty_dag(8)
    validate_dag(dag)
    assert dag.n_edges == 0
    assert all(dag.k(s) == 0 for s in range(8))


def test_two_cycle_rejected():
    adj = np.zeros((8, 8), dtype=int)
    adj[0, 1] = adj[1, 0] = 1
    with pytest.raises(DagError, match="cycle"):
        SymptomDag(adjacency=adj, order=tuple(range(8)))


def test_order_inconsistent_rejected():
    adj = np.zeros((8, 8), dtype=int)
    adj[1, 0] = 1  # 1 -> 0 but order puts 0 first
    with pytest.raises(DagError, match="order"):
        SymptomDag(adjacency=adj, order=tuple(range(8)))


def test_order_not_permutation_rejected():
    with pytest.raises(DagError):
        SymptomDag(adjacency=np.zeros((3, 3), dtype=int), order=(0, 0, 2))


def test_non_binary_adjacency_rejected():
    adj = np.zeros((3, 3))
    adj[0, 1] = 2
    with pytest.raises(StructuralError):
        SymptomDag(adjacency=adj, order=(0, 1, 2))


def test_random_triangular_dags_valid():
    # Construction guarantees acyclicity: lower-triangular under permutation.
    rng = np.random.Generator(np.random.PCG64(7))
    for _ in range(25):
        dag = random_dag(rng, d=8, p_edge=0.4)
        validate_dag(dag)
        k_total = sum(dag.k(s) for s in range(8))
        assert k_total == dag.n_edges


def test_parents_are_ascending():
    rng = np.random.Generator(np.random.PCG64(3))
    dag = random_dag(rng, d=8, p_edge=0.6)
    for s in range(8):
        parents = dag.parents(s)
        assert list(parents) == sorted(parents)


def test_roundtrip_dict():
    rng = np.random.Generator(np.random.PCG64(5))
    dag = random_dag(rng)
    again = SymptomDag.from_dict(dag.to_dict())
    assert np.array_equal(dag.adjacency, again.adjacency)
    assert dag.order == again.order
