import pytest

from nearperfect.generator import GenerationError, plant
from nearperfect.oracle import verify


def test_perfect_witness_uses_each_coordinate_once():
    for s in range(5):
        p = plant(30, 0, 12, s)
        assert p.witness.cost == 30
        assert set(p.witness.label_counts().values()) == {1}


def test_witness_invariants():
    for s in range(10):
        d, q = 40, s % 4
        p = plant(d, q, 15, s)
        counts = p.witness.label_counts()
        assert verify(p.witness, p.matrix).valid
        assert p.witness.cost == d + q
        assert sum(k - 1 for k in counts.values()) == q
        assert set(counts) == set(range(d))
        assert p.matrix.n == 15 and len(set(p.matrix.rows)) == 15


def test_deterministic():
    a, b = plant(50, 2, 20, 7), plant(50, 2, 20, 7)
    assert a.matrix == b.matrix
    assert a.witness.sorted_edges() == b.witness.sorted_edges()
    assert plant(50, 2, 20, 8).matrix != a.matrix


def test_no_constant_columns():
    for s in range(10):
        arr = plant(20, 3, 8, s).matrix.array()
        assert (arr.min(axis=0) == 0).all() and (arr.max(axis=0) == 1).all()


@pytest.mark.parametrize("d, q, n", [(0, 0, 2), (4, 2, 3), (10, 0, 1), (5, 1, 8), (3, -1, 2)])
def test_rejects_parameters(d, q, n):
    with pytest.raises(GenerationError):
        plant(d, q, n, 0)


def test_rejects_excess_with_few_terminals():
    with pytest.raises(GenerationError, match="n >= 4"):
        plant(10, 1, 3, 0)
