import pytest

from nearperfect.basecase import (
    ContractionMap, SyntheticEndpointPair, base_case, contract, expand, hamming_mst, reconnect,
    split_heavy,
)
from nearperfect.bits import from_string as b
from nearperfect.forest import ContractError, LabeledForest, StepKind, TraceStep
from nearperfect.instance import Component, PartitionState, Pattern
from nearperfect.oracle import verify

from tests.conftest import mat


def comp(*rows):
    return Component.from_points([b(r) for r in rows], len(rows[0]))


class TestContract:
    def test_example(self):
        c, cmap = contract(comp("000", "110", "111"))
        assert c.point_set == {b("000"), b("100"), b("101")}    # coordinate 1 hidden
        assert cmap.weight == {0: 2, 2: 1}

    def test_identity(self):
        c0 = comp("000", "100", "110", "111")
        c, cmap = contract(c0)
        assert c is c0
        assert cmap.hidden_mask == 0
        assert set(cmap.weight.values()) == {1}

    def test_complement_flag(self):
        c, cmap = contract(comp("01", "10"))
        (rep, members, flipped), = cmap.classes
        assert (rep, members, flipped) == (0, (0, 1), frozenset({1}))
        assert cmap.lift(b("00")) == b("01")
        assert cmap.lift(b("10")) == b("10")

    def test_lift_inverts(self):
        c0 = comp("0110", "1001", "1111", "0000")
        c, cmap = contract(c0)
        assert {cmap.lift(x) for x in c.points} == c0.point_set


class TestSplitHeavy:
    def test_example(self):
        c, cmap = contract(comp("000", "110", "111"))
        pieces, pairs, steps = split_heavy(c, cmap, 1)
        assert pairs == []
        # both sides hold a unique match (000 and 100); the zero side is taken
        assert steps == [TraceStep(StepKind.SPLIT, b("000"), 0, b("100"))]
        assert [p.point_set for p in pieces] == [{b("000")}, {b("100"), b("101")}]

    def test_light_classes_untouched(self):
        c, cmap = contract(comp("000", "110", "111"))
        pieces, pairs, steps = split_heavy(c, cmap, 2)
        assert pieces == [c] and pairs == [] and steps == []

    def test_synthetic_pair(self):
        # class {0,1} (weight 2); no unique pattern match on either side
        c, cmap = contract(comp("0000", "0001", "0010", "1100", "1101", "1110"))
        pieces, pairs, steps = split_heavy(c, cmap, 1)
        assert steps == []
        (pair,) = pairs
        assert pair.i == 0
        assert bin(pair.y ^ pair.y_bar).count("1") == 1
        assert pair.y_bar in pieces[1].point_set and pair.y in pieces[0].point_set


class TestMST:
    def test_square(self):
        f = hamming_mst(comp("00", "01", "10", "11"))
        assert f.cost == 3

    def test_pair_path(self):
        f = hamming_mst(comp("000", "111"))
        assert f.sorted_edges() == [(b("000"), b("100"), 0), (b("100"), b("110"), 1), (b("110"), b("111"), 2)]

    def test_singleton(self):
        assert hamming_mst(comp("101")).cost == 0

    def test_weighted_matches_original_metric(self):
        c0 = comp("0000", "1100", "1111", "0011", "1000")
        c, cmap = contract(c0)
        f = expand(hamming_mst(c, cmap.coordinate_weights), cmap)
        assert f.cost == hamming_mst(c0).cost


class TestReconnect:
    def test_joins(self):
        f1, f2 = LabeledForest(3, [b("110")]), LabeledForest(3, [b("111")])
        out = reconnect([f1, f2], [], [TraceStep(StepKind.SPLIT, b("110"), 2, b("111"))])
        assert out.edges == {(b("110"), b("111"), 2)}

    def test_union_and_count(self):
        f1 = hamming_mst(comp("000", "001"))
        f2 = hamming_mst(comp("110", "111"))
        pair = SyntheticEndpointPair(b("000"), b("100"), 0, Pattern(3, 0, 0))
        with pytest.raises(ContractError):
            reconnect([f1, f2], [pair], [])    # 100 is not in either forest
        f2.add_path(b("100"), b("110"))
        out = reconnect([f1, f2], [pair], [])
        assert out.cost == f1.cost + f2.cost + 1
        assert len(list(out.trees())) == 1

    def test_no_pairs(self):
        f1, f2 = LabeledForest(2, [b("00")]), LabeledForest(2, [b("11")])
        assert reconnect([f1, f2], [], []).nodes == {b("00"), b("11")}


class TestExpand:
    def test_class_edge_becomes_path(self):
        cmap = ContractionMap(3, ((0, (0, 1), frozenset()), (2, (2,), frozenset())))
        f = LabeledForest(3, [b("000"), b("100")], [(b("000"), b("100"), 0)])
        out = expand(f, cmap)
        assert out.sorted_edges() == [(b("000"), b("100"), 0), (b("100"), b("110"), 1)]

    def test_identity(self):
        cmap = ContractionMap(2, ((0, (0,), frozenset()), (1, (1,), frozenset())))
        f = LabeledForest(2, [b("00"), b("01")], [(b("00"), b("01"), 1)])
        assert expand(f, cmap) is f

    def test_pipeline(self):
        m = mat("000", "110", "111")
        f = base_case(PartitionState.initial(m), 1)
        assert f.cost == 3
        assert verify(f, m).valid


def _base_state(m, q, seed):
    from nearperfect.solver import _initial_pass, _rng, _threshold, simple_coordinates, split

    run, rng = _initial_pass(m), _rng(seed, q, 0)
    while True:
        run.exhaust_plucks()
        pool = simple_coordinates(run.state)
        if len(pool) < _threshold(q, "general") or run.splits >= 4 * max(q, 1):
            return run.state
        i = pool[int(rng.integers(len(pool)))]
        _, _, run.state = split(i, run.state)
        run.splits += 1


def test_heavy_classes_on_planted_instances():
    from nearperfect.bits import coord_bit, hamming
    from nearperfect.generator import plant

    heavy = synthetic = 0
    for s in range(60):
        q, d, n = 1 + s % 3, (30, 60, 120)[s % 3], (10, 20, 28)[(s // 3) % 3]
        p = plant(d, q, n, s)
        counts = p.witness.label_counts()
        bad = {j for j, k in counts.items() if k > 1}
        edge_of = {label: (u, v) for u, v, label in p.witness.edges if label not in bad}
        for c in _base_state(p.matrix, q, s).components:
            if len(c) < 2:
                continue
            cc, cmap = contract(c)
            _, pairs, _ = split_heavy(cc, cmap, q)
            for rep, members, _ in cmap.classes:
                if len(members) > q:
                    heavy += 1
                    assert rep not in bad
            for pair in pairs:
                synthetic += 1
                bit = coord_bit(d, pair.i)
                u, v = edge_of[pair.i]
                end = u if (u & bit) == (pair.y & bit) else v
                assert hamming(cmap.contract_point(end), pair.y) <= q
    assert heavy > 0 and synthetic > 0
