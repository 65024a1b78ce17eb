import pytest

from nearperfect.bits import from_string as b
from nearperfect.forest import ContractError, LabeledForest, StepKind, TraceStep
from nearperfect.generator import plant
from nearperfect.instance import Component, PartitionState
from nearperfect.oracle import verify
from nearperfect.solver import (
    SolverConfig, bound, is_simple, merge, paste_a_leaf, pluck_a_leaf, simple_coordinates, solve,
    solve_with_q, split,
)

from tests.conftest import mat


def state(*groups):
    d = len(groups[0][0])
    return PartitionState(tuple(Component.from_points([b(r) for r in g], d) for g in groups))


def point_sets(p):
    return [c.point_set for c in p.components]


class TestPluck:
    def test_path_merges(self):
        x, i, p = pluck_a_leaf(state(["000", "100", "110", "111"]))
        assert (x, i) == (b("000"), 0)
        assert point_sets(p) == [{b("100"), b("110"), b("111")}]

    def test_two_points_zero_side(self):
        x, i, p = pluck_a_leaf(state(["0", "1"]))
        assert (x, i) == (b("0"), 0)
        assert point_sets(p) == [{b("1")}]

    def test_square_stuck(self):
        assert pluck_a_leaf(state(["00", "01", "10", "11"])) is None

    def test_drops_columns_made_constant(self):
        # 000 merges into 100; coordinate 1 is constant throughout
        x, i, p = pluck_a_leaf(state(["000", "100", "101"]))
        c = p.components[0]
        assert c.coords.tolist() == [2]
        assert c.fixed == b("100")


class TestPaste:
    def test_single(self):
        f = LabeledForest(3, [b("100")])
        paste_a_leaf(f, TraceStep(StepKind.PLUCK, b("000"), 0))
        assert f.nodes == {b("000"), b("100")}
        assert f.edges == {(b("000"), b("100"), 0)}

    def test_missing_partner(self):
        f = LabeledForest(3, [b("110")])
        with pytest.raises(ContractError):
            paste_a_leaf(f, TraceStep(StepKind.PLUCK, b("000"), 0))

    def test_chain_rebuilds_path(self):
        p = state(["000", "100", "110", "111"])
        trace = []
        while (hit := pluck_a_leaf(p)) is not None:
            x, i, p = hit
            trace.append(TraceStep(StepKind.PLUCK, x, i))
        assert len(trace) == 3
        f = LabeledForest(3, p.components[0].points)
        for step in reversed(trace):
            paste_a_leaf(f, step)
        assert f.cost == 3
        assert verify(f, mat("000", "100", "110", "111")).valid


class TestSplit:
    def test_path_coordinate_2(self):
        x, x_bar, p = split(2, state(["000", "100", "110", "111"]))
        assert (x, x_bar) == (b("110"), b("111"))
        assert point_sets(p) == [{b("000"), b("100"), b("110")}, {b("111")}]

    def test_vacuous_pattern_singleton_sides(self):
        # the empty pattern matches everything; each side holds one point, so it is unique
        x, x_bar, p = split(0, state(["01", "10"]))
        assert (x, x_bar) == (b("01"), b("11"))
        assert point_sets(p) == [{b("01")}, {b("10"), b("11")}]

    def test_square(self):
        assert split(0, state(["00", "01", "10", "11"])) is None

    def test_inactive_raises(self):
        with pytest.raises(ContractError):
            split(1, state(["000", "001"]))

    def test_merge_reconnects(self):
        f = LabeledForest(3, [b("110"), b("111")])
        merge(f, TraceStep(StepKind.SPLIT, b("110"), 2, b("111")))
        assert f.edges == {(b("110"), b("111"), 2)}

    @pytest.mark.parametrize("i, rows, expect", [
        (2, ["000", "100", "110", "111"], True),
        (0, ["00", "01", "10", "11"], False),
        (1, ["000", "001"], False),
    ])
    def test_is_simple(self, i, rows, expect):
        assert is_simple(i, state(rows)) is expect

    def test_simple_coordinates_agree_with_split(self):
        for s in range(10):
            m = plant(30, 2, 12, s).matrix
            p = PartitionState.initial(m)
            fast = simple_coordinates(p)
            slow = [i for i in range(m.d) if is_simple(i, p)]
            assert fast == slow


class TestSolve:
    def test_perfect_path(self, path3):
        for seed in range(5):
            r = solve_with_q(path3, 0, seed)
            assert r.cost == 3 and r.splits == 0

    def test_square_general(self, square):
        r = solve_with_q(square, 1, 0, "general")
        assert r.cost == 3
        assert verify(r.forest, square).valid

    def test_single_terminal(self):
        r = solve(mat("0101"))
        assert r.cost == 0 and r.forest.nodes == {b("0101")}

    def test_planted_perfect(self):
        m = plant(16, 0, 10, 3).matrix
        r = solve(m)
        assert (r.cost, r.q_used, r.met_bound) == (16, 0, True)

    def test_planted_q1_d50(self):
        m = plant(50, 1, 20, 0).matrix
        r = solve(m, SolverConfig(q_override=1))
        assert r.cost <= 92
        assert r.cost <= 55

    def test_lower_bounds(self):
        for s in range(10):
            m = plant(40, 2, 15, s).matrix
            r = solve(m, SolverConfig(seed=s))
            assert r.cost >= m.d
            assert r.cost >= r.mst_cost / 2

    def test_bound_formula(self):
        assert bound(2, 1) == 44
        assert bound(100, 0) == 100

    def test_deterministic(self):
        m = plant(60, 2, 20, 5).matrix
        a = solve(m, SolverConfig(seed=9))
        c = solve(m, SolverConfig(seed=9))
        assert a.forest.sorted_edges() == c.forest.sorted_edges()

    def test_simple_mode(self):
        m = plant(40, 1, 15, 2).matrix
        r = solve(m, SolverConfig(mode="simple", q_override=1))
        assert verify(r.forest, m).valid

    @pytest.mark.parametrize("kw", [{"restarts_per_q": 0}, {"q_override": -1}, {"mode": "fast"}])
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)
