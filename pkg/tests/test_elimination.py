"""Tests for the elimination decomposition, residual synthesis, and rotation."""

import numpy as np
import pytest

from timeloom.core import (
    BeamSplitter,
    DimensionError,
    PhaseShifter,
    Swap,
    frob_distance,
    gates_matrix,
    haar_random_su,
    tmn_matrix,
)
from timeloom.elimination import (
    element_counts_elimination,
    eliminate,
    elimination_plan_from_json,
    elimination_plan_to_json,
    reconstruct_elimination,
    residual_block_steps,
    rotate_block_rows,
    synthesize_residual_wtilde,
    universal_unit_steps,
)

# The seven-mode, block-size-3 worked case: every nulled entry with the
# column pair that clears it, in sweep order.
GOLDEN_7_3 = {
    # round 1, universal units
    (1, 1): [((1, 7), (6, 7)), ((1, 6), (5, 6)), ((2, 7), (6, 7))],
    (1, 2): [((1, 5), (4, 5)), ((1, 4), (3, 4)), ((2, 5), (4, 5))],
    (1, 3): [((1, 3), (2, 3)), ((1, 2), (1, 2)), ((2, 3), (2, 3))],
    # round 2
    (2, 1): [((3, 7), (6, 7)), ((3, 6), (5, 6)), ((4, 7), (6, 7))],
    (2, 2): [((3, 5), (4, 5)), ((3, 4), (3, 4)), ((4, 5), (4, 5))],
    # round 3
    (3, 1): [((5, 7), (6, 7)), ((5, 6), (5, 6)), ((6, 7), (6, 7))],
}
GOLDEN_7_3_RESIDUAL = {
    (1, 1): [((2, 6), (4, 6))],
    (1, 2): [((2, 4), (2, 4))],
    (2, 1): [((4, 6), (4, 6))],
}

# The thirteen-mode, block-size-5 residual block: six entries cleared in the
# published order by the quoted column pairs.
GOLDEN_13_5_RESIDUAL_1 = [
    ((2, 10), (6, 10)),
    ((3, 11), (10, 11)),
    ((3, 10), (7, 10)),
    ((4, 12), (11, 12)),
    ((4, 11), (10, 11)),
    ((4, 10), (8, 10)),
]


class TestNullOrder:
    def test_seven_mode_universal_golden(self):
        for (r, j), expected in GOLDEN_7_3.items():
            steps = universal_unit_steps(7, 3, r, j)
            got = [((s.row, s.col), (s.cm, s.cn)) for s in steps]
            assert got == expected, (r, j)

    def test_seven_mode_residual_golden(self):
        for (r, p), expected in GOLDEN_7_3_RESIDUAL.items():
            steps = residual_block_steps(7, 3, r, p)
            got = [((s.row, s.col), (s.cm, s.cn)) for s in steps]
            assert got == expected, (r, p)

    def test_thirteen_mode_residual_golden(self):
        steps = residual_block_steps(13, 5, 1, 1)
        got = [((s.row, s.col), (s.cm, s.cn)) for s in steps]
        assert got == GOLDEN_13_5_RESIDUAL_1


class TestEliminate:
    def test_seven_mode_counts(self):
        plan = eliminate(haar_random_su(7, 42), 3)
        assert len(plan.v_blocks) == 6
        assert len(plan.w_blocks) == 3
        assert plan.k == 3
        nontrivial = sum(1 for p in plan.phases if abs(p) > 1e-9)
        assert plan.phases[0] == 0.0
        assert nontrivial == 6

    def test_thirteen_mode_counts_and_error(self):
        u = haar_random_su(13, 1)
        plan = eliminate(u, 5)
        assert plan.k == 3
        assert len(plan.v_blocks) == 6
        assert len(plan.w_blocks) == 3
        assert all(len(b.tunable) == 6 for b in plan.w_blocks)
        err = frob_distance(reconstruct_elimination(plan).data, u.data)
        assert err < 1e-10

    @pytest.mark.parametrize("n", [5, 7, 9, 13, 21])
    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_reconstruction_grid(self, n, m):
        if n < m:
            pytest.skip("n < m")
        u = haar_random_su(n, n * 100 + m)
        plan = eliminate(u, m)
        k = plan.k
        assert len(plan.v_blocks) == k * (k + 1) // 2
        assert len(plan.w_blocks) == k * (k - 1) // 2
        err = frob_distance(reconstruct_elimination(plan).data, u.data)
        assert err < 1e-10 * n

    @pytest.mark.parametrize("n,m", [(8, 4), (6, 3), (9, 4)])
    def test_padding_cases(self, n, m):
        u = haar_random_su(n, n + m)
        plan = eliminate(u, m)
        assert plan.padding > 0
        assert (plan.n_padded - 1) % (m - 1) == 0
        err = frob_distance(reconstruct_elimination(plan).data, u.data)
        assert err < 1e-10 * n

    def test_identity_plan_is_all_trivial(self):
        plan = eliminate(np.eye(7), 3)
        for blk in plan.v_blocks:
            for g in blk.gates:
                if isinstance(g, BeamSplitter):
                    assert g.theta == 0.0 and g.phi == 0.0
        assert all(abs(p) < 1e-12 for p in plan.phases)

    def test_rows_cleared_round_by_round(self):
        u = haar_random_su(13, 3)
        seen = {}
        eliminate(u, 3, on_round=lambda r, w: seen.__setitem__(r, w))
        m = 3
        for r, work in seen.items():
            rows = r * (m - 1)
            upper = np.triu(work[:rows, :], 1)[:rows, :]
            assert np.abs(upper).max() < 1e-12

    def test_final_state_diagonal_unit_modulus(self):
        u = haar_random_su(9, 5)
        seen = {}
        eliminate(u, 3, on_round=lambda r, w: seen.__setitem__(r, w))
        final = seen[max(seen)]
        off = final - np.diag(np.diag(final))
        assert np.abs(off).max() < 1e-12
        assert np.allclose(np.abs(np.diag(final)), 1.0, atol=1e-12)

    def test_block_gates_compose_to_matrices(self):
        plan = eliminate(haar_random_su(9, 8), 3)
        for blk in plan.v_blocks:
            assert frob_distance(gates_matrix(blk.gates, blk.dim), blk.matrix) < 1e-12
        for blk in plan.w_blocks:
            assert frob_distance(gates_matrix(blk.gates, blk.span), blk.matrix) < 1e-12

    def test_reck_specialization_m2(self):
        n = 6
        plan = eliminate(haar_random_su(n, 2), 2)
        assert all(b.dim == 2 for b in plan.v_blocks)
        assert all(len(b.gates) <= 2 for b in plan.v_blocks)  # one coupler (+ phase)
        assert all(b.gates == () for b in plan.w_blocks)
        total_bs = sum(
            sum(isinstance(g, BeamSplitter) for g in b.gates) for b in plan.v_blocks
        )
        assert total_bs == n * (n - 1) // 2

    def test_errors(self):
        with pytest.raises(DimensionError):
            eliminate(np.eye(3), 1)
        with pytest.raises(DimensionError):
            eliminate(np.eye(2), 3)

    def test_serialization_round_trip(self):
        u = haar_random_su(7, 77)
        plan = eliminate(u, 3)
        back = elimination_plan_from_json(elimination_plan_to_json(plan))
        assert back.n == plan.n and back.k == plan.k
        err = frob_distance(reconstruct_elimination(back).data, u.data)
        assert err < 1e-10
        # byte-deterministic serialization
        assert elimination_plan_to_json(back) == elimination_plan_to_json(plan)


class TestResidualSynthesis:
    @pytest.mark.parametrize("m,n_bs,n_swap", [(2, 0, 0), (3, 1, 2), (5, 6, 12), (7, 15, 30)])
    def test_gate_counts(self, m, n_bs, n_swap):
        rng = np.random.default_rng(m)
        angles = [(rng.uniform(0, np.pi / 2), rng.uniform(-np.pi, np.pi))
                  for _ in range((m - 1) * (m - 2) // 2)]
        blk = synthesize_residual_wtilde(m, angles)
        assert sum(isinstance(g, BeamSplitter) for g in blk.gates) == n_bs
        assert sum(isinstance(g, Swap) for g in blk.gates) == n_swap
        assert blk.span == max(2 * m - 3, 1)

    @pytest.mark.parametrize("m", [3, 4, 5, 6])
    def test_network_equals_coupling_product(self, m):
        rng = np.random.default_rng(10 * m)
        angles = [(rng.uniform(0, np.pi / 2), rng.uniform(-np.pi, np.pi))
                  for _ in range((m - 1) * (m - 2) // 2)]
        blk = synthesize_residual_wtilde(m, angles)
        span = blk.span
        expected = np.eye(span, dtype=complex)
        for (p, q), th, ph in blk.tunable:
            expected = tmn_matrix(span, p, q, th, ph) @ expected
        assert frob_distance(blk.matrix, expected) < 1e-13

    def test_ports_return_to_original_order(self):
        # with all couplers at theta=0 the network must be the identity
        m = 5
        blk = synthesize_residual_wtilde(m, [(0.0, 0.0)] * 6)
        assert frob_distance(blk.matrix, np.eye(blk.span)) == 0.0

    def test_wrong_angle_count(self):
        with pytest.raises(ValueError):
            synthesize_residual_wtilde(5, [(0.0, 0.0)] * 5)


class TestRotation:
    def test_universal_rotation(self):
        plan = eliminate(haar_random_su(9, 4), 3)
        blk = plan.v_blocks[0]
        rot = rotate_block_rows(blk)
        assert np.array_equal(rot.matrix, np.roll(blk.matrix, -1, axis=0))
        assert sum(isinstance(g, BeamSplitter) for g in rot.gates) == 3
        assert not any(isinstance(g, Swap) for g in rot.gates)
        assert frob_distance(gates_matrix(rot.gates, rot.dim), rot.matrix) < 1e-12

    @pytest.mark.parametrize("m,added,removed", [(3, 2, 3), (5, 12, 7), (6, 20, 9)])
    def test_residual_rotation_swap_accounting(self, m, added, removed):
        rng = np.random.default_rng(m)
        angles = [(rng.uniform(0, np.pi / 2), rng.uniform(-np.pi, np.pi))
                  for _ in range((m - 1) * (m - 2) // 2)]
        blk = synthesize_residual_wtilde(m, angles)
        before = sum(isinstance(g, Swap) for g in blk.gates)
        rot = rotate_block_rows(blk)
        after = sum(isinstance(g, Swap) for g in rot.gates)
        assert added == (m - 1) * (m - 2)
        assert removed == 2 * m - 3
        assert after == before + added - removed
        # composed network equals the row-rotated matrix exactly
        assert frob_distance(gates_matrix(rot.gates, rot.span),
                             np.roll(blk.matrix, -(m - 2), axis=0)) < 1e-12

    def test_residual_rotation_m2_is_empty(self):
        blk = synthesize_residual_wtilde(2, [])
        rot = rotate_block_rows(blk)
        assert rot.gates == ()

    def test_rotation_preserves_tunable_count(self):
        blk = synthesize_residual_wtilde(5, [(0.3, 0.1)] * 6)
        rot = rotate_block_rows(blk)
        assert len(rot.tunable) == 6
        # exactly one absorbed coupler got the complementary angle rewrite
        phases = [g for g in rot.gates if isinstance(g, PhaseShifter)]
        assert len(phases) == 1 and phases[0].delta == pytest.approx(np.pi)

    def test_double_rotation_rejected(self):
        blk = synthesize_residual_wtilde(3, [(0.2, 0.4)])
        with pytest.raises(ValueError):
            rotate_block_rows(rotate_block_rows(blk))


class TestElementCounts:
    def test_seven_three(self):
        rep = element_counts_elimination(7, 3)
        assert rep.bs_universal == 3
        assert rep.bs_residual == 1
        assert rep.phase_shifters == 6
        assert rep.delay_lines_total == 4

    def test_n_equals_m(self):
        rep = element_counts_elimination(5, 5)
        assert rep.k == 1
        assert rep.bs_universal == 10

    def test_ratio_101_5(self):
        rep = element_counts_elimination(101, 5)
        assert rep.bs_tunable_total == 16
        assert rep.bs_ratio_vs_spatial == pytest.approx((10 + 6) / 5050)

    def test_count_independent_of_n(self):
        a = element_counts_elimination(11, 4)
        b = element_counts_elimination(1001, 4)
        assert a.bs_tunable_total == b.bs_tunable_total
        assert a.delay_lines_total == b.delay_lines_total
