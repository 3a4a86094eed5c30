"""Acceptance suite: one test per acceptance criterion, each printing a
single pass/fail line and enforcing the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math
import time

import numpy as np
import pytest

from timeloom.core import BeamSplitter, Swap, frob_distance, haar_random_su
from timeloom.cosine_sine import cs_decompose, reconstruct_cs
from timeloom.elimination import (
    element_counts_elimination,
    eliminate,
    reconstruct_elimination,
    rotate_block_rows,
    synthesize_residual_wtilde,
)
from timeloom.loss import (
    HybridLossParams,
    TemporalLossParams,
    log10_ratio_approx,
    log10_ratio_exact,
    sweep_fig4,
)
from timeloom.schedule import schedule_cs, schedule_elimination
from timeloom.simulate import simulate_timebins


def _report(criterion: str, description: str):
    def deco(fn):
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] criterion {criterion}: {description}")
                raise
            print(f"[PASS] criterion {criterion}: {description}")

        wrapper.__name__ = fn.__name__
        return wrapper

    return deco


@_report("1", "elimination block counts for the 7-mode, block-3 case")
def test_criterion_1_block_counts():
    t0 = time.perf_counter()
    plan = eliminate(haar_random_su(7, 2024), 3)
    elapsed = time.perf_counter() - t0
    assert len(plan.v_blocks) == 6
    assert len(plan.w_blocks) == 3
    assert plan.phases[0] == 0.0
    assert sum(1 for p in plan.phases if abs(p) > 1e-9) == 6
    assert elapsed < 1.0


@_report("2", "residual-network gate counts and rotation swap removal (M=5)")
def test_criterion_2_residual_counts():
    rng = np.random.default_rng(0)
    angles = [(rng.uniform(0, math.pi / 2), rng.uniform(-math.pi, math.pi))
              for _ in range(6)]
    tilde = synthesize_residual_wtilde(5, angles)
    bs = sum(isinstance(g, BeamSplitter) for g in tilde.gates)
    swaps = sum(isinstance(g, Swap) for g in tilde.gates)
    assert bs == 6
    assert swaps == 12
    rotated = rotate_block_rows(tilde)
    swaps_rot = sum(isinstance(g, Swap) for g in rotated.gates)
    added = (5 - 1) * (5 - 2)  # naive row-rotation cost
    removed = swaps + added - swaps_rot
    assert removed == 2 * 5 - 3 == 7
    assert swaps_rot == 12 + 12 - 7 == 17


@_report("3", "reconstruction fidelity, 50 seeds per (N, M) configuration")
def test_criterion_3_reconstruction_fidelity():
    t0 = time.perf_counter()
    for n in (5, 7, 9, 13, 21, 25):
        for m in (2, 3, 4, 5):
            if n < m:
                continue
            for seed in range(50):
                u = haar_random_su(n, seed)
                plan_e = eliminate(u, m)
                err_e = frob_distance(reconstruct_elimination(plan_e).data, u.data)
                assert err_e < 1e-10 * n, ("elimination", n, m, seed, err_e)
                plan_c = cs_decompose(u, m)
                err_c = frob_distance(reconstruct_cs(plan_c).data, u.data)
                assert err_c < 1e-10 * n, ("cs", n, m, seed, err_c)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"took {elapsed:.1f}s"


@_report("4", "cosine-sine layer structure for the 12-mode, block-3 case")
def test_criterion_4_cs_layer_structure():
    plan = cs_decompose(haar_random_su(12, 99), 3)
    assert plan.ell == 4
    first = plan.layers[0]
    assert len(first.v_blocks) + len(first.u_blocks) == 2 * plan.ell - 1 == 7
    assert len(first.cs_sets) == plan.ell - 1 == 3
    last = plan.layers[-1]
    assert len(last.v_blocks) == 1 and not last.u_blocks and not last.cs_sets


@_report("5", "schedule replay equals plan reconstruction (all architectures)")
def test_criterion_5_schedule_algebra_equivalence():
    cases = []
    for m in (2, 3, 4):
        for n in (5, 8, 11, 13, 16):
            if n < m:
                continue
            cases.append((n, m))
    for n, m in cases:
        u = haar_random_su(n, 7 * n + m)
        plan_e = eliminate(u, m)
        ref_e = reconstruct_elimination(plan_e, include_padding=True).data
        sim, _ = simulate_timebins(schedule_elimination(plan_e))
        assert frob_distance(sim.data, ref_e) < 1e-8, ("elimination", n, m)
        plan_c = cs_decompose(u, m)
        ref_c = reconstruct_cs(plan_c, include_padding=True).data
        for reuse in (False, True):
            sim, _ = simulate_timebins(schedule_cs(plan_c, reuse=reuse))
            assert frob_distance(sim.data, ref_c) < 1e-8, ("cs", n, m, reuse)


@_report("6", "loss crossover identity and exact/approximate agreement")
def test_criterion_6_loss_crossover():
    # break-even check: eta_c = eta_sc^M zeroes the approximate ratio; the
    # residual exponent is 2(k - M) log10(eta_sc), so N is chosen with k = M
    # (the point where the quoted threshold is exact)
    for m in range(2, 9):
        for eta_sc in (0.90, 0.95, 0.99):
            n = m * m - m + 1
            t = TemporalLossParams(eta_i=1.0, eta_o=1.0, eta_bs=1.0, eta_sc=eta_sc)
            h = HybridLossParams(eta_i=1.0, eta_o=1.0, eta_bs=1.0, eta_c=eta_sc**m)
            assert abs(log10_ratio_approx(n, m, t, h)) <= 1e-9, (m, eta_sc)
    # agreement grid: the approximation drops only beam-splitter imbalance
    # and sub-ppm loop terms, so with matched ideal splitters it tracks the
    # exact quotient for all N up to 2500
    worst = 0.0
    for m in (2, 3, 5):
        t = TemporalLossParams(eta_i=0.9999, eta_o=0.9999, eta_bs=1.0, eta_sc=0.95)
        for eta_c in (0.5, 0.95**m):
            h = HybridLossParams(eta_i=0.9999, eta_o=0.9999, eta_bs=1.0, eta_c=eta_c)
            for n in range(m, 2501):
                if (n - 1) % (m - 1):
                    continue
                delta = abs(log10_ratio_exact(n, m, t, h)
                            - log10_ratio_approx(n, m, t, h))
                worst = max(worst, delta)
    assert worst < 0.05, worst


@_report("7", "comparison table spot values at the reference constants")
def test_criterion_7_fig4_spot_values():
    t = TemporalLossParams(eta_i=0.9999, eta_o=0.9999, eta_bs=0.96, eta_sc=0.95)
    h = HybridLossParams(eta_i=0.9999, eta_o=0.9999, eta_bs=0.96, eta_c=0.5)
    csv_text = sweep_fig4(range(2, 200), range(2, 9), t, h)
    rows = {}
    for line in csv_text.splitlines():
        if not line or line.startswith(("#", "N,")):
            continue
        parts = line.split(",")
        rows[(int(parts[0]), int(parts[1]))] = (float(parts[2]), float(parts[3]))
    # first valid point per M is N = M (a single layer): the hybrid side is
    # lossless and the ratio is 1 / eta_temporal(M), hand-evaluated here
    for m in range(2, 9):
        exact, _ = rows[(m, m)]
        hand = -math.log10(
            (0.9999 * 0.9999 * 0.96**2 * 0.95**2) ** (m - 1) / 0.9999)
        assert exact == pytest.approx(hand, rel=1e-12), m
        assert exact >= 0.0


@pytest.mark.xfail(
    strict=True,
    reason="spec defect: at the reference constants (eta_c = 0.5) the "
    "break-even condition eta_c >= eta_sc^M fails for every M <= 13, so the "
    "log-ratio DEcreases with N for small blocks; strict growth at each "
    "fixed M >= 2 contradicts the model's own crossover inequality. Growth "
    "holds for M >= 16 (see test_criterion_7_growth_where_crossover_holds).",
)
@_report("7b", "log-ratio strictly increasing in N at every fixed M >= 2")
def test_criterion_7b_monotonicity_as_stated():
    t = TemporalLossParams()
    h = HybridLossParams()
    for m in range(2, 9):
        ns = [n for n in range(max(3, m), 1000) if (n - 1) % (m - 1) == 0]
        ratios = [log10_ratio_exact(n, m, t, h) for n in ns]
        assert all(b > a for a, b in zip(ratios, ratios[1:])), m


@_report("7c", "log-ratio grows without bound once the crossover holds")
def test_criterion_7_growth_where_crossover_holds():
    t = TemporalLossParams()
    h = HybridLossParams()
    for m in (16, 20, 30):
        ns = [n for n in range(m, 6000) if (n - 1) % (m - 1) == 0][:60]
        ratios = [log10_ratio_exact(n, m, t, h) for n in ns]
        assert all(b > a for a, b in zip(ratios, ratios[1:])), m
        assert ratios[-1] > 1.0, m  # many-orders-of-magnitude trend


@_report("8", "hybrid element count is N-independent; ratio scales as M^2/N^2")
def test_criterion_8_element_scaling():
    m = 5
    counts = [element_counts_elimination(n, m).bs_tunable_total
              for n in (11, 101, 1001)]
    assert counts[0] == counts[1] == counts[2]
    # counted ratio against the spatial mesh follows c * 2 / (N (N-1)); the
    # fitted constant must be stable to 5% across two decades of N
    cs = []
    for n in (11, 101, 1001):
        rep = element_counts_elimination(n, m)
        cs.append(rep.bs_ratio_vs_spatial * n * (n - 1) / 2.0)
    mean = sum(cs) / len(cs)
    assert all(abs(c / mean - 1.0) < 0.05 for c in cs)
    # and the asymptotic form itself is Theta(M^2 / N^2)
    for n in (11, 101, 1001):
        rep = element_counts_elimination(n, m)
        assert 0.5 * m * m / n**2 < rep.bs_ratio_vs_spatial < 4.0 * m * m / n**2
