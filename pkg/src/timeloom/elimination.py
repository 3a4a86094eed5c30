"""Entry-elimination compilation of a unitary into small reusable blocks.

An N x N (special) unitary is reduced to lower-triangular form by
right-multiplying with inverse two-mode couplings, grouped into

* universal M-mode blocks acting on M adjacent modes, and
* specialized residual blocks spanning 2M-3 modes whose hardware form
  needs only (M-1)(M-2)/2 tunable beam splitters plus fixed swaps,

closed by a diagonal phase layer.  The plan reconstructs the input exactly
(to floating-point accuracy) as  U = D * B_Q * ... * B_1  with the blocks
in application order B_1 first.

Everything here is pure; plans and blocks are immutable after construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Literal, Sequence

import numpy as np

from .core import (
    BeamSplitter,
    ComplexMatrix,
    DimensionError,
    GateOp,
    NotUnitaryError,
    PhaseShifter,
    SpecialUnitaryMatrix,
    Swap,
    UnitaryMatrix,
    apply_tmn_inverse,
    canonical_angle,
    format_complex,
    gates_matrix,
    nulling_params,
    parse_complex,
    tmn_matrix,
    unitarity_error,
)


class DecompositionError(RuntimeError):
    """The elimination sweep failed to reach diagonal form."""


@dataclass(frozen=True)
class UniversalBlock:
    """Fully tunable M-mode block embedded at ``top_mode``.

    ``gates`` (local 1-based ports, application order) compose to ``matrix``;
    there are exactly M(M-1)/2 beam splitters plus optional phase shifters.
    """

    layer: int
    index_in_layer: int
    top_mode: int
    matrix: ComplexMatrix
    gates: tuple[GateOp, ...]
    form: Literal["tilde", "rotated"] = "tilde"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ResidualBlock:
    """Specialized (2M-3)-mode block: tunable couplers plus fixed swaps.

    ``tunable`` lists ((p, q), theta, phi) in application order; ``gates``
    is the full network including swaps and composes to ``matrix``.
    """

    layer: int
    index_in_layer: int
    top_mode: int
    span: int
    tunable: tuple[tuple[tuple[int, int], float, float], ...]
    gates: tuple[GateOp, ...]
    matrix: ComplexMatrix
    form: Literal["tilde", "rotated"] = "tilde"


@dataclass(frozen=True)
class EliminationPlan:
    """Complete elimination decomposition of an ``n``-mode unitary with
    block size ``m``; ``padding`` extra identity modes make k integral."""

    n: int
    m: int
    k: int
    padding: int
    v_blocks: tuple[UniversalBlock, ...]
    w_blocks: tuple[ResidualBlock, ...]
    phases: tuple[float, ...]

    @property
    def n_padded(self) -> int:
        return self.n + self.padding


# ---------------------------------------------------------------------------
# nulling order generator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullStep:
    """One elimination target: zero entry (row, col) by coupling columns
    (cm, cn).  All indices are global and 1-based."""

    row: int
    col: int
    cm: int
    cn: int


def universal_unit_steps(n: int, m: int, round_idx: int, unit_idx: int) -> list[NullStep]:
    """Targets cleared by universal unit ``unit_idx`` of round ``round_idx``:
    the triangular patch of M(M-1)/2 entries next to column block ``unit_idx``,
    swept row by row, right to left within each row."""
    b = (round_idx - 1) * (m - 1)
    omega = n - unit_idx * (m - 1)
    steps = []
    for i in range(1, m):
        for d in range(m - 1, i - 1, -1):
            steps.append(NullStep(b + i, omega + d, omega + d - 1, omega + d))
    return steps


def residual_block_steps(n: int, m: int, round_idx: int, res_idx: int) -> list[NullStep]:
    """Remaining (M-1)(M-2)/2 rectangle entries cleared by residual block
    ``res_idx`` of round ``round_idx``, in the same row-major right-to-left
    sweep; the leftmost entry of each row couples back across the block."""
    b = (round_idx - 1) * (m - 1)
    omega = n - res_idx * (m - 1)
    steps = []
    for i in range(2, m):
        for d in range(i - 1, 0, -1):
            if d == 1:
                steps.append(NullStep(b + i, omega + 1, omega - m + i, omega + 1))
            else:
                steps.append(NullStep(b + i, omega + d, omega + d - 1, omega + d))
    return steps


# ---------------------------------------------------------------------------
# residual network synthesis
# ---------------------------------------------------------------------------


def _wtilde_gates(m: int, angles: Sequence[tuple[float, float]]) -> tuple[GateOp, ...]:
    gates: list[GateOp] = []
    idx = 0
    for i in range(2, m):
        for d in range(i - 1, 0, -1):
            theta, phi = angles[idx]
            if d == 1:
                for s in range(1, m - 1):
                    gates.append(Swap(s, s + 1))
                gates.append(BeamSplitter(m - 1, m, theta, phi))
            else:
                gates.append(BeamSplitter(m + d - 2, m + d - 1, theta, phi))
            idx += 1
    for s in range(1, m - 1):
        gates.append(Swap(s, s + 1))
    return tuple(gates)


def _wtilde_couplings(m: int) -> list[tuple[int, int]]:
    """Logical port pairs coupled by the tunable elements, in order."""
    pairs = []
    for i in range(2, m):
        for d in range(i - 1, 0, -1):
            if d == 1:
                pairs.append((i - 1, m))
            else:
                pairs.append((m + d - 2, m + d - 1))
    return pairs


def synthesize_residual_wtilde(m: int, angles: Sequence[tuple[float, float]]) -> ResidualBlock:
    """Build the residual-block gate network for block size ``m``.

    Uses exactly (m-1)(m-2)/2 tunable beam splitters and (m-1)(m-2) swaps on
    2m-3 contiguous ports, returning ports to their original order.  The
    ``angles`` list supplies (theta, phi) per tunable element in application
    order; for m = 2 the network is empty.
    """
    if m < 2:
        raise DimensionError("m must be >= 2")
    expected = (m - 1) * (m - 2) // 2
    if len(angles) != expected:
        raise ValueError(f"need {expected} angle pairs for m={m}, got {len(angles)}")
    span = max(2 * m - 3, 1)
    gates = _wtilde_gates(m, angles)
    matrix = gates_matrix(gates, span)
    tunable = tuple(
        (pair, float(theta), float(phi))
        for pair, (theta, phi) in zip(_wtilde_couplings(m), angles)
    )
    return ResidualBlock(
        layer=0,
        index_in_layer=0,
        top_mode=1,
        span=span,
        tunable=tunable,
        gates=gates,
        matrix=matrix,
        form="tilde",
    )


# ---------------------------------------------------------------------------
# elimination sweep
# ---------------------------------------------------------------------------


def _as_array(u: SpecialUnitaryMatrix | UnitaryMatrix | ComplexMatrix) -> ComplexMatrix:
    if isinstance(u, SpecialUnitaryMatrix):
        return u.data
    if isinstance(u, UnitaryMatrix):
        return u.data
    arr = np.asarray(u, dtype=np.complex128)
    err = unitarity_error(arr)
    if err > 1e-10 * max(1.0, arr.shape[0]):
        raise NotUnitaryError(f"input is not unitary: ||U+U - I||_F = {err:.3e}")
    return arr


def elimination_padding(n: int, m: int) -> int:
    """Identity modes appended so that (N-1) is divisible by (M-1)."""
    return (m - 1 - (n - 1) % (m - 1)) % (m - 1)


def eliminate(
    u: SpecialUnitaryMatrix | UnitaryMatrix | ComplexMatrix,
    m: int,
    on_round: Callable[[int, ComplexMatrix], None] | None = None,
) -> EliminationPlan:
    """Decompose ``u`` into universal and residual blocks plus a phase layer.

    Rounds clear M-1 rows each: first the k-r+1 triangular patches via
    universal blocks (right to left), then the leftover rectangles via
    residual blocks.  Gate topology is input-independent: already-zero
    entries still emit identity-angle gates.  ``on_round`` receives a copy
    of the working matrix after each round (used by invariant tests).
    """
    arr = _as_array(u)
    n = arr.shape[0]
    if m < 2:
        raise DimensionError("m must be >= 2")
    if n < m:
        raise DimensionError(f"n={n} must be >= m={m}")
    pad = elimination_padding(n, m)
    np_ = n + pad
    work = np.eye(np_, dtype=np.complex128)
    work[:n, :n] = arr
    k = (np_ - 1) // (m - 1)

    v_blocks: list[UniversalBlock] = []
    w_blocks: list[ResidualBlock] = []

    for r in range(1, k + 1):
        for j in range(1, k - r + 2):
            omega = np_ - j * (m - 1)
            gates: list[GateOp] = []
            mat = np.eye(m, dtype=np.complex128)
            for step in universal_unit_steps(np_, m, r, j):
                th, ph, _ = nulling_params(work[step.row - 1, step.col - 1],
                                           work[step.row - 1, step.cm - 1])
                apply_tmn_inverse(work, step.cm, step.cn, th, ph)
                lm, ln = step.cm - omega + 1, step.cn - omega + 1
                gates.append(BeamSplitter(lm, ln, th, ph))
                mat = tmn_matrix(m, lm, ln, th, ph) @ mat
            v_blocks.append(UniversalBlock(layer=r, index_in_layer=j, top_mode=omega,
                                           matrix=mat, gates=tuple(gates)))
        for p in range(1, k - r + 1):
            omega = np_ - p * (m - 1)
            top = omega - m + 2
            span = max(2 * m - 3, 1)
            angle_list: list[tuple[float, float]] = []
            for step in residual_block_steps(np_, m, r, p):
                th, ph, _ = nulling_params(work[step.row - 1, step.col - 1],
                                           work[step.row - 1, step.cm - 1])
                apply_tmn_inverse(work, step.cm, step.cn, th, ph)
                angle_list.append((th, ph))
            block = synthesize_residual_wtilde(m, angle_list)
            w_blocks.append(replace(block, layer=r, index_in_layer=p, top_mode=top))
        if on_round is not None:
            on_round(r, work.copy())

    off = work - np.diag(np.diagonal(work))
    if np.linalg.norm(off) > 1e-9 * np_:
        raise DecompositionError(
            f"residual off-diagonal norm {np.linalg.norm(off):.3e} after elimination"
        )
    phases = [canonical_angle(float(a)) for a in np.angle(np.diagonal(work))]

    # The input's global phase is folded into the one block that touches
    # mode 1 (round 1, unit k), pinning the first diagonal phase to zero.
    delta1 = phases[0]
    if abs(delta1) > 0.0:
        idx = next(i for i, blk in enumerate(v_blocks)
                   if blk.layer == 1 and blk.index_in_layer == k)
        blk = v_blocks[idx]
        mat = blk.matrix.copy()
        mat[0, :] *= np.exp(1j * delta1)
        gates = blk.gates + (PhaseShifter(1, delta1),)
        v_blocks[idx] = replace(blk, matrix=mat, gates=gates)
        phases[0] = 0.0

    return EliminationPlan(
        n=n, m=m, k=k, padding=pad,
        v_blocks=tuple(v_blocks), w_blocks=tuple(w_blocks), phases=tuple(phases),
    )


def _embed(target: ComplexMatrix, block: ComplexMatrix, top_mode: int) -> None:
    d = block.shape[0]
    i = top_mode - 1
    target[i:i + d, i:i + d] = block


def plan_block_sequence(plan: EliminationPlan) -> Iterator[UniversalBlock | ResidualBlock]:
    """Blocks in application order (first factor acting on the input first)."""
    k = plan.k
    v_by = {(b.layer, b.index_in_layer): b for b in plan.v_blocks}
    w_by = {(b.layer, b.index_in_layer): b for b in plan.w_blocks}
    for r in range(1, k + 1):
        for j in range(1, k - r + 2):
            yield v_by[(r, j)]
        for p in range(1, k - r + 1):
            yield w_by[(r, p)]


def reconstruct_elimination(plan: EliminationPlan, include_padding: bool = False) -> UnitaryMatrix:
    """Multiply the plan back together:  D * B_Q * ... * B_1."""
    np_ = plan.n_padded
    out = np.diag(np.exp(1j * np.asarray(plan.phases, dtype=float))).astype(np.complex128)
    for block in reversed(list(plan_block_sequence(plan))):
        emb = np.eye(np_, dtype=np.complex128)
        _embed(emb, block.matrix, block.top_mode)
        out = out @ emb
    if plan.padding and not include_padding:
        out = out[: plan.n, : plan.n]
    return UnitaryMatrix(out)


# ---------------------------------------------------------------------------
# row rotation (device form) and swap peephole
# ---------------------------------------------------------------------------


def _rotation_swap_network(m: int) -> list[GateOp]:
    """Adjacent-swap realization of 'shift the bottom M-1 rows to the top' on
    2M-3 ports, shaped so its head cancels the residual network's restore
    pass and its first block-swap element lands on the last tunable coupler."""
    gates: list[GateOp] = []
    for s in range(m - 2, 0, -1):
        gates.append(Swap(s, s + 1))
    size = m - 2
    lo = 2
    if size >= 1:
        widths = list(range(1, size + 1)) + list(range(size - 1, 0, -1))
        for t in widths:
            start = lo + size - t
            for i in range(t):
                gates.append(Swap(start + 2 * i, start + 2 * i + 1))
    return gates


def _peephole(gates: list[GateOp]) -> list[GateOp]:
    """Cancel adjacent identical swaps; absorb a swap that directly follows a
    tunable coupler on the same ports via theta -> pi/2 - theta plus a pi
    phase.  Exact rewrites only; iterated to a fixed point."""
    out = list(gates)
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(out):
            a, b = out[i], out[i + 1]
            if isinstance(a, Swap) and isinstance(b, Swap) and a == b:
                del out[i:i + 2]
                changed = True
                i = max(i - 1, 0)
                continue
            if (isinstance(a, BeamSplitter) and isinstance(b, Swap)
                    and (a.m, a.n) == (b.m, b.n)):
                out[i:i + 2] = [
                    PhaseShifter(a.n, math.pi),
                    BeamSplitter(a.m, a.n, math.pi / 2.0 - a.theta, a.phi),
                ]
                changed = True
                continue
            i += 1
    return out


def _synthesize_universal(u_local: ComplexMatrix) -> tuple[GateOp, ...]:
    """Triangle synthesis of an arbitrary small unitary: M(M-1)/2 couplers in
    row-major right-to-left order followed by one phase shifter per port."""
    dim = u_local.shape[0]
    work = u_local.astype(np.complex128, copy=True)
    gates: list[GateOp] = []
    for row in range(1, dim):
        for col in range(dim, row, -1):
            th, ph, _ = nulling_params(work[row - 1, col - 1], work[row - 1, col - 2])
            apply_tmn_inverse(work, col - 1, col, th, ph)
            gates.append(BeamSplitter(col - 1, col, th, ph))
    for port, z in enumerate(np.diagonal(work), start=1):
        gates.append(PhaseShifter(port, canonical_angle(float(np.angle(z)))))
    return tuple(gates)


def rotate_block_rows(block: UniversalBlock | ResidualBlock) -> UniversalBlock | ResidualBlock:
    """Shift the bottom M-1 rows of a block to the top (device form).

    Universal blocks are re-synthesized as a fresh universal interferometer,
    so no swaps are added.  Residual blocks gain the rotation's swap network,
    after which pair cancellation plus one coupler absorption remove 2M-3
    swaps again; the composed gates equal the row-rotated matrix exactly.
    """
    if isinstance(block, UniversalBlock):
        if block.form == "rotated":
            raise ValueError("block is already in rotated form")
        rot = np.roll(block.matrix, -1, axis=0)
        return UniversalBlock(
            layer=block.layer, index_in_layer=block.index_in_layer,
            top_mode=block.top_mode, matrix=rot,
            gates=_synthesize_universal(rot), form="rotated",
        )
    if isinstance(block, ResidualBlock):
        if block.form == "rotated":
            raise ValueError("block is already in rotated form")
        m = (block.span + 3) // 2
        rot = np.roll(block.matrix, -(m - 2), axis=0) if block.span > 1 else block.matrix
        gates = _peephole(list(block.gates) + _rotation_swap_network(m))
        tunable = tuple(
            ((g.m, g.n), g.theta, g.phi) for g in gates if isinstance(g, BeamSplitter)
        )
        return ResidualBlock(
            layer=block.layer, index_in_layer=block.index_in_layer,
            top_mode=block.top_mode, span=block.span,
            tunable=tunable, gates=tuple(gates), matrix=rot, form="rotated",
        )
    raise TypeError(f"not a block: {block!r}")


# ---------------------------------------------------------------------------
# element counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CountReport:
    """Hardware element counts for the elimination architecture at (n, m)."""

    n: int
    m: int
    k: int
    padding: int
    bs_universal: int
    bs_residual: int
    bs_tunable_total: int
    swaps_residual_tilde: int
    swaps_residual_rotated: int
    phase_shifters: int
    delay_lines_inner: int
    delay_lines_outer: int
    delay_lines_total: int
    spatial_mesh_bs: int
    bs_ratio_vs_spatial: float


def element_counts_elimination(n: int, m: int) -> CountReport:
    """Tunable elements are per-device and independent of n; the ratio against
    a fully spatial n(n-1)/2 mesh therefore scales as Theta(m^2 / n^2)."""
    if m < 2:
        raise DimensionError("m must be >= 2")
    if n < m:
        raise DimensionError(f"n={n} must be >= m={m}")
    pad = elimination_padding(n, m)
    k = (n + pad - 1) // (m - 1)
    bs_u = m * (m - 1) // 2
    bs_w = (m - 1) * (m - 2) // 2
    zeros = [(0.0, 0.0)] * bs_w
    tilde = synthesize_residual_wtilde(m, zeros)
    rotated = rotate_block_rows(tilde)
    swaps_tilde = sum(1 for g in tilde.gates if isinstance(g, Swap))
    swaps_rot = sum(1 for g in rotated.gates if isinstance(g, Swap))
    spatial = n * (n - 1) // 2
    total = bs_u + bs_w
    return CountReport(
        n=n, m=m, k=k, padding=pad,
        bs_universal=bs_u, bs_residual=bs_w, bs_tunable_total=total,
        swaps_residual_tilde=swaps_tilde, swaps_residual_rotated=swaps_rot,
        phase_shifters=n - 1,
        delay_lines_inner=1 + (m - 2), delay_lines_outer=m - 1,
        delay_lines_total=2 * m - 2,
        spatial_mesh_bs=spatial,
        bs_ratio_vs_spatial=total / spatial if spatial else math.inf,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _gate_to_json(g: GateOp) -> dict:
    if isinstance(g, BeamSplitter):
        return {"kind": "bs", "m": g.m, "n": g.n, "theta": g.theta, "phi": g.phi}
    if isinstance(g, PhaseShifter):
        return {"kind": "ps", "m": g.m, "delta": g.delta}
    if isinstance(g, Swap):
        return {"kind": "swap", "m": g.m, "n": g.n}
    raise TypeError(f"not a gate: {g!r}")


def _gate_from_json(d: dict) -> GateOp:
    kind = d["kind"]
    if kind == "bs":
        return BeamSplitter(d["m"], d["n"], d["theta"], d["phi"])
    if kind == "ps":
        return PhaseShifter(d["m"], d["delta"])
    if kind == "swap":
        return Swap(d["m"], d["n"])
    raise ValueError(f"unknown gate kind {kind!r}")


def matrix_to_json(a: ComplexMatrix) -> list[list[str]]:
    return [[format_complex(z) for z in row] for row in np.asarray(a)]


def matrix_from_json(rows: list[list[str]]) -> ComplexMatrix:
    return np.array([[parse_complex(tok) for tok in row] for row in rows],
                    dtype=np.complex128)


def elimination_plan_to_json(plan: EliminationPlan) -> str:
    doc = {
        "schema_version": 1,
        "kind": "elimination",
        "n": plan.n,
        "m": plan.m,
        "k": plan.k,
        "padding": plan.padding,
        "phases": list(plan.phases),
        "v_blocks": [
            {
                "layer": b.layer, "index": b.index_in_layer, "top_mode": b.top_mode,
                "matrix": matrix_to_json(b.matrix),
                "gates": [_gate_to_json(g) for g in b.gates],
                "form": b.form,
            }
            for b in plan.v_blocks
        ],
        "w_blocks": [
            {
                "layer": b.layer, "index": b.index_in_layer, "top_mode": b.top_mode,
                "span": b.span,
                "tunable": [
                    {"m": p[0], "n": p[1], "theta": th, "phi": ph}
                    for (p, th, ph) in b.tunable
                ],
                "gates": [_gate_to_json(g) for g in b.gates],
                "matrix": matrix_to_json(b.matrix),
                "form": b.form,
            }
            for b in plan.w_blocks
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def elimination_plan_from_json(text: str) -> EliminationPlan:
    doc = json.loads(text)
    if doc.get("kind") != "elimination":
        raise ValueError(f"not an elimination plan: kind={doc.get('kind')!r}")
    v_blocks = tuple(
        UniversalBlock(
            layer=b["layer"], index_in_layer=b["index"], top_mode=b["top_mode"],
            matrix=matrix_from_json(b["matrix"]),
            gates=tuple(_gate_from_json(g) for g in b["gates"]),
            form=b.get("form", "tilde"),
        )
        for b in doc["v_blocks"]
    )
    w_blocks = tuple(
        ResidualBlock(
            layer=b["layer"], index_in_layer=b["index"], top_mode=b["top_mode"],
            span=b["span"],
            tunable=tuple(((t["m"], t["n"]), t["theta"], t["phi"]) for t in b["tunable"]),
            gates=tuple(_gate_from_json(g) for g in b["gates"]),
            matrix=matrix_from_json(b["matrix"]),
            form=b.get("form", "tilde"),
        )
        for b in doc["w_blocks"]
    )
    return EliminationPlan(
        n=doc["n"], m=doc["m"], k=doc["k"], padding=doc["padding"],
        v_blocks=v_blocks, w_blocks=w_blocks, phases=tuple(doc["phases"]),
    )
