"""Cosine-sine factorization and the layered reduction it induces.

The kernel factorizes an (m+n) x (m+n) unitary into block-diagonal unitaries
around a real coupling core

    S2m = [[diag cos(theta), diag sin(theta)], [-diag sin(theta), diag cos(theta)]]

extended by an identity on the trailing n-m modes.  Applied iteratively it
reduces an N x N unitary (N = ell * M after padding) into ell layers built
from M x M universal blocks and 2M x 2M coupling cores; layer i holds
2(ell-i)+1 blocks and ell-i angle sets, the last layer a single block.

Angle sets are stored as complements (pi/2 - theta), matching hardware whose
natural tuning parameter is the straight-through transmissivity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .core import (
    ComplexMatrix,
    DimensionError,
    NotUnitaryError,
    SpecialUnitaryMatrix,
    UnitaryMatrix,
    project_to_unitary,
    unitarity_error,
)
from .elimination import DecompositionError, matrix_from_json, matrix_to_json


@dataclass(frozen=True)
class CsFactorization:
    """One factorization  u = l_block @ (S2m (+) I) @ r_block  with the
    coupling core parameterized by ``s_angles`` (ascending, in [0, pi/2])."""

    l_block: ComplexMatrix
    s_angles: tuple[float, ...]
    r_block: ComplexMatrix
    m: int
    n: int


@dataclass(frozen=True)
class CsLayer:
    """Blocks of one layer.  ``v_blocks[j]``/``u_blocks[j]`` sit at mode
    offsets j*M and (j+1)*M; ``cs_sets[j]`` (complement form) couples the two.
    The last layer has a single v_block and nothing else."""

    v_blocks: tuple[ComplexMatrix, ...]
    u_blocks: tuple[ComplexMatrix, ...]
    cs_sets: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class CsPlan:
    n: int
    m: int
    ell: int
    padding: int
    layers: tuple[CsLayer, ...]

    @property
    def n_padded(self) -> int:
        return self.n + self.padding


def cs_core(theta: Sequence[float]) -> ComplexMatrix:
    """The 2m x 2m real coupling core built from ``theta`` (not complements)."""
    m = len(theta)
    c = np.diag(np.cos(theta))
    s = np.diag(np.sin(theta))
    return np.block([[c, s], [-s, c]]).astype(np.complex128)


def complement_angles(theta_set: Sequence[float]) -> tuple[float, ...]:
    """Replace each angle by pi/2 - angle; an involution on [0, pi/2]."""
    out = []
    for t in theta_set:
        if not (-1e-12 <= t <= math.pi / 2 + 1e-12):
            raise ValueError(f"angle {t} outside [0, pi/2]")
        out.append(math.pi / 2.0 - min(max(t, 0.0), math.pi / 2.0))
    return tuple(out)


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------


def _sorted_ascending(theta: np.ndarray) -> np.ndarray:
    order = np.argsort(theta, kind="stable")
    return order


def csd(u: UnitaryMatrix | ComplexMatrix, m: int) -> CsFactorization:
    """Cosine-sine factorization with partition sizes (m, n = dim - m), m <= n.

    LAPACK's simultaneous factorization does the numerical work (stable for
    clustered angles); this routine re-expresses the result in the
    convention above: coupling core on the leading 2m modes, identity on the
    rest, angles ascending, core diagonals real nonnegative.
    """
    arr = u.data if isinstance(u, UnitaryMatrix) else np.asarray(u, dtype=np.complex128)
    d = arr.shape[0]
    n = d - m
    if m < 1 or n < m:
        raise DimensionError(f"need 1 <= m <= dim/2, got m={m}, dim={d}")
    err = unitarity_error(arr)
    if err > 1e-10 * max(1.0, d):
        raise NotUnitaryError(f"input is not unitary: {err:.3e}")

    (u1, u2), theta, (v1h, v2h) = scipy.linalg.cossin(arr, p=m, q=m, separate=True)
    theta = np.asarray(theta, dtype=float)

    order = _sorted_ascending(theta)
    theta = theta[order]
    u1 = u1[:, order].copy()
    v1h = v1h[order, :].copy()

    # scipy places the identity part first inside the second partition and
    # carries a -sin block; reorder coupled modes to the front (sorted like
    # theta) and flip one sign so the core matches cs_core exactly.
    coupled = np.arange(n - m, n)
    u2 = np.asarray(u2).copy()
    v2h = np.asarray(v2h).copy()
    u2[:, coupled] = u2[:, coupled][:, order]
    v2h[coupled, :] = v2h[coupled, :][order, :]
    perm = np.concatenate([coupled, np.arange(0, n - m)])
    u2p = u2[:, perm]
    v2p = v2h[perm, :]
    u2p[:, :m] *= -1.0
    v2p[:m, :] *= -1.0

    l_block = np.zeros((d, d), dtype=np.complex128)
    l_block[:m, :m] = u1
    l_block[m:, m:] = u2p
    r_block = np.zeros((d, d), dtype=np.complex128)
    r_block[:m, :m] = v1h
    r_block[m:, m:] = v2p

    # Fix the per-slot phase freedom between the factors: rotate each coupled
    # pair so diag(L_m) is real nonnegative, and for uncoupled slots
    # (theta = 0) also the matching diagonal of the lower-left block.  This
    # makes trivial inputs factor trivially and is otherwise inert.
    for i in range(m):
        z = l_block[i, i]
        if abs(z) > 1e-12:
            lam = z.conjugate() / abs(z)
            l_block[:, i] *= lam
            r_block[i, :] *= lam.conjugate()
            if math.sin(theta[i]) > 1e-12:
                l_block[:, m + i] *= lam
                r_block[m + i, :] *= lam.conjugate()
        if math.sin(theta[i]) <= 1e-12:
            z2 = l_block[m + i, m + i]
            if abs(z2) > 1e-12:
                mu = z2.conjugate() / abs(z2)
                l_block[:, m + i] *= mu
                r_block[m + i, :] *= mu.conjugate()
    return CsFactorization(l_block=l_block, s_angles=tuple(float(t) for t in theta),
                           r_block=r_block, m=m, n=n)


def cs_reconstruct_factorization(f: CsFactorization) -> ComplexMatrix:
    d = f.m + f.n
    sigma = np.eye(d, dtype=np.complex128)
    sigma[: 2 * f.m, : 2 * f.m] = cs_core(f.s_angles)
    return f.l_block @ sigma @ f.r_block


# ---------------------------------------------------------------------------
# layered reduction
# ---------------------------------------------------------------------------


def cs_padding(n: int, m: int) -> int:
    return (m - n % m) % m


def _sweep_step(bottom: ComplexMatrix, m: int) -> tuple[ComplexMatrix, ComplexMatrix, np.ndarray]:
    """Given the bottom M rows restricted to two adjacent column blocks
    [Z | X], find unitaries V, U and angles theta with

        c_i * Z @ V+[:, i] + s_i * X @ U+[:, i] = 0,

    i.e. the first M columns of (V+ (+) U+) @ core(theta)+ span the kernel
    of [Z | X].  Kernel directions with freedom lean on the top half, so an
    identity input yields theta = 0 throughout.
    """
    z = bottom[:, :m]
    x = bottom[:, m:]
    b = np.hstack([z, x])
    _, sing, vh = np.linalg.svd(b)
    tol = max(1e-11, 1e-13 * (sing[0] if sing.size else 1.0))
    rank = int(np.sum(sing > tol))
    null_basis = vh[rank:, :].conj().T  # (2m, q), q >= m
    q = null_basis.shape[1]
    if q < m:
        raise DecompositionError(f"kernel dimension {q} < {m}")
    if q > m:
        top = null_basis[:m, :]
        _, _, wt = np.linalg.svd(top)
        null_basis = null_basis @ wt.conj().T[:, :m]
    # complete to a unitary and take its cosine-sine factorization
    qfull, _ = np.linalg.qr(np.hstack([null_basis, np.eye(2 * m, dtype=np.complex128)]),
                            mode="reduced")
    y = np.hstack([null_basis, qfull[:, m: 2 * m]])
    # reorthogonalize defensively; qr of the padded matrix keeps the first m
    # columns equal to null_basis up to machine precision
    y = project_to_unitary(y)
    (u1, u2), theta, _ = scipy.linalg.cossin(y, p=m, q=m, separate=True)
    theta = np.asarray(theta, dtype=float)
    order = _sorted_ascending(theta)
    theta = theta[order]
    u1 = u1[:, order].copy()
    u2 = u2[:, order].copy()
    # fix slot phases: rotate each coupled column pair so diag(u1) is real
    # nonnegative; uncoupled columns (theta = 0) get the same polish on u2,
    # so structureless inputs produce identity blocks
    for i in range(m):
        z = u1[i, i]
        if abs(z) > 1e-12:
            lam = z.conjugate() / abs(z)
            u1[:, i] *= lam
            u2[:, i] *= lam
        if math.sin(theta[i]) <= 1e-12:
            z2 = u2[i, i]
            if abs(z2) > 1e-12:
                u2[:, i] *= z2.conjugate() / abs(z2)
    v_block = u1.conj().T
    u_block = u2.conj().T
    return v_block, u_block, theta


def cs_decompose(u: SpecialUnitaryMatrix | UnitaryMatrix | ComplexMatrix, m: int) -> CsPlan:
    """Reduce a unitary to ell layers of M x M blocks and coupling cores.

    Layer i clears the bottom M rows of the current working matrix left to
    right; each step consumes one (v, u, theta) triple, and the trailing
    block-diagonal remainder recurses.  Angle sets are stored complemented.
    """
    if isinstance(u, SpecialUnitaryMatrix):
        arr = u.data
    elif isinstance(u, UnitaryMatrix):
        arr = u.data
    else:
        arr = np.asarray(u, dtype=np.complex128)
        err = unitarity_error(arr)
        if err > 1e-10 * max(1.0, arr.shape[0]):
            raise NotUnitaryError(f"input is not unitary: {err:.3e}")
    n = arr.shape[0]
    if m < 1:
        raise DimensionError("m must be >= 1")
    if n < m:
        raise DimensionError(f"n={n} must be >= m={m}")
    pad = cs_padding(n, m)
    np_ = n + pad
    ell = np_ // m

    work = np.eye(np_, dtype=np.complex128)
    work[:n, :n] = arr

    layers: list[CsLayer] = []
    for layer_idx in range(1, ell):
        size = np_ - (layer_idx - 1) * m
        steps = size // m - 1
        v_blocks: list[ComplexMatrix] = []
        u_blocks: list[ComplexMatrix] = []
        cs_sets: list[tuple[float, ...]] = []
        for j in range(steps):
            c0 = j * m
            bottom = work[size - m: size, c0: c0 + 2 * m]
            v_blk, u_blk, theta = _sweep_step(bottom, m)
            fac = np.zeros((2 * m, 2 * m), dtype=np.complex128)
            fac[:m, :m] = v_blk.conj().T
            fac[m:, m:] = u_blk.conj().T
            work[:size, c0: c0 + 2 * m] = (
                work[:size, c0: c0 + 2 * m] @ fac @ cs_core(theta).conj().T
            )
            v_blocks.append(v_blk)
            u_blocks.append(u_blk)
            cs_sets.append(tuple(theta))
        tail = project_to_unitary(work[size - m: size, size - m: size])
        work[:size, size - m: size] = work[:size, size - m: size] @ tail.conj().T
        v_blocks.append(tail)
        junk = float(np.linalg.norm(work[size - m: size, : size - m]))
        if junk > 1e-8 * np_:
            raise DecompositionError(f"sweep left residue {junk:.3e} in layer {layer_idx}")
        work[size - m: size, : size - m] = 0.0
        work[: size - m, size - m: size] = 0.0
        work[size - m: size, size - m: size] = np.eye(m)
        work[: size - m, : size - m] = project_to_unitary(work[: size - m, : size - m])
        layers.append(CsLayer(
            v_blocks=tuple(v_blocks),
            u_blocks=tuple(u_blocks),
            cs_sets=tuple(complement_angles(t) for t in cs_sets),
        ))
    layers.append(CsLayer(
        v_blocks=(project_to_unitary(work[:m, :m]),), u_blocks=(), cs_sets=(),
    ))
    return CsPlan(n=n, m=m, ell=ell, padding=pad, layers=tuple(layers))


def cs_layer_matrix(layer: CsLayer, m: int, dim: int) -> ComplexMatrix:
    """Dense matrix of one layer embedded in ``dim`` modes."""
    steps = len(layer.u_blocks)
    out = np.eye(dim, dtype=np.complex128)
    for j in range(steps):
        c0 = j * m
        fac = np.eye(dim, dtype=np.complex128)
        fac[c0: c0 + m, c0: c0 + m] = layer.v_blocks[j]
        fac[c0 + m: c0 + 2 * m, c0 + m: c0 + 2 * m] = layer.u_blocks[j]
        out = fac @ out
        core = np.eye(dim, dtype=np.complex128)
        theta = complement_angles(layer.cs_sets[j])  # back to physical angles
        core[c0: c0 + 2 * m, c0: c0 + 2 * m] = cs_core(theta)
        out = core @ out
    c0 = steps * m
    fac = np.eye(dim, dtype=np.complex128)
    fac[c0: c0 + m, c0: c0 + m] = layer.v_blocks[steps]
    out = fac @ out
    return out


def reconstruct_cs(plan: CsPlan, include_padding: bool = False) -> UnitaryMatrix:
    """Multiply the layers back together, layer 1 acting first."""
    np_ = plan.n_padded
    out = np.eye(np_, dtype=np.complex128)
    for layer in plan.layers:
        out = cs_layer_matrix(layer, plan.m, np_) @ out
    if plan.padding and not include_padding:
        out = out[: plan.n, : plan.n]
    return UnitaryMatrix(out)


# ---------------------------------------------------------------------------
# coupling-device gate realizations (swap accounting)
# ---------------------------------------------------------------------------


def _interleave_swaps(m: int) -> list[tuple[int, int]]:
    """Adjacent swaps bringing stacked rails (1..m | m+1..2m) into paired
    order (1, m+1, 2, m+2, ...); m(m-1)/2 swaps."""
    order = list(range(1, 2 * m + 1))
    target = []
    for i in range(1, m + 1):
        target.extend([i, m + i])
    swaps = []
    pos = {v: i for i, v in enumerate(order)}
    for goal_idx in range(2 * m):
        want = target[goal_idx]
        idx = pos[want]
        while idx > goal_idx:
            a, b = order[idx - 1], order[idx]
            order[idx - 1], order[idx] = b, a
            pos[a], pos[b] = idx, idx - 1
            swaps.append((idx, idx + 1))
            idx -= 1
    return swaps


def coupling_device_swap_count(m: int) -> int:
    """Fixed swaps in the paired-rail coupling device: interleave in and out,
    m(m-1) total."""
    return 2 * len(_interleave_swaps(m))


def coupling_device_swap_count_uncomplemented(m: int) -> int:
    """Swap count if angle sets were used directly: the through/cross roles
    of the two rail groups invert, costing a full m x m block crossing (m^2
    extra swaps) on top of the interleaves."""
    return coupling_device_swap_count(m) + m * m


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def cs_plan_to_json(plan: CsPlan) -> str:
    doc = {
        "schema_version": 1,
        "kind": "cs",
        "n": plan.n,
        "m": plan.m,
        "ell": plan.ell,
        "padding": plan.padding,
        "layers": [
            {
                "v_blocks": [matrix_to_json(b) for b in layer.v_blocks],
                "u_blocks": [matrix_to_json(b) for b in layer.u_blocks],
                "cs_sets": [list(s) for s in layer.cs_sets],
            }
            for layer in plan.layers
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def cs_plan_from_json(text: str) -> CsPlan:
    doc = json.loads(text)
    if doc.get("kind") != "cs":
        raise ValueError(f"not a cs plan: kind={doc.get('kind')!r}")
    layers = tuple(
        CsLayer(
            v_blocks=tuple(matrix_from_json(b) for b in layer["v_blocks"]),
            u_blocks=tuple(matrix_from_json(b) for b in layer["u_blocks"]),
            cs_sets=tuple(tuple(s) for s in layer["cs_sets"]),
        )
        for layer in doc["layers"]
    )
    return CsPlan(n=doc["n"], m=doc["m"], ell=doc["ell"], padding=doc["padding"],
                  layers=layers)
