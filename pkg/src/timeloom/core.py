"""Core dense-unitary machinery shared by the compilation pipeline.

Provides the two-mode coupling matrix used for entry elimination, the
closed-form nulling solve, seeded Haar-random sampling, distance metrics,
gate primitives, and the plain-text matrix interchange format.

All values are immutable after construction; every function here is pure,
so instances can be shared freely across threads.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from numpy.typing import NDArray

ComplexMatrix = NDArray[np.complex128]

#: absolute threshold for "is this entry zero"
DEFAULT_ABS_EPS = 1e-12
#: relative scale for matrix-distance acceptance checks
DEFAULT_REL_EPS = 1e-10


class MatrixFormatError(ValueError):
    """Matrix text could not be parsed. Carries a 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class NotUnitaryError(ValueError):
    """Input failed a unitarity (or special-unitarity) invariant."""


class DimensionError(ValueError):
    """Operands have incompatible or invalid dimensions."""


@dataclass(frozen=True)
class Tolerance:
    """Numeric tolerances: ``abs_eps`` for entry-is-zero tests, ``rel_eps``
    for matrix-distance checks (scaled by dimension where documented)."""

    abs_eps: float = DEFAULT_ABS_EPS
    rel_eps: float = DEFAULT_REL_EPS

    def __post_init__(self) -> None:
        if not (math.isfinite(self.abs_eps) and math.isfinite(self.rel_eps)):
            raise ValueError("tolerances must be finite")
        if self.abs_eps < 0 or self.rel_eps < 0:
            raise ValueError("tolerances must be nonnegative")



# ---------------------------------------------------------------------------
# typed matrix wrappers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitaryMatrix:
    """A dense N x N unitary matrix.

    ``data`` is complex128 and treated as immutable.  Entries follow the
    1-based convention of :meth:`entry`; raw numpy access is 0-based.
    """

    data: ComplexMatrix

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DimensionError("dim must be >= 1")
        object.__setattr__(self, "data", arr)
        err = unitarity_error(arr)
        if err > 1e-12 * max(1.0, arr.shape[0] ** 0.5):
            raise NotUnitaryError(f"matrix is not unitary: ||U+U - I||_F = {err:.3e}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def entry(self, i: int, j: int) -> complex:
        """1-based entry access matching the usual U_ij convention."""
        if not (1 <= i <= self.dim and 1 <= j <= self.dim):
            raise IndexError(f"entry ({i}, {j}) out of range for dim {self.dim}")
        return complex(self.data[i - 1, j - 1])


@dataclass(frozen=True)
class SpecialUnitaryMatrix:
    """A unitary matrix with det = 1 (to 1e-10 in modulus and phase)."""

    inner: UnitaryMatrix

    def __post_init__(self) -> None:
        det = np.linalg.det(self.inner.data)
        if abs(det - 1.0) > 1e-10:
            raise NotUnitaryError(f"determinant is {det:.12g}, not 1")

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def data(self) -> ComplexMatrix:
        return self.inner.data


def unitarity_error(a: ComplexMatrix) -> float:
    """Frobenius norm of U+U - I."""
    a = np.asarray(a)
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))


# ---------------------------------------------------------------------------
# gate primitives
# ---------------------------------------------------------------------------


def canonical_angle(x: float) -> float:
    """Wrap an angle to the canonical interval (-pi, pi]."""
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y <= 0.0:
        y += 2.0 * math.pi
    return y - math.pi


@dataclass(frozen=True)
class BeamSplitter:
    """Tunable two-mode coupler on ports (m, n), m < n; theta sets the
    splitting, phi the relative phase.  Matches :func:`tmn_matrix`."""

    m: int
    n: int
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not self.m < self.n:
            raise ValueError(f"require m < n, got ({self.m}, {self.n})")


@dataclass(frozen=True)
class PhaseShifter:
    """Single-mode phase e^(i*delta) on port m."""

    m: int
    delta: float


@dataclass(frozen=True)
class Swap:
    """Port exchange; a beam splitter with unit transmissivity."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if not self.m < self.n:
            raise ValueError(f"require m < n, got ({self.m}, {self.n})")


GateOp = Union[BeamSplitter, PhaseShifter, Swap]


def tmn_matrix(dim: int, m: int, n: int, theta: float, phi: float) -> ComplexMatrix:
    """Embed the two-mode coupling block into an identity of size ``dim``.

    Rows/columns m and n (1-based, m < n) hold

        [cos(theta) e^(-i phi)   -sin(theta)]
        [sin(theta) e^(-i phi)    cos(theta)]

    and all other entries are the identity.
    """
    if not (1 <= m < n <= dim):
        raise DimensionError(f"need 1 <= m < n <= dim, got m={m}, n={n}, dim={dim}")
    out = np.eye(dim, dtype=np.complex128)
    c, s = math.cos(theta), math.sin(theta)
    e = cmath.exp(-1j * phi)
    out[m - 1, m - 1] = c * e
    out[m - 1, n - 1] = -s
    out[n - 1, m - 1] = s * e
    out[n - 1, n - 1] = c
    return out


def gate_matrix(gate: GateOp, dim: int) -> ComplexMatrix:
    """Dense embedding of a single gate on ``dim`` ports."""
    if isinstance(gate, BeamSplitter):
        return tmn_matrix(dim, gate.m, gate.n, gate.theta, gate.phi)
    if isinstance(gate, PhaseShifter):
        out = np.eye(dim, dtype=np.complex128)
        out[gate.m - 1, gate.m - 1] = cmath.exp(1j * gate.delta)
        return out
    if isinstance(gate, Swap):
        out = np.eye(dim, dtype=np.complex128)
        out[gate.m - 1, gate.m - 1] = 0.0
        out[gate.n - 1, gate.n - 1] = 0.0
        out[gate.m - 1, gate.n - 1] = 1.0
        out[gate.n - 1, gate.m - 1] = 1.0
        return out
    raise TypeError(f"not a gate: {gate!r}")


def gates_matrix(gates: list[GateOp] | tuple[GateOp, ...], dim: int) -> ComplexMatrix:
    """Compose a gate list given in application order (first gate acts first)."""
    out = np.eye(dim, dtype=np.complex128)
    for g in gates:
        out = gate_matrix(g, dim) @ out
    return out


class Nulling(NamedTuple):
    theta: float
    phi: float
    degenerate: bool


def nulling_params(pivot_a: complex, pivot_b: complex, abs_eps: float = DEFAULT_ABS_EPS) -> Nulling:
    """Angles (theta, phi) so that right-multiplying by T_mn(theta, phi)^(-1)
    zeroes the row entry ``pivot_a`` (column n) against ``pivot_b`` (column m).

    Convention: tan(theta) = |a| / |b| with theta in [0, pi/2], and
    phi = pi + arg(a) - arg(b) wrapped to (-pi, pi].  After the update the
    column-m entry absorbs the full weight sqrt(|a|^2 + |b|^2) and the
    column-n entry is zero.  An already-null entry produces the identity
    gate (0, 0); if both entries vanish the result is flagged degenerate.
    """
    a, b = complex(pivot_a), complex(pivot_b)
    if abs(a) <= abs_eps and abs(b) <= abs_eps:
        return Nulling(0.0, 0.0, True)
    if abs(a) <= abs_eps:
        return Nulling(0.0, 0.0, False)
    if abs(b) <= abs_eps:
        return Nulling(math.pi / 2.0, 0.0, False)
    theta = math.atan2(abs(a), abs(b))
    # atan2 keeps subnormal components well-defined where cmath.phase errors
    arg_a = math.atan2(a.imag, a.real)
    arg_b = math.atan2(b.imag, b.real)
    phi = canonical_angle(math.pi + arg_a - arg_b)
    return Nulling(theta, phi, False)


def apply_tmn_inverse(work: ComplexMatrix, m: int, n: int, theta: float, phi: float) -> None:
    """In-place column update ``work <- work @ T_mn(theta, phi)^(-1)``."""
    c, s = math.cos(theta), math.sin(theta)
    e = cmath.exp(1j * phi)
    col_m = work[:, m - 1].copy()
    col_n = work[:, n - 1].copy()
    work[:, m - 1] = c * e * col_m - s * col_n
    work[:, n - 1] = s * e * col_m + c * col_n


# ---------------------------------------------------------------------------
# sampling and metrics
# ---------------------------------------------------------------------------


def haar_random_unitary(dim: int, seed: int) -> ComplexMatrix:
    """Seeded Haar-random unitary via QR of a Ginibre matrix with the usual
    phase correction of the R diagonal."""
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_su(dim: int, seed: int) -> SpecialUnitaryMatrix:
    """Haar-random special unitary: one column is rotated by a phase so that
    det = 1.  Deterministic for a fixed seed."""
    u = haar_random_unitary(dim, seed)
    det = np.linalg.det(u)
    u[:, 0] *= det.conjugate() / abs(det)
    return SpecialUnitaryMatrix(UnitaryMatrix(u))


def frob_distance(a: ComplexMatrix | UnitaryMatrix, b: ComplexMatrix | UnitaryMatrix) -> float:
    """Frobenius distance ||a - b||_F; requires equal dimensions."""
    am = a.data if isinstance(a, UnitaryMatrix) else np.asarray(a)
    bm = b.data if isinstance(b, UnitaryMatrix) else np.asarray(b)
    if am.shape != bm.shape:
        raise DimensionError(f"shape mismatch: {am.shape} vs {bm.shape}")
    return float(np.linalg.norm(am - bm))


def project_to_unitary(a: ComplexMatrix) -> ComplexMatrix:
    """Nearest unitary in Frobenius norm (polar factor via SVD)."""
    u, _, vh = np.linalg.svd(np.asarray(a, dtype=np.complex128))
    return u @ vh


# ---------------------------------------------------------------------------
# matrix text format
# ---------------------------------------------------------------------------

_COMPLEX_RE = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"(?P<im>[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$"
)


def format_complex(z: complex) -> str:
    """Render ``a+bi`` with full round-trip precision decimal floats."""
    re_part = float(z.real)
    im_part = float(z.imag)
    sign = "+" if (im_part > 0 or im_part == 0) else "-"
    return f"{re_part!r}{sign}{abs(im_part)!r}i"


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` (also tolerates bare reals and bare ``bi``)."""
    s = text.strip()
    m = _COMPLEX_RE.match(s)
    if m:
        return complex(float(m.group("re")), float(m.group("im")))
    if s.endswith("i"):
        body = s[:-1]
        try:
            return complex(0.0, float(body))
        except ValueError:
            raise ValueError(f"bad complex literal: {text!r}") from None
    try:
        return complex(float(s), 0.0)
    except ValueError:
        raise ValueError(f"bad complex literal: {text!r}") from None


def write_matrix(u: UnitaryMatrix | ComplexMatrix) -> str:
    """Serialize to the interchange format: ``dim N`` then N rows of N
    whitespace-separated ``a+bi`` entries."""
    arr = u.data if isinstance(u, UnitaryMatrix) else np.asarray(u)
    lines = [f"dim {arr.shape[0]}"]
    for row in arr:
        lines.append(" ".join(format_complex(z) for z in row))
    return "\n".join(lines) + "\n"


def read_matrix(text: str, check: bool = True) -> UnitaryMatrix | ComplexMatrix:
    """Parse the interchange format.  ``#`` begins a comment line.

    Raises :class:`MatrixFormatError` with a line/column on malformed input
    and :class:`NotUnitaryError` on non-unitary data unless ``check=False``
    (in which case a raw array is returned).
    """
    dim: int | None = None
    rows: list[list[complex]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if dim is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "dim":
                raise MatrixFormatError("expected header 'dim N'", line=lineno)
            try:
                dim = int(parts[1])
            except ValueError:
                raise MatrixFormatError(f"bad dimension {parts[1]!r}", line=lineno) from None
            if dim < 1:
                raise MatrixFormatError("dim must be >= 1", line=lineno)
            continue
        tokens = line.split()
        if len(tokens) != dim:
            raise MatrixFormatError(
                f"row {len(rows) + 1} has {len(tokens)} entries, expected {dim}",
                line=lineno,
            )
        row = []
        for colno, tok in enumerate(tokens, start=1):
            try:
                row.append(parse_complex(tok))
            except ValueError as exc:
                raise MatrixFormatError(str(exc), line=lineno, column=colno) from None
        rows.append(row)
    if dim is None:
        raise MatrixFormatError("empty input: missing 'dim N' header")
    if len(rows) != dim:
        raise MatrixFormatError(f"expected {dim} rows, found {len(rows)}")
    arr = np.array(rows, dtype=np.complex128)
    if not check:
        return arr
    return UnitaryMatrix(arr)
