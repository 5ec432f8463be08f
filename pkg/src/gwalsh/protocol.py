"""Two-party encoding exchange and companion-matrix solving.

Two Walsh-generating matrices A and B are *companions* when every pair
of non-constant rows satisfies

    <row_l of B, row_k of A> = <row_l of A, row_k of B>,

which is equivalent to the same identity between their Walsh functions
in L2[0,1] (checked brute force by :func:`pairing_check_basis`).  For a
companion pair, analysis by A and synthesis by B compose to the identity
after two rounds, which carries a four-message exchange:

    w1 = analysis_A(f)    (Alice to Bob)
    w2 = synthesis_B(w1)  (Bob to Alice)
    w3 = analysis_A(w2)   (Alice to Bob)
    f' = synthesis_B(w3)  (Bob recovers the signal)

For a real 3x3 matrix the companion condition leaves a one-parameter
family, solved in closed form by :func:`solve_companion`; for other
sizes (or complex entries) :func:`solve_companion_numeric` runs a
seeded least-squares descent on the full constraint system.  Alice
publishes her constraint rows only after scaling each by a random
nonzero factor (:func:`mask_constraints`), which leaves the solution
set unchanged.

Exchange messages pass through a channel (in-memory or a directory of
files) in the CSV wire formats of :mod:`gwalsh.transform`, so each step
crosses a real serialization boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    BaseMismatchError,
    DegenerateEliminationError,
    DimensionMismatchError,
    NoConvergenceError,
    NoRealSolutionError,
    ValidationError,
)
from .matrix import (
    BRANCHES,
    DEFAULT_EXTERNAL_TOL,
    RowPair,
    WalshMatrix,
    constant_row,
    row_inner,
    validate,
)
from .transform import (
    CoefficientVector,
    Signal,
    coefficients_from_text,
    coefficients_to_text,
    dwt_fast,
    idwt,
    signal_from_text,
    signal_to_text,
)
from .basis import grid_matrix


@dataclass(frozen=True)
class PairingReport:
    """Result of the row-level companion check."""

    holds: bool
    worst_pair: RowPair | None
    worst_residual: float


@dataclass(frozen=True)
class BasisPairingReport:
    """Result of the brute-force L2 companion check."""

    holds: bool
    worst_indices: tuple[int, int]
    worst_residual: float


@dataclass(frozen=True, eq=False)
class CompanionFamily:
    """One-parameter family of companions of a fixed real 3x3 matrix.

    Members are indexed by the free parameter r, the last entry of the
    last row; real members exist for |r| <= admissible_bound (which is
    sqrt(2/3) for any valid base matrix).
    """

    base_matrix: WalshMatrix
    admissible_bound: float
    branch: str
    free_param_name: str = "r"

    @property
    def admissible_range(self) -> tuple[float, float]:
        return (-self.admissible_bound, self.admissible_bound)

    def member(self, r: float) -> WalshMatrix:
        return solve_companion(self.base_matrix, r, branch=self.branch)


@dataclass(frozen=True)
class MaskedEquation:
    """One published linear constraint on the unknown entries b_i_j."""

    coeffs: dict
    rhs: float = 0.0


@dataclass(frozen=True)
class MaskedConstraintSystem:
    """Companion constraints with each equation scaled by a random factor.

    The scalars are nonzero, so the solution set coincides with the
    unmasked system's.
    """

    n: int
    equations: tuple[MaskedEquation, ...]
    mask_seed: int | None = None


@dataclass(frozen=True, eq=False)
class ExchangeTranscript:
    """The three exchanged messages plus the recovered signal."""

    w1: CoefficientVector
    w2: Signal
    w3: CoefficientVector
    recovered: Signal
    max_error: float
    pairing_violated: bool


def pairing_check_rows(a: WalshMatrix, b: WalshMatrix, tol: float = 1e-8) -> PairingReport:
    """Check the row-level companion condition over all pairs l < k >= 1."""
    if a.n != b.n:
        raise DimensionMismatchError(f"matrix sizes differ: {a.n} vs {b.n}")
    worst_pair = None
    worst = 0.0
    for l in range(1, a.n):
        for k in range(l + 1, a.n):
            residual = abs(row_inner(a, b, l, k) - row_inner(b, a, l, k))
            if residual >= worst:
                worst = float(residual)
                worst_pair = RowPair(l=l, k=k)
    return PairingReport(holds=worst <= tol, worst_pair=worst_pair, worst_residual=worst)


def pairing_check_basis(
    a: WalshMatrix, b: WalshMatrix, q: int, tol: float = 1e-8
) -> BasisPairingReport:
    """Brute-force L2 check of the companion condition on all Walsh pairs < N^q."""
    if a.n != b.n:
        raise DimensionMismatchError(f"matrix sizes differ: {a.n} vs {b.n}")
    width = a.n**q
    ga = grid_matrix(a, q)
    gb = grid_matrix(b, q)
    lhs = (gb @ ga.conj().T) / width  # [l, k] = <W_l of B, W_k of A>
    rhs = (ga @ gb.conj().T) / width  # [l, k] = <W_l of A, W_k of B>
    residuals = np.abs(lhs - rhs)
    flat = int(residuals.argmax())
    worst_indices = (flat // width, flat % width)
    worst = float(residuals.max())
    return BasisPairingReport(holds=worst <= tol, worst_indices=worst_indices, worst_residual=worst)


def _real_rows(a: WalshMatrix):
    if not a.is_real:
        raise ValidationError("operation requires a real matrix")
    return a.entries


def solve_companion(a: WalshMatrix, r: float, branch: str = "plus") -> WalshMatrix:
    """Closed-form companion of a real 3x3 matrix with last entry r.

    The two non-constant rows of any companion are an orthonormal pair
    inside the zero-sum plane, for which A's own non-constant rows (u, w)
    are an orthonormal basis.  Writing the companion rows as
    (c u + s w, s u - c w), the pairing condition holds identically and
    the remaining freedom is the point (s, c) on the unit circle with
    s u[2] - c w[2] = r.  That line meets the circle twice (``branch``
    picks the intersection) exactly when r^2 <= u[2]^2 + w[2]^2 = 2/3.
    """
    if a.n != 3:
        raise ValidationError(f"closed-form companion solve requires n=3, got n={a.n}")
    if branch not in BRANCHES:
        raise ValidationError(f"branch must be one of {BRANCHES}, got {branch!r}")
    entries = _real_rows(a)
    r = float(r)
    u, w = entries[1], entries[2]
    u2, w2 = float(u[2]), float(w[2])
    radius_sq = u2 * u2 + w2 * w2
    if radius_sq < 1e-12:
        raise DegenerateEliminationError(
            "last column carries no weight in the non-constant rows"
        )
    disc = radius_sq - r * r
    if disc < -1e-13:
        raise NoRealSolutionError(
            f"|r| <= {math.sqrt(radius_sq):.12g} required for a real companion, got r={r!r}"
        )
    if abs(disc) < 1e-14:
        disc = 0.0  # boundary |r|: the branches coincide
    radius = math.sqrt(radius_sq)
    t = math.sqrt(max(disc, 0.0)) / radius
    if branch == "minus":
        t = -t
    s = r * u2 / radius_sq + t * w2 / radius
    c = -r * w2 / radius_sq + t * u2 / radius
    row1 = c * u + s * w
    row2 = s * u - c * w
    row2 = row2.copy()
    row2[2] = r  # the family is indexed by r; pin the entry exactly
    return validate(
        np.vstack([constant_row(3), row1, row2]),
        tol=max(DEFAULT_EXTERNAL_TOL, a.tol),
    )


def companion_family(a: WalshMatrix, branch: str = "plus") -> CompanionFamily:
    """The one-parameter companion family of a real 3x3 matrix."""
    if a.n != 3:
        raise ValidationError(f"companion families are closed-form only for n=3, got {a.n}")
    entries = _real_rows(a)
    bound = math.sqrt(float(entries[1, 2] ** 2 + entries[2, 2] ** 2))
    return CompanionFamily(base_matrix=a, admissible_bound=bound, branch=branch)


def mask_constraints(a: WalshMatrix, mask_seed: int) -> MaskedConstraintSystem:
    """Publishable companion constraints, each scaled by a seeded random factor.

    Emits one equation per pair 1 <= l < k <= N-1:

        sum_j A[k, j] b_l_j - sum_j A[l, j] b_k_j = 0

    multiplied by a scalar with magnitude in [0.5, 2.0] and random sign.
    """
    entries = _real_rows(a)
    rng = np.random.default_rng(mask_seed)
    equations = []
    for l in range(1, a.n):
        for k in range(l + 1, a.n):
            scale = float(rng.uniform(0.5, 2.0))
            if rng.random() < 0.5:
                scale = -scale
            coeffs = {}
            for j in range(a.n):
                coeffs[f"b_{l}_{j}"] = scale * float(entries[k, j])
                coeffs[f"b_{k}_{j}"] = -scale * float(entries[l, j])
            equations.append(MaskedEquation(coeffs=coeffs, rhs=0.0))
    return MaskedConstraintSystem(n=a.n, equations=tuple(equations), mask_seed=mask_seed)


def _masked_rows(masked: MaskedConstraintSystem, n: int) -> list[tuple[np.ndarray, float]]:
    """Masked equations as ((n-1) x n) coefficient arrays over rows 1..n-1."""
    rows = []
    for eq in masked.equations:
        coeff = np.zeros((n - 1, n))
        for name, value in eq.coeffs.items():
            try:
                _, i, j = name.split("_")
                i, j = int(i), int(j)
            except ValueError:
                raise ValidationError(f"bad unknown name {name!r}") from None
            if not (1 <= i < n and 0 <= j < n):
                raise ValidationError(f"unknown {name!r} out of range for n={n}")
            coeff[i - 1, j] = float(value)
        rows.append((coeff, float(eq.rhs)))
    return rows


def solve_companion_numeric(
    a: WalshMatrix,
    masked: MaskedConstraintSystem | None = None,
    seed: int = 0,
    tol: float = 1e-10,
    exclude_trivial: bool = True,
    max_restarts: int = 24,
) -> WalshMatrix:
    """Seeded least-squares solve of the full companion constraint system.

    The residual stacks the unit-row, zero-sum and row-orthogonality
    constraints with the pairing equations (taken from ``masked`` when
    given, else derived unmasked from ``a``).  Starts are drawn from
    ``numpy.random.default_rng(seed)``; the first iterate whose residual
    is at most ``tol`` everywhere is certified and returned.  With
    ``exclude_trivial`` the trivial solution is rejected by restarting
    whenever the Frobenius distance to ``a`` falls below 0.1.  Complex
    matrices are handled by splitting unknowns into real and imaginary
    parts (the pairing equations then conjugate the second slot and are
    always derived from ``a``).
    """
    n = a.n
    if masked is not None and masked.n != n:
        raise DimensionMismatchError(f"masked system has n={masked.n}, matrix has n={n}")
    is_complex = not a.is_real
    if masked is not None and is_complex:
        raise ValidationError("masked systems carry real coefficients; "
                              "complex matrices derive pairing equations directly")
    rows = n - 1
    dim = rows * n * (2 if is_complex else 1)
    masked_rows = None if masked is None else _masked_rows(masked, n)
    entries = a.entries

    def unpack(x: np.ndarray) -> np.ndarray:
        if is_complex:
            return x[: rows * n].reshape(rows, n) + 1j * x[rows * n :].reshape(rows, n)
        return x.reshape(rows, n)

    def residuals(x: np.ndarray) -> np.ndarray:
        b = unpack(x)
        parts = [(np.abs(b) ** 2).sum(axis=1) - 1.0]
        zero_sum = b.sum(axis=1)
        parts.append(np.real(zero_sum))
        if is_complex:
            parts.append(np.imag(zero_sum))
        for i in range(rows):
            for j in range(i + 1, rows):
                ortho = (b[i] * b[j].conj()).sum()
                parts.append(np.atleast_1d(np.real(ortho)))
                if is_complex:
                    parts.append(np.atleast_1d(np.imag(ortho)))
        if masked_rows is not None:
            for coeff, rhs in masked_rows:
                parts.append(np.atleast_1d((coeff * b).sum() - rhs))
        else:
            # complex entries need the diagonal pairs too: the row-frame
            # matrix must be Hermitian, so <row_l of B, row_l of A> is real
            for l in range(1, n):
                for k in range(l if is_complex else l + 1, n):
                    pairing = (b[l - 1] * entries[k].conj()).sum() - (
                        entries[l] * b[k - 1].conj()
                    ).sum()
                    if k > l:
                        parts.append(np.atleast_1d(np.real(pairing)))
                    if is_complex:
                        parts.append(np.atleast_1d(np.imag(pairing)))
        return np.concatenate([np.atleast_1d(p) for p in parts])

    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(max_restarts):
        x0 = rng.standard_normal(dim) / math.sqrt(n)
        result = least_squares(residuals, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        residual = float(np.abs(residuals(result.x)).max())
        best = min(best, residual)
        if residual > tol:
            continue
        b_rows = unpack(result.x)
        full = np.vstack([constant_row(n).astype(b_rows.dtype), b_rows])
        if exclude_trivial and float(np.linalg.norm(full - entries)) < 0.1:
            continue
        return validate(full, tol=max(DEFAULT_EXTERNAL_TOL, 10 * n * tol))
    raise NoConvergenceError(
        f"no companion found in {max_restarts} restarts (best residual {best:.3e})",
        best_residual=best,
    )


# ---------------------------------------------------------------------------
# Exchange channels and the four-step run
# ---------------------------------------------------------------------------


class InMemoryChannel:
    """Message channel that serializes through in-process text buffers."""

    def __init__(self):
        self._store: dict[str, str] = {}

    def put(self, name: str, text: str) -> None:
        self._store[name] = text

    def get(self, name: str) -> str:
        return self._store[name]


class DirectoryChannel:
    """Message channel backed by files in a directory (one file per message)."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def put(self, name: str, text: str) -> None:
        (self.directory / name).write_text(text)

    def get(self, name: str) -> str:
        return (self.directory / name).read_text()


def run_exchange(
    a: WalshMatrix,
    b: WalshMatrix,
    s: Signal,
    channel=None,
    pairing_tol: float = 1e-7,
) -> ExchangeTranscript:
    """Run the four-step exchange and record the transcript.

    A violated pairing condition is flagged, not fatal: the exchange
    proceeds and the transcript carries the (then typically large)
    recovery error.  Every message crosses the channel in its CSV wire
    format.
    """
    if a.n != b.n:
        raise BaseMismatchError(f"matrix sizes differ: {a.n} vs {b.n}")
    if s.base != a.n:
        raise BaseMismatchError(f"signal base {s.base} does not match matrix base {a.n}")
    channel = channel if channel is not None else InMemoryChannel()
    pairing = pairing_check_rows(a, b, tol=pairing_tol)

    channel.put("w1.csv", coefficients_to_text(dwt_fast(a, s)))
    w1 = coefficients_from_text(channel.get("w1.csv"))
    channel.put("w2.csv", signal_to_text(idwt(b, w1)))
    w2 = signal_from_text(channel.get("w2.csv"))
    channel.put("w3.csv", coefficients_to_text(dwt_fast(a, w2)))
    w3 = coefficients_from_text(channel.get("w3.csv"))
    recovered = idwt(b, w3)

    max_error = float(np.abs(recovered.values - s.values).max())
    return ExchangeTranscript(
        w1=w1,
        w2=w2,
        w3=w3,
        recovered=recovered,
        max_error=max_error,
        pairing_violated=not pairing.holds,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _seq_to_json(values: np.ndarray) -> list:
    if np.iscomplexobj(values):
        return [[float(x.real), float(x.imag)] for x in values]
    return [float(x) for x in values]


def _seq_from_json(raw) -> np.ndarray:
    if raw and isinstance(raw[0], (list, tuple)):
        return np.asarray([complex(x[0], x[1]) for x in raw])
    return np.asarray([float(x) for x in raw])


def transcript_to_dict(t: ExchangeTranscript) -> dict:
    return {
        "n": t.w1.base,
        "q": t.w1.q,
        "w1": _seq_to_json(t.w1.coeffs),
        "w2": _seq_to_json(t.w2.values),
        "w3": _seq_to_json(t.w3.coeffs),
        "recovered": _seq_to_json(t.recovered.values),
        "max_error": t.max_error,
        "pairing_violated": t.pairing_violated,
    }


def transcript_from_dict(d: dict) -> ExchangeTranscript:
    n, q = int(d["n"]), int(d["q"])
    return ExchangeTranscript(
        w1=CoefficientVector(base=n, q=q, coeffs=_seq_from_json(d["w1"])),
        w2=Signal(base=n, q=q, values=_seq_from_json(d["w2"])),
        w3=CoefficientVector(base=n, q=q, coeffs=_seq_from_json(d["w3"])),
        recovered=Signal(base=n, q=q, values=_seq_from_json(d["recovered"])),
        max_error=float(d["max_error"]),
        pairing_violated=bool(d["pairing_violated"]),
    )


def save_transcript(t: ExchangeTranscript, path) -> None:
    Path(path).write_text(json.dumps(transcript_to_dict(t), indent=2) + "\n")


def load_transcript(path) -> ExchangeTranscript:
    return transcript_from_dict(json.loads(Path(path).read_text()))


def masked_system_to_list(m: MaskedConstraintSystem) -> list:
    return [{"coeffs": dict(eq.coeffs), "rhs": eq.rhs} for eq in m.equations]


def masked_system_from_list(raw, mask_seed: int | None = None) -> MaskedConstraintSystem:
    equations = []
    n = 0
    for item in raw:
        coeffs = {str(k): float(v) for k, v in item["coeffs"].items()}
        for name in coeffs:
            try:
                _, i, j = name.split("_")
                n = max(n, int(i) + 1, int(j) + 1)
            except ValueError:
                raise ValidationError(f"bad unknown name {name!r}") from None
        equations.append(MaskedEquation(coeffs=coeffs, rhs=float(item.get("rhs", 0.0))))
    if n < 2:
        raise ValidationError("masked system names no unknowns")
    return MaskedConstraintSystem(n=n, equations=tuple(equations), mask_seed=mask_seed)


def save_masked_system(m: MaskedConstraintSystem, path) -> None:
    Path(path).write_text(json.dumps(masked_system_to_list(m), indent=2) + "\n")


def load_masked_system(path) -> MaskedConstraintSystem:
    return masked_system_from_list(json.loads(Path(path).read_text()))
