"""Discrete generalized Walsh transform over N^q samples.

A signal is a piecewise-constant function on [0, 1) stored as its N^q
cell values.  The forward transform returns the exact L2[0,1] inner
products of the signal against the Walsh functions of a generating
matrix A, in natural index order:

    c_n = (1/N^q) * sum_j v_j * conj(W_n(cell j))

Two implementations are provided: a naive quadratic reference summing
the definition row by row, and a radix-N butterfly (``dwt_fast``) doing
q stages of N x N kernel applications, q * N^(q+1) scalar multiplies in
all.  The butterfly works on the index conventions directly: the
coefficient index uses least-significant-first digits while the cell
index uses most-significant-first digits, so a digit-reversal
permutation reconciles the two after the stages.

The inverse transform synthesizes v_j = sum_n c_n * W_n(cell j) with the
transposed stage structure.  For a unitary matrix this is the exact
inverse of the forward transform; for an approximately unitary matrix it
is still the synthesis operator (no numerical matrix inversion).
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import digit_reversal_permutation, scaled_rows, walsh_on_grid
from .errors import BaseMismatchError, ValidationError
from .matrix import WalshMatrix


def _as_cells(values, base: int, q: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.shape[0] != base**q:
        raise ValidationError(
            f"expected {base**q} cell values for base {base}, q {q}, got shape {arr.shape}"
        )
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.float64)
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _infer_q(base: int, length: int) -> int:
    q = 0
    width = 1
    while width < length:
        width *= base
        q += 1
    if width != length:
        raise ValidationError(f"length {length} is not a power of base {base}")
    return q


@dataclass(frozen=True, eq=False)
class Signal:
    """Piecewise-constant function on [0, 1): value j on [j/N^q, (j+1)/N^q)."""

    base: int
    q: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_cells(self.values, self.base, self.q))

    @classmethod
    def from_values(cls, base: int, values) -> "Signal":
        arr = np.asarray(values)
        return cls(base=base, q=_infer_q(base, arr.shape[0]), values=arr)

    def __len__(self) -> int:
        return self.base**self.q


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Walsh coefficients c_0..c_{N^q-1} in natural index order."""

    base: int
    q: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_cells(self.coeffs, self.base, self.q))

    @classmethod
    def from_values(cls, base: int, coeffs) -> "CoefficientVector":
        arr = np.asarray(coeffs)
        return cls(base=base, q=_infer_q(base, arr.shape[0]), coeffs=arr)

    def __len__(self) -> int:
        return self.base**self.q


class MultiplyCounter:
    """Tally of scalar multiplies performed by the butterfly transforms."""

    def __init__(self):
        self.count = 0


_active_counters: list[MultiplyCounter] = []


@contextmanager
def count_multiplies():
    """Context manager yielding a :class:`MultiplyCounter` for the block."""
    counter = MultiplyCounter()
    _active_counters.append(counter)
    try:
        yield counter
    finally:
        _active_counters.remove(counter)


def _tally(count: int) -> None:
    for counter in _active_counters:
        counter.count += count


def _check_base(a: WalshMatrix, base: int) -> None:
    if a.n != base:
        raise BaseMismatchError(f"matrix base {a.n} does not match data base {base}")


def dwt_naive(a: WalshMatrix, s: Signal) -> CoefficientVector:
    """Quadratic reference transform, summed directly from the definition."""
    _check_base(a, s.base)
    width = s.base**s.q
    out = None
    for n in range(width):
        row = np.conj(walsh_on_grid(a, n, s.q))
        value = (s.values * row).sum() / width
        if out is None:
            out = np.zeros(width, dtype=np.result_type(value))
        out[n] = value
    return CoefficientVector(base=s.base, q=s.q, coeffs=out)


def _stages(kernel: np.ndarray, data: np.ndarray, base: int, q: int) -> np.ndarray:
    """Apply the N x N kernel along each of the q digit axes in turn."""
    out = data
    for _ in range(q):
        out = (kernel @ out.reshape(base, -1)).T.ravel()
        _tally(base ** (q + 1))
    return out


def dwt_fast(a: WalshMatrix, s: Signal) -> CoefficientVector:
    """Radix-N butterfly transform; same contract as :func:`dwt_naive`."""
    _check_base(a, s.base)
    kernel = np.conj(scaled_rows(a)) / a.n  # row 0 is exactly 1/N
    staged = _stages(kernel, s.values, s.base, s.q)
    coeffs = staged[digit_reversal_permutation(s.base, s.q)]
    return CoefficientVector(base=s.base, q=s.q, coeffs=coeffs)


def idwt(a: WalshMatrix, c: CoefficientVector) -> Signal:
    """Synthesize the signal with cell values sum_n c_n * W_n(cell j)."""
    _check_base(a, c.base)
    kernel = scaled_rows(a).T  # column 0 is exactly 1
    reordered = c.coeffs[digit_reversal_permutation(c.base, c.q)]
    values = _stages(kernel, reordered, c.base, c.q)
    return Signal(base=c.base, q=c.q, values=values)


def parseval_residual(a: WalshMatrix, s: Signal) -> float:
    """|sum |c_n|^2 - (1/N^q) sum |v_j|^2|, the Parseval defect."""
    c = dwt_fast(a, s)
    coeff_energy = float((np.abs(c.coeffs) ** 2).sum())
    signal_energy = float((np.abs(s.values) ** 2).mean())
    return abs(coeff_energy - signal_energy)


# ---------------------------------------------------------------------------
# CSV wire format: header "# gwalsh <kind> N=<n> q=<q>", one value per line,
# complex values as a "re,im" pair.
# ---------------------------------------------------------------------------

_HEADER = "# gwalsh {kind} N={base} q={q}"


def _format_value(x, digits: int | None) -> str:
    def one(v: float) -> str:
        return repr(float(v)) if digits is None else f"{float(v):.{digits}g}"

    if np.iscomplexobj(x) or isinstance(x, complex):
        return f"{one(np.real(x))},{one(np.imag(x))}"
    return one(x)


def _values_to_text(values: np.ndarray, kind: str, base: int, q: int,
                    digits: int | None = None) -> str:
    lines = [_HEADER.format(kind=kind, base=base, q=q)]
    lines.extend(_format_value(x, digits) for x in values)
    return "\n".join(lines) + "\n"


def _values_from_text(text: str, kind: str) -> tuple[int, int, np.ndarray]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValidationError("empty signal/coefficient file")
    head = lines[0].split()
    if (
        len(head) != 5
        or head[:2] != ["#", "gwalsh"]
        or head[2] != kind
        or not head[3].startswith("N=")
        or not head[4].startswith("q=")
    ):
        raise ValidationError(f"bad header for a gwalsh {kind} file: {lines[0]!r}")
    base = int(head[3][2:])
    q = int(head[4][2:])
    values = []
    for line in lines[1:]:
        parts = line.split(",")
        try:
            if len(parts) == 1:
                values.append(float(parts[0]))
            elif len(parts) == 2:
                values.append(complex(float(parts[0]), float(parts[1])))
            else:
                raise ValueError(line)
        except ValueError:
            raise ValidationError(f"bad value line: {line!r}") from None
    arr = np.asarray(values)
    if arr.shape[0] != base**q:
        raise ValidationError(
            f"header declares {base**q} values, file contains {arr.shape[0]}"
        )
    return base, q, arr


def signal_to_text(s: Signal, digits: int | None = None) -> str:
    return _values_to_text(s.values, "signal", s.base, s.q, digits)


def signal_from_text(text: str) -> Signal:
    base, q, values = _values_from_text(text, "signal")
    return Signal(base=base, q=q, values=values)


def coefficients_to_text(c: CoefficientVector, digits: int | None = None) -> str:
    return _values_to_text(c.coeffs, "coeffs", c.base, c.q, digits)


def coefficients_from_text(text: str) -> CoefficientVector:
    base, q, values = _values_from_text(text, "coeffs")
    return CoefficientVector(base=base, q=q, coeffs=values)


def write_signal(s: Signal, path, digits: int | None = None) -> None:
    Path(path).write_text(signal_to_text(s, digits))


def read_signal(path) -> Signal:
    return signal_from_text(Path(path).read_text())


def write_coefficients(c: CoefficientVector, path, digits: int | None = None) -> None:
    Path(path).write_text(coefficients_to_text(c, digits))


def read_coefficients(path) -> CoefficientVector:
    return coefficients_from_text(Path(path).read_text())


def random_signal(base: int, q: int, seed: int, complex_values: bool = False) -> Signal:
    """Seeded random signal with cell values uniform in [0, 1)."""
    rng = np.random.default_rng(seed)
    values = rng.random(base**q)
    if complex_values:
        values = values + 1j * rng.random(base**q)
    return Signal(base=base, q=q, values=values)


def signal_from_digits(text: str, base: int) -> Signal:
    """Signal whose cell j takes the numeric value of the j-th character."""
    text = text.strip()
    if not text:
        raise ValidationError("empty inline signal")
    values = []
    for ch in text:
        if not ch.isdigit():
            raise ValidationError(f"inline signal character {ch!r} is not a digit")
        values.append(float(ch))
    return Signal.from_values(base=base, values=values)
