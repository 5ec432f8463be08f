"""Generalized Walsh step functions and the reproducing kernel.

Given a Walsh-generating matrix A of size N, the level-0 building blocks
are the step functions

    m_i(x) = sqrt(N) * A[i, j]   for x in [j/N, (j+1)/N),

and the n-th Walsh function is the product m_{i_0}(x) m_{i_1}(r x) ...
over the base-N digits i_t of n (least significant first), where
r(x) = (N x) mod 1.  Since m_0 is identically 1, W_0 is identically 1.

Everything here evaluates through integer digit arithmetic on the cell
containing x: with n's digits i_t and the cell's leading base-N digits
k_0, k_1, ... (most significant first), the value is the product over t
of sqrt(N) * A[i_t, k_t].  Iterating r in floating point is never used,
so points are never misclassified across cell boundaries mid-product.

All cells are half-open [j/N^q, (j+1)/N^q); evaluation at x = 1 is
rejected rather than extended.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import BadRowError, DigitOverflowError, OutOfDomainError, ValidationError
from .matrix import WalshMatrix

#: largest grid size for which dense N^q x N^q matrices may be formed
MAX_GRID = 2048


@dataclass(frozen=True)
class DigitString:
    """Base-N digits of a nonnegative integer, least significant first."""

    base: int
    digits: tuple[int, ...]

    @property
    def value(self) -> int:
        v = 0
        for d in reversed(self.digits):
            v = v * self.base + d
        return v


@dataclass(frozen=True)
class CellIndex:
    """The j-th half-open cell [j/N^q, (j+1)/N^q) at resolution q."""

    q: int
    j: int

    def interval(self, base: int) -> tuple[float, float]:
        width = base**self.q
        return (self.j / width, (self.j + 1) / width)

    def midpoint(self, base: int) -> float:
        return (2 * self.j + 1) / (2 * base**self.q)


def digit_length(n: int, base: int) -> int:
    """Number of base-N digits of n (0 for n = 0)."""
    length = 0
    while n > 0:
        n //= base
        length += 1
    return length


def digits(n: int, base: int, pad_to: int | None = None) -> DigitString:
    """Base-N digits of n, least significant first, zero-padded to ``pad_to``."""
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    if base < 2:
        raise ValidationError(f"base must be at least 2, got {base}")
    width = digit_length(n, base) if pad_to is None else pad_to
    if pad_to is not None and n >= base**pad_to:
        raise DigitOverflowError(f"{n} does not fit in {pad_to} base-{base} digits")
    out = []
    for _ in range(width):
        out.append(n % base)
        n //= base
    return DigitString(base=base, digits=tuple(out))


def r_map(x: float, base: int) -> float:
    """One step of the base-N shift, r(x) = (N x) mod 1, on [0, 1)."""
    if not 0.0 <= x < 1.0:
        raise OutOfDomainError(f"x must lie in [0, 1), got {x!r}")
    scaled = base * x
    l = min(int(scaled), base - 1)
    return scaled - l


def cell_of(x: float, base: int, q: int) -> CellIndex:
    """Resolution-q cell containing x in [0, 1)."""
    if not 0.0 <= x < 1.0:
        raise OutOfDomainError(f"x must lie in [0, 1), got {x!r}")
    width = base**q
    j = min(int(x * width), width - 1)
    return CellIndex(q=q, j=j)


def scaled_rows(a: WalshMatrix) -> np.ndarray:
    """sqrt(N) times the entries, with the first row regenerated as exactly 1.

    Row i of the result is the step-function value table of m_i; the
    constant row is rebuilt analytically so that m_0 is exactly 1.
    """
    r = np.sqrt(a.n) * a.entries
    r[0, :] = 1.0
    r.flags.writeable = False
    return r


@lru_cache(maxsize=64)
def _digit_table(base: int, q: int) -> np.ndarray:
    """(base^q, q) table; column t holds the t-th least significant digit."""
    idx = np.arange(base**q)
    table = np.empty((base**q, q), dtype=np.intp)
    for t in range(q):
        table[:, t] = idx % base
        idx = idx // base
    table.flags.writeable = False
    return table


def digit_reversal_permutation(base: int, q: int) -> np.ndarray:
    """Permutation sending each index to the one with reversed base-N digits."""
    idx = np.arange(base**q)
    perm = np.zeros_like(idx)
    for _ in range(q):
        perm = perm * base + idx % base
        idx = idx // base
    return perm


def _check_row(a: WalshMatrix, i: int) -> None:
    if not 0 <= i < a.n:
        raise BadRowError(f"row index {i} out of range for n={a.n}")


def m_eval(a: WalshMatrix, i: int, x: float):
    """Value of the step function m_i at x: sqrt(N) * A[i, floor(N x)]."""
    _check_row(a, i)
    cell = cell_of(x, a.n, 1)
    return scaled_rows(a)[i, cell.j]


def walsh_eval(a: WalshMatrix, n: int, x: float):
    """Value of the n-th Walsh function at x.

    Uses the cell of x at the resolution given by n's digit count; the
    result is the digit product described in the module docstring.
    """
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    q = max(1, digit_length(n, a.n))
    cell = cell_of(x, a.n, q)
    ndig = digits(n, a.n, pad_to=q).digits
    kdig = digits(cell.j, a.n, pad_to=q).digits[::-1]
    r = scaled_rows(a)
    value = r.dtype.type(1)
    for i_t, k_t in zip(ndig, kdig):
        if i_t:
            value = value * r[i_t, k_t]
    return value


def walsh_on_grid(a: WalshMatrix, n: int, q: int) -> np.ndarray:
    """Constant value of the n-th Walsh function on each resolution-q cell.

    Entry j equals ``walsh_eval(a, n, (2 j + 1) / (2 N^q))``.
    """
    width = a.n**q
    if not 0 <= n < width:
        raise DigitOverflowError(f"need n < N^q = {width}, got n={n}")
    r = scaled_rows(a)
    ndig = digits(n, a.n, pad_to=q).digits
    table = _digit_table(a.n, q)
    values = np.ones(width, dtype=r.dtype)
    for t, i_t in enumerate(ndig):
        if i_t:
            values = values * r[i_t][table[:, q - 1 - t]]
    return values


def _cell_column(r: np.ndarray, base: int, q: int, j: int) -> np.ndarray:
    """Values W_n(cell j) for all n < N^q, as a Kronecker product of columns."""
    kdig = digits(j, base, pad_to=q).digits[::-1]
    return reduce(np.kron, [r[:, kdig[t]] for t in reversed(range(q))])


def dirichlet_kernel(a: WalshMatrix, q: int, x: float, t: float):
    """Sum over n < N^q of W_n(x) * conj(W_n(t)), computed directly.

    (The closed form is N^q when t lies in x's resolution-q cell and 0
    otherwise; tests compare against it, this function only sums.)
    """
    jx = cell_of(x, a.n, q).j
    jt = cell_of(t, a.n, q).j
    r = scaled_rows(a)
    col_x = _cell_column(r, a.n, q, jx)
    col_t = _cell_column(r, a.n, q, jt)
    return (col_x * np.conj(col_t)).sum()


def grid_matrix(a: WalshMatrix, q: int) -> np.ndarray:
    """Dense (N^q, N^q) matrix with entry [n, j] = W_n on cell j."""
    width = a.n**q
    if width > MAX_GRID:
        raise ValidationError(
            f"grid matrix of size {width} exceeds the dense limit {MAX_GRID}"
        )
    r = scaled_rows(a)
    power = reduce(np.kron, [r] * q)
    return power[digit_reversal_permutation(a.n, q), :]


def gram_defect(a: WalshMatrix, q: int) -> float:
    """Max deviation from identity of the Walsh Gram matrix at resolution q."""
    m = grid_matrix(a, q)
    gram = (m @ m.conj().T) / a.n**q
    return float(np.abs(gram - np.eye(a.n**q)).max())


def kernel_deviation(a: WalshMatrix, q: int, samples: int = 1000, seed: int = 0) -> float:
    """Max deviation of the kernel sum from its closed form, sampled randomly.

    The closed form is N^q when both points share a resolution-q cell and
    0 otherwise.
    """
    rng = np.random.default_rng(seed)
    width = a.n**q
    worst = 0.0
    for _ in range(samples):
        x, t = rng.random(), rng.random()
        expected = width if cell_of(x, a.n, q).j == cell_of(t, a.n, q).j else 0.0
        worst = max(worst, float(abs(dirichlet_kernel(a, q, x, t) - expected)))
    return worst
