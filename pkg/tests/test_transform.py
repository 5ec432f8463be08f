import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import reference_values as rv
from gwalsh import (
    BaseMismatchError,
    CoefficientVector,
    Signal,
    ValidationError,
    count_multiplies,
    dwt_fast,
    dwt_naive,
    generate_random,
    grid_matrix,
    idwt,
    parseval_residual,
    random_signal,
    signal_from_digits,
)
from gwalsh.transform import (
    coefficients_from_text,
    coefficients_to_text,
    read_coefficients,
    read_signal,
    signal_from_text,
    signal_to_text,
    write_coefficients,
    write_signal,
)


class TestSignalTypes:
    def test_from_values_infers_resolution(self):
        s = Signal.from_values(3, np.zeros(27))
        assert (s.base, s.q) == (3, 3)

    def test_bad_length(self):
        with pytest.raises(ValidationError):
            Signal.from_values(3, np.zeros(10))
        with pytest.raises(ValidationError):
            Signal(base=3, q=2, values=np.zeros(8))

    def test_values_read_only(self, signal_f):
        with pytest.raises(ValueError):
            signal_f.values[0] = 5.0

    def test_inline_digits(self, signal_f):
        assert len(signal_f) == 27
        assert signal_f.values[3] == 1.0
        assert signal_f.values[26] == 2.0
        with pytest.raises(ValidationError):
            signal_from_digits("0a1", base=3)
        with pytest.raises(ValidationError):
            signal_from_digits("0011", base=3)  # 4 cells is not a power of 3


class TestForwardTransform:
    def test_constant_signal(self, matrix_a):
        s = Signal.from_values(3, np.full(27, 2.5))
        c = dwt_fast(matrix_a, s)
        assert c.coeffs[0] == pytest.approx(2.5, abs=1e-12)
        assert np.abs(c.coeffs[1:]).max() <= 1e-12

    def test_golden_coefficients(self, matrix_a, signal_f):
        for op in (dwt_naive, dwt_fast):
            c = op(matrix_a, signal_f)
            assert c.coeffs[0] == pytest.approx(rv.SIGNAL_MEAN, abs=1e-12)
            assert np.abs(c.coeffs[1:] - rv.ENCODED_TAIL).max() <= 1e-8

    def test_fast_matches_naive_randomized(self):
        rng = np.random.default_rng(42)
        for trial in range(60):
            base = int(rng.integers(2, 5))
            q = int(rng.integers(1, 5))
            a = generate_random(base, seed=trial)
            s = Signal(base=base, q=q, values=rng.standard_normal(base**q))
            fast = dwt_fast(a, s).coeffs
            naive = dwt_naive(a, s).coeffs
            assert np.abs(fast - naive).max() <= 1e-10

    def test_fast_matches_naive_complex(self):
        rng = np.random.default_rng(5)
        a = generate_random(3, seed=8, complex_entries=True)
        s = Signal(base=3, q=3, values=rng.standard_normal(27) + 1j * rng.standard_normal(27))
        fast = dwt_fast(a, s).coeffs
        naive = dwt_naive(a, s).coeffs
        assert np.abs(fast - naive).max() <= 1e-10

    def test_single_stage_is_matrix_product(self, matrix_a):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(3)
        c = dwt_fast(matrix_a, Signal(base=3, q=1, values=v))
        expected = (np.conj(matrix_a.entries) / np.sqrt(3)) @ v
        np.testing.assert_allclose(c.coeffs, expected, atol=1e-12)

    def test_base_mismatch(self, matrix_a):
        with pytest.raises(BaseMismatchError):
            dwt_fast(matrix_a, Signal.from_values(2, np.zeros(8)))

    def test_linearity(self, matrix_a):
        rng = np.random.default_rng(1)
        u = rng.standard_normal(27)
        v = rng.standard_normal(27)
        alpha, beta = 1.7, -0.3
        lhs = dwt_fast(matrix_a, Signal(base=3, q=3, values=alpha * u + beta * v)).coeffs
        rhs = (
            alpha * dwt_fast(matrix_a, Signal(base=3, q=3, values=u)).coeffs
            + beta * dwt_fast(matrix_a, Signal(base=3, q=3, values=v)).coeffs
        )
        assert np.abs(lhs - rhs).max() <= 1e-12


class TestInverseTransform:
    def test_round_trip_randomized(self):
        rng = np.random.default_rng(11)
        for trial in range(100):
            base = int(rng.integers(2, 5))
            q = int(rng.integers(1, 5))
            a = generate_random(base, seed=100 + trial)
            s = Signal(base=base, q=q, values=rng.standard_normal(base**q))
            back = idwt(a, dwt_fast(a, s))
            assert np.abs(back.values - s.values).max() <= 1e-10
            c = CoefficientVector(base=base, q=q, coeffs=rng.standard_normal(base**q))
            forward = dwt_fast(a, idwt(a, c))
            assert np.abs(forward.coeffs - c.coeffs).max() <= 1e-10

    def test_pure_zeroth_coefficient(self, matrix_a):
        c = CoefficientVector(base=3, q=2, coeffs=[4.0] + [0.0] * 8)
        s = idwt(matrix_a, c)
        np.testing.assert_allclose(s.values, np.full(9, 4.0), atol=1e-12)

    def test_matches_grid_synthesis(self, matrix_a):
        # independent route: v_j = sum_n c_n * W_n(cell j) via the dense grid
        rng = np.random.default_rng(3)
        c = rng.standard_normal(27)
        via_stages = idwt(matrix_a, CoefficientVector(base=3, q=3, coeffs=c)).values
        via_grid = grid_matrix(matrix_a, 3).T @ c
        assert np.abs(via_stages - via_grid).max() <= 1e-11

    def test_relayed_signal_shape(self, matrix_a, matrix_b, signal_f):
        # synthesis under the companion of the coefficients of f: still a
        # 27-cell real signal (its values are checked by the exchange tests)
        relayed = idwt(matrix_b, dwt_fast(matrix_a, signal_f))
        assert len(relayed) == 27
        assert not np.iscomplexobj(relayed.values)
        assert not np.allclose(relayed.values, signal_f.values)


class TestParseval:
    def test_exactly_unitary(self, matrix_a):
        rng = np.random.default_rng(2)
        s = Signal(base=3, q=3, values=rng.standard_normal(27))
        assert parseval_residual(matrix_a, s) <= 1e-10

    def test_approximately_unitary(self, matrix_b, signal_f):
        assert parseval_residual(matrix_b, signal_f) <= 1e-8

    def test_zero_signal(self, matrix_a):
        assert parseval_residual(matrix_a, Signal.from_values(3, np.zeros(27))) == 0.0


class TestMultiplyCount:
    @pytest.mark.parametrize("base,q", [(2, 3), (3, 2), (3, 5), (4, 3)])
    def test_forward_count_exact(self, base, q):
        a = generate_random(base, seed=1)
        s = random_signal(base, q, seed=2)
        with count_multiplies() as counter:
            dwt_fast(a, s)
        assert counter.count == q * base ** (q + 1)

    def test_inverse_count_exact(self):
        a = generate_random(3, seed=1)
        s = random_signal(3, 4, seed=2)
        c = dwt_fast(a, s)
        with count_multiplies() as counter:
            idwt(a, c)
        assert counter.count == 4 * 3**5

    def test_naive_not_counted(self, matrix_a, signal_f):
        with count_multiplies() as counter:
            dwt_naive(matrix_a, signal_f)
        assert counter.count == 0


class TestSerialization:
    def test_signal_header(self, signal_f):
        text = signal_to_text(signal_f)
        assert text.splitlines()[0] == "# gwalsh signal N=3 q=3"

    def test_coeffs_header(self, matrix_a, signal_f):
        text = coefficients_to_text(dwt_fast(matrix_a, signal_f))
        assert text.splitlines()[0] == "# gwalsh coeffs N=3 q=3"

    def test_signal_round_trip_exact(self, tmp_path):
        s = random_signal(3, 3, seed=4)
        path = tmp_path / "s.csv"
        write_signal(s, path)
        loaded = read_signal(path)
        assert np.array_equal(loaded.values, s.values)
        assert (loaded.base, loaded.q) == (3, 3)

    def test_complex_round_trip(self, tmp_path):
        s = random_signal(2, 3, seed=4, complex_values=True)
        path = tmp_path / "s.csv"
        write_signal(s, path)
        loaded = read_signal(path)
        assert np.array_equal(loaded.values, s.values)

    def test_coefficients_round_trip(self, tmp_path, matrix_a, signal_f):
        c = dwt_fast(matrix_a, signal_f)
        path = tmp_path / "c.csv"
        write_coefficients(c, path)
        assert np.array_equal(read_coefficients(path).coeffs, c.coeffs)

    def test_limited_digits(self):
        s = Signal.from_values(2, [1 / 3, 2 / 3])
        text = signal_to_text(s, digits=12)
        assert text.splitlines()[1] == "0.333333333333"

    def test_kind_mismatch(self, signal_f):
        with pytest.raises(ValidationError):
            coefficients_from_text(signal_to_text(signal_f))

    def test_bad_header(self):
        with pytest.raises(ValidationError):
            signal_from_text("# something else\n0\n")

    def test_wrong_count(self):
        with pytest.raises(ValidationError):
            signal_from_text("# gwalsh signal N=3 q=1\n0\n1\n")

    def test_bad_value(self):
        with pytest.raises(ValidationError):
            signal_from_text("# gwalsh signal N=2 q=0\nhello\n")


@settings(max_examples=30)
@given(st.lists(st.floats(-1e6, 1e6), min_size=8, max_size=8))
def test_text_round_trip_property(values):
    s = Signal.from_values(2, values)
    assert np.array_equal(signal_from_text(signal_to_text(s)).values, s.values)
