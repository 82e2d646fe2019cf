import pytest
import sympy as sym
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from app.errors import (
    HDegreeOverflowError,
    IntegrabilityError,
    InvalidLiteralError,
    InvalidParameterError,
    UnsupportedPoleError,
)
from app.scalar_field import (
    H,
    XI,
    RationalFn,
    diff_xi,
    format_gaussian,
    format_rational,
    h_coefficient,
    integrate_line,
    parse_gaussian,
    parse_rational,
    pf_decompose,
    pi_plus,
    pi_prime,
    residue,
    to_scalar,
)

I = sym.I


class TestLiterals:
    """Parsing and canonical printing of exact rational and Gaussian literals."""

    def test_parse_rational_reduces(self):
        """Test that p/q literals are reduced to lowest terms."""
        assert parse_rational("2/4") == sym.Rational(1, 2)
        assert parse_rational("-7/3") == sym.Rational(-7, 3)
        assert parse_rational(5) == 5

    def test_zero_denominator_rejected(self):
        """Test that a zero denominator is an invalid literal."""
        with pytest.raises(InvalidLiteralError):
            parse_rational("3/0")

    def test_float_literal_rejected(self):
        """Test that floating point text never enters the engine."""
        with pytest.raises(InvalidLiteralError):
            parse_rational("0.5")
        with pytest.raises(InvalidParameterError):
            parse_rational("abc")

    def test_parse_gaussian_forms(self):
        """Test the real-only, imaginary-only and mixed Gaussian forms."""
        assert parse_gaussian("3/4") == sym.Rational(3, 4)
        assert parse_gaussian("i") == I
        assert parse_gaussian("-i") == -I
        assert parse_gaussian("2-i") == 2 - I
        assert parse_gaussian("1/2+3/4*i") == sym.Rational(1, 2) + sym.Rational(3, 4) * I

    def test_format_gaussian(self):
        """Test canonical text of Gaussian rationals."""
        assert format_rational(sym.Rational(6, 4)) == "3/2"
        assert format_gaussian(sym.Rational(-2)) == "-2"
        assert format_gaussian(-I) == "-i"
        assert format_gaussian(sym.Rational(3) - sym.Rational(2, 5) * I) == "3-2/5*i"
        assert format_gaussian(sym.Rational(1, 2) + sym.Rational(3, 4) * I) == "1/2+3/4*i"


class TestScalars:
    """ScalarRing validation: polynomials in h with Gaussian coefficients."""

    def test_h_coefficient(self):
        """Test extraction of the h'(0) coefficient."""
        assert h_coefficient(3 * H) == 3
        assert h_coefficient(sym.S.Zero) == 0
        with pytest.raises(HDegreeOverflowError):
            h_coefficient(H + 1)

    def test_degree_cap(self):
        """Test that powers of h above the cap are refused."""
        assert to_scalar(H**2 + I) == H**2 + I
        with pytest.raises(HDegreeOverflowError):
            to_scalar(H**3)

    def test_stray_symbol_rejected(self):
        """Test that scalars cannot depend on xi."""
        with pytest.raises(InvalidParameterError):
            to_scalar(XI + 1)


class TestRationalFunctions:
    """Partial fractions, residues, projections and line integrals."""

    def setup_method(self):
        """Set up test fixtures."""
        self.lorentz = RationalFn.from_expr(1 / (1 + XI**2))
        self.squared = RationalFn.from_expr(1 / (1 + XI**2) ** 2)

    def test_normalization_cancels_poles(self):
        """Test that common factors with the pole are cancelled."""
        assert RationalFn(XI - I, 1, 1) == RationalFn(1, 0, 1)
        assert RationalFn(XI - I, 1, 1).p == 0

    def test_residue_at_i(self):
        """Test the residue of 1/(1+xi^2) at +i."""
        assert residue(self.lorentz, I) == -I / 2
        assert residue(self.lorentz, -I) == I / 2

    def test_residue_only_at_supported_poles(self):
        """Test that poles other than +-i are unsupported."""
        with pytest.raises(UnsupportedPoleError):
            residue(self.lorentz, sym.Integer(2))

    def test_pi_plus_of_squared_lorentzian(self):
        """Test the projection of 1/(1+xi^2)^2 onto functions with poles at +i."""
        expected = RationalFn.from_expr(-(I * XI + 2) / (4 * (XI - I) ** 2))
        assert pi_plus(self.squared) == expected

    def test_pi_prime(self):
        """Test that pi' is i times the residue at +i."""
        assert pi_prime(self.lorentz) == sym.Rational(1, 2)

    def test_integrate_line(self):
        """Test real-line integrals as exact coefficients of pi."""
        assert integrate_line(self.lorentz) == 1
        assert integrate_line(H * self.squared) == H / 2

    def test_integrate_line_rejects_slow_decay(self):
        """Test that a numerator of too high degree is not integrable."""
        with pytest.raises(IntegrabilityError):
            integrate_line(RationalFn.from_expr(XI / (1 + XI**2)))

    def test_diff_xi(self):
        """Test differentiation in xi."""
        assert diff_xi(RationalFn(1, 1, 0)) == RationalFn.from_expr(-1 / (XI - I) ** 2)
        assert diff_xi(self.lorentz, 0) == self.lorentz

    def test_pf_decompose_terms(self):
        """Test the principal parts of 1/(1+xi^2)."""
        decomposition = pf_decompose(self.lorentz)
        assert decomposition.polynomial == 0
        assert {(t.pole, t.order, t.coefficient) for t in decomposition.terms} == {
            (I, 1, -I / 2),
            (-I, 1, I / 2),
        }
        assert decomposition.recompose() == self.lorentz

    @settings(max_examples=25, deadline=None)
    @given(
        coefficients=st.lists(st.integers(-5, 5), min_size=1, max_size=3),
        p=st.integers(0, 3),
        q=st.integers(0, 3),
    )
    def test_pi_plus_idempotent(self, coefficients, p, q):
        """Test that pi+ is a projection and removes the whole +i principal part."""
        numerator = sum(c * XI**k for k, c in enumerate(coefficients))
        f = RationalFn(numerator, p, q)
        once = pi_plus(f)
        assert pi_plus(once) == once
        assert residue(f - once, I) == 0

    @settings(max_examples=25, deadline=None)
    @given(c0=st.integers(-5, 5), c1=st.integers(-5, 5), p=st.integers(1, 3), q=st.integers(1, 3))
    def test_residues_cancel_for_decaying_functions(self, c0, c1, p, q):
        """Test that the residues at +i and -i sum to zero when the function decays fast."""
        f = RationalFn(c0 + c1 * XI, p, q)
        if c1 != 0 and p + q < 3:
            return
        assert sym.expand(residue(f, I) + residue(f, -I)) == 0

    def test_diff_xi_of_q1_entry(self):
        """Test the second xi-derivative of i xi/(ab(1+xi^2)) at a = 1, b = 2."""
        ab = 2
        entry = RationalFn.from_expr(I * XI / (ab * (1 + XI**2)))
        expected = RationalFn.from_expr(I * (2 * XI**3 - 6 * XI) / (ab * (1 + XI**2) ** 3))
        assert diff_xi(entry, 2) == expected
        assert diff_xi(self.lorentz) == RationalFn.from_expr(-2 * XI / (1 + XI**2) ** 2)

    @settings(max_examples=25, deadline=None)
    @given(
        coefficients=st.lists(st.integers(-9, 9), min_size=1, max_size=9),
        imaginary=st.integers(-3, 3),
        p=st.integers(0, 5),
        q=st.integers(0, 5),
    )
    def test_pf_round_trip(self, coefficients, imaginary, p, q):
        """Test that partial fractions recompose to the input, polynomial part included."""
        assume(any(coefficients))
        numerator = sum(c * XI**k for k, c in enumerate(coefficients)) + imaginary * I
        f = RationalFn(numerator, p, q)
        assert pf_decompose(f).recompose() == f

    @settings(max_examples=10, deadline=None)
    @given(coefficients=st.lists(st.integers(-4, 4), min_size=1, max_size=5), order=st.integers(1, 3))
    def test_pi_prime_matches_line_integral(self, coefficients, order):
        """Test pi'(f) = (1/2pi) int f against sympy's own improper integral."""
        numerator = sum(c * XI**k for k, c in enumerate(coefficients[: 2 * order - 1]))
        assume(numerator != 0)
        expr = numerator / (1 + XI**2) ** order
        f = RationalFn.from_expr(expr)
        x = sym.Symbol("x", real=True)
        exact = sym.integrate(expr.subs(XI, x), (x, -sym.oo, sym.oo))
        assert sym.simplify(exact / sym.pi - integrate_line(f)) == 0
        assert sym.simplify(2 * pi_prime(f) - integrate_line(f)) == 0
