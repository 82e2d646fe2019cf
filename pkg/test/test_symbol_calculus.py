import pytest
import sympy as sym

from app.errors import InvalidParameterError, ScopeError, SingularSymbolError
from app.exterior_algebra import Covector, Operator, rational_unit_directions
from app.scalar_field import XI, RationalFn
from app.symbol_calculus import (
    DEFAULT_PROBE_POINTS,
    BoundaryJet,
    RationalSymbol,
    build_sigma,
    closed_form_q1,
    closed_form_q2,
    composition_residual,
    invert_principal,
    operator_symbols,
)

DIRECTIONS = {
    3: Covector.tangential(("3/5", "4/5", "0")),
    4: Covector.tangential(("0", "4/5", "3/5", "0")),
}


def _symbols(a, b, which, n):
    return operator_symbols(sym.Rational(a), sym.Rational(b), which, DIRECTIONS[n], DEFAULT_PROBE_POINTS)


class TestPrincipalSymbol:
    """The principal symbol and its inverse at the boundary point."""

    def test_principal_squares_to_scalar(self):
        """Test p1^2 = ab |xi|^2 Id with |xi'| = 1."""
        p1, _ = build_sigma(1, 2, Operator.D, DIRECTIONS[3])
        scalar = (p1.value * p1.value).scalar_part()
        assert scalar is not None
        assert scalar == RationalFn(2 * (XI**2 + 1))

    def test_inverse_is_two_sided(self):
        """Test q-1 p1 = p1 q-1 = Id."""
        s = _symbols(2, 3, Operator.DSTAR, 3)
        identity = RationalSymbol.constant(sym.ImmutableMatrix(sym.eye(8)))
        assert (s.q1.value * s.p1.value).equals(identity)
        assert (s.p1.value * s.q1.value).equals(identity)

    def test_direction_must_be_unit(self):
        """Test that a non-unit xi' is refused."""
        with pytest.raises(InvalidParameterError):
            build_sigma(1, 1, Operator.D, Covector.tangential((1, 1, 0)))

    def test_zero_symbol_is_singular(self):
        """Test that a symbol without a scalar square cannot be inverted."""
        with pytest.raises(SingularSymbolError):
            invert_principal(BoundaryJet(RationalSymbol.zeros(8)))

    def test_unmodeled_normal_derivative(self):
        """Test that asking for a missing normal derivative is a scope error."""
        with pytest.raises(ScopeError):
            BoundaryJet(RationalSymbol.zeros(8)).normal_derivative()


class TestParametrix:
    """q-1 and q-2 against their closed forms."""

    @pytest.mark.parametrize("n", [3, 4])
    @pytest.mark.parametrize("which", [Operator.D, Operator.DSTAR])
    def test_closed_forms(self, n, which):
        """Test that the computed q-1, its normal derivative and q-2 match the closed forms."""
        s = _symbols(1, 2, which, n)
        q1 = closed_form_q1(1, 2, which, DIRECTIONS[n])
        assert s.q1.value.equals(q1.value)
        assert s.q1.normal_derivative().equals(q1.dxn)
        assert s.q2.value.equals(closed_form_q2(1, 2, which, DIRECTIONS[n]))

    @pytest.mark.parametrize("which", [Operator.D, Operator.DSTAR])
    def test_composition_residual_vanishes(self, which):
        """Test that p1 q-2 + p0 q-1 + sum d_xi p1 D_x q-1 is zero."""
        s = _symbols(2, 3, which, 4)
        assert composition_residual(s.p1, s.p0, s.q1, s.q2, s.xi_derivatives).is_zero()

    def test_swap_maps_d_to_dstar(self):
        """Test that the Dstar symbols at (a, b) are the D symbols at (b, a)."""
        star = _symbols(2, 3, Operator.DSTAR, 4)
        plain = _symbols(3, 2, Operator.D, 4)
        assert star.q1.value.equals(plain.q1.value)
        assert star.q2.value.equals(plain.q2.value)

    def test_order_lookup(self):
        """Test access by symbol order."""
        s = _symbols(1, 2, Operator.D, 3)
        assert s.order(-1) is s.q1
        assert s.order(-2) is s.q2
        with pytest.raises(ScopeError):
            s.order(-3)

    def test_tangential_xi_derivative_range(self):
        """Test that tangential derivatives of q-1 exist only for j < n."""
        s = _symbols(1, 2, Operator.D, 4)
        assert not s.q1_tangential_xi_derivative(1).is_zero()
        with pytest.raises(InvalidParameterError):
            s.q1_tangential_xi_derivative(4)

    def test_q2_h_degree(self):
        """Test that q-2 is linear in h at the boundary point."""
        s = _symbols(1, 2, Operator.D, 4)
        assert s.q2.value.h_degree() == 1

    @pytest.mark.parametrize("a,b", [(1, 2), (2, 3), (3, 5), (-1, 2), (5, 7)])
    @pytest.mark.parametrize("which", [Operator.D, Operator.DSTAR])
    @pytest.mark.parametrize("n", [3, 4])
    def test_closed_forms_over_directions(self, n, which, a, b):
        """Test the closed forms of q-1 and q-2 on five sampled unit directions."""
        for direction in rational_unit_directions(n, 5):
            s = operator_symbols(sym.Rational(a), sym.Rational(b), which, direction, DEFAULT_PROBE_POINTS)
            assert s.q1.value.equals(closed_form_q1(a, b, which, direction).value)
            assert s.q2.value.equals(closed_form_q2(a, b, which, direction))


class TestTangentialJet:
    """Tangential x-derivatives carried through the parametrix."""

    def test_collar_metric_has_no_tangential_derivative(self):
        """Test that the default jet of p1 and q-1 vanishes in every tangential direction."""
        s = _symbols(1, 2, Operator.D, 4)
        for j in range(1, 4):
            assert s.p1.tangential_derivative(j).is_zero()
            assert s.q1.tangential_derivative(j).is_zero()

    def test_tangential_derivative_of_inverse(self):
        """Test d_xj q-1 = -q-1 (d_xj p1) q-1 for a metric varying along x1."""
        p1, _ = build_sigma(1, 2, Operator.D, DIRECTIONS[4], tangential_h=(1, 0, 0))
        q1 = invert_principal(p1)
        assert not p1.tangential_derivative(1).is_zero()
        assert q1.tangential_derivative(1).equals(-(q1.value * p1.tangential_derivative(1) * q1.value))
        assert q1.tangential_derivative(2).is_zero()

    def test_tangential_jet_length(self):
        """Test that one derivative of h is needed per tangential direction."""
        with pytest.raises(InvalidParameterError):
            build_sigma(1, 2, Operator.D, DIRECTIONS[4], tangential_h=(1, 0))

    def test_tangential_index_range(self):
        """Test tangential derivatives outside 1..n-1 and unmodeled jets."""
        s = _symbols(1, 2, Operator.D, 3)
        with pytest.raises(InvalidParameterError):
            s.q1.tangential_derivative(3)
        with pytest.raises(ScopeError):
            s.q2.tangential_derivative(1)
