import pytest
import sympy as sym
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from app.errors import DimensionMismatchError, InvalidParameterError, ScopeError
from app.exterior_algebra import (
    Blade,
    Covector,
    CovectorRole,
    ExteriorAlgebra,
    Operator,
    check_parameters,
    clifford_actions,
    exterior_algebra,
    p0_matrix,
    rational_unit_directions,
    trace,
)
from app.scalar_field import H

nonzero = st.integers(-6, 6).filter(lambda x: x != 0)
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=5)
covectors = st.lists(rationals, min_size=4, max_size=4)


def _zero(matrix) -> bool:
    return all(sym.expand(entry) == 0 for entry in matrix)


def _covector(components) -> Covector:
    components = tuple(sym.Rational(c.numerator, c.denominator) for c in components)
    role = CovectorRole.NORMAL if components[-1] != 0 else CovectorRole.TANGENTIAL
    return Covector(components=components, role=role)


class TestExteriorAlgebra:
    """Graded-lex blade basis with the exterior and interior product matrices."""

    def setup_method(self):
        """Set up test fixtures."""
        self.algebra = exterior_algebra(4)

    def test_dimensions(self):
        """Test that Lambda*(R^n) has dimension 2^n."""
        assert exterior_algebra(3).dim == 8
        assert self.algebra.dim == 16

    def test_blade_order(self):
        """Test graded-lexicographic ordering of blades."""
        indices = [blade.indices for blade in self.algebra.blades]
        assert indices[:6] == [(), (1,), (2,), (3,), (4,), (1, 2)]
        assert indices[-1] == (1, 2, 3, 4)
        assert str(self.algebra.blades[5]) == "e1^e2"

    def test_exterior_product_sign(self):
        """Test that eps(e1) sends 1 to e1 and iota(e2) sends e1^e2 to -e1."""
        eps_1 = self.algebra.eps(Covector.basis(4, 1))
        iota_2 = self.algebra.iota(Covector.basis(4, 2))
        assert eps_1[1, 0] == 1
        assert iota_2[1, 5] == -1

    def test_nilpotent_and_anticommuting(self):
        """Test eps^2 = iota^2 = 0 and eps(e_j) iota(e_k) + iota(e_k) eps(e_j) = delta_jk."""
        for j in range(1, 5):
            e_j = Covector.basis(4, j)
            assert _zero(self.algebra.eps(e_j) ** 2)
            assert _zero(self.algebra.iota(e_j) ** 2)
            for k in range(1, 5):
                e_k = Covector.basis(4, k)
                anti = self.algebra.eps(e_j) * self.algebra.iota(e_k) + self.algebra.iota(e_k) * self.algebra.eps(e_j)
                expected = self.algebra.identity() if j == k else self.algebra.zero()
                assert _zero(anti - expected)

    def test_unsupported_dimension(self):
        """Test that only n = 3 and n = 4 are modeled."""
        with pytest.raises(ScopeError):
            ExteriorAlgebra(5)

    def test_dimension_mismatch(self):
        """Test that a covector of the wrong dimension is refused."""
        with pytest.raises(DimensionMismatchError):
            self.algebra.eps(Covector.basis(3, 1))

    @settings(max_examples=15, deadline=None)
    @given(a=nonzero, b=nonzero)
    def test_clifford_identities(self, a, b):
        """Test c^2 = -1, c_hat^2 = 1, c_tilde^2 = -ab and the c_tilde/c_bar anticommutator."""
        direction = Covector.tangential(("2/3", "1/3", "2/3", "0"))
        identity = self.algebra.identity()
        actions = clifford_actions(a, b, direction, self.algebra)
        assert _zero(actions.c * actions.c + identity)
        assert _zero(actions.c_hat * actions.c_hat - identity)
        assert _zero(actions.c_tilde * actions.c_tilde + a * b * identity)
        assert _zero(actions.c_tilde * actions.c_bar + actions.c_bar * actions.c_tilde + (a**2 + b**2) * identity)

    @settings(max_examples=15, deadline=None)
    @given(u=covectors, v=covectors)
    def test_anticommutator_is_pairing(self, u, v):
        """Test eps(u) iota(v) + iota(v) eps(u) = <u, v> Id for rational u, v."""
        u, v = _covector(u), _covector(v)
        anti = self.algebra.eps(u) * self.algebra.iota(v) + self.algebra.iota(v) * self.algebra.eps(u)
        assert _zero(anti - u.pairing(v) * self.algebra.identity())

    @settings(max_examples=15, deadline=None)
    @given(u=covectors, v=covectors, w=covectors, a=nonzero, b=nonzero)
    def test_trace_is_cyclic(self, u, v, w, a, b):
        """Test tr(ABC) = tr(BCA) on products of eps, iota and p0."""
        u, v, w = _covector(u), _covector(v), _covector(w)
        first = self.algebra.eps(u) - self.algebra.iota(v)
        second = p0_matrix(a, b, Operator.D, 4) + self.algebra.eps(w)
        third = self.algebra.iota(u) * self.algebra.eps(w) + self.algebra.identity()
        assert trace(first * second * third) == trace(second * third * first)


class TestCovectors:
    """Covector construction and validation."""

    def test_blade_indices_validated(self):
        """Test that blade indices must be strictly increasing."""
        with pytest.raises(ValidationError):
            Blade(indices=(2, 1))

    def test_tangential_requires_zero_normal(self):
        """Test that a tangential covector has no normal component."""
        with pytest.raises(InvalidParameterError):
            Covector.tangential((1, 0, 0, 1))

    def test_basis_index_range(self):
        """Test that basis indices outside 1..n are refused."""
        with pytest.raises(DimensionMismatchError):
            Covector.basis(4, 5)
        assert Covector.basis(4, 4).role is CovectorRole.NORMAL

    def test_rational_components(self):
        """Test that string components are parsed exactly."""
        direction = Covector.tangential(("3/5", "4/5", "0"))
        assert direction.components == (sym.Rational(3, 5), sym.Rational(4, 5), 0)
        assert direction.is_unit()

    def test_rational_unit_directions(self):
        """Test that sampled directions are distinct unit tangential covectors."""
        for n in (3, 4):
            directions = rational_unit_directions(n, 4)
            assert len(directions) == 4
            assert len({d.components for d in directions}) == 4
            for direction in directions:
                assert direction.dim == n
                assert direction.is_unit()
                assert direction.role is CovectorRole.TANGENTIAL


class TestOperatorTwist:
    """The (a, b) twist distinguishing D from Dstar."""

    def test_twist(self):
        """Test that D uses (a, b) and Dstar uses (b, a)."""
        assert Operator.D.twist(1, 2) == (1, 2)
        assert Operator.DSTAR.twist(1, 2) == (2, 1)
        assert Operator("Dstar") is Operator.DSTAR

    def test_parameters_need_nonzero_product(self):
        """Test that ab = 0 is refused."""
        with pytest.raises(InvalidParameterError):
            check_parameters(0, 1)

    def test_p0_linear_in_h(self):
        """Test that the order-zero symbol is h times a constant matrix."""
        p0 = p0_matrix(1, 2, Operator.D, 4)
        assert not all(entry == 0 for entry in p0)
        for entry in p0:
            assert sym.expand(entry).subs(H, 0) == 0
            assert sym.degree(sym.expand(entry), H) <= 1
