import pytest
import sympy as sym

from app.config import load_settings
from app.errors import InvalidParameterError
from app.exterior_algebra import Covector
from app.scalar_field import H
from app.trace_identities import (
    TRACE_IDENTITIES,
    VANISHING_TRACES,
    evaluate_trace,
    trace_over_directions,
)


class TestTraceIdentities:
    """Named traces over Lambda*(R^n) at the boundary point."""

    def setup_method(self):
        """Set up test fixtures."""
        settings = load_settings()
        self.directions = settings.directions_for(4, 4)
        self.directions_3 = settings.directions_for(3, 4)

    def _value(self, name, a, b):
        return sym.expand(trace_over_directions(name, a, b, self.directions))

    @pytest.mark.parametrize("a,b", [(1, 2), (2, 3), (-1, 2)])
    def test_sandwich_traces(self, a, b):
        """Test the eight nonvanishing sandwich traces of p0."""
        expected = {
            "c'p0c'eps_n": 6 * a * b**2 * H,
            "c'p0c'iota_n": -6 * a**2 * b * H,
            "c_np0c_neps_n": -6 * a * b**2 * H,
            "c_np0c_niota_n": 6 * a**2 * b * H,
            "c_np0c'eps'": -6 * a * b**2 * H,
            "c_np0c'iota'": 6 * a**2 * b * H,
            "c'p0c_neps'": -6 * a * b**2 * H,
            "c'p0c_niota'": 6 * a**2 * b * H,
        }
        for name, value in expected.items():
            assert self._value(name, a, b) == sym.expand(value), name

    def test_vanishing_traces(self):
        """Test that the remaining sandwich traces are zero."""
        for name in VANISHING_TRACES:
            assert self._value(name, 2, 3) == 0, name

    def test_p0_and_clifford_sums(self):
        """Test tr[p0 eps_n] and the two sums over tangential Clifford products."""
        assert self._value("p0eps_n", 2, 3) == 18 * H
        assert self._value("sum eps_n c~_i c^_i c^_n", 2, 3) == -12
        assert self._value("sum eps_n c~_i c_i c_n", 2, 3) == 60

    def test_eps_iota_traces(self):
        """Test the eps/iota traces and the normal derivative of iota(xi')."""
        assert self._value("eps'iota'", 1, 1) == 8
        assert self._value("eps_niota_n", 1, 1) == 8
        assert self._value("dxn(iota')eps'", 1, 1) == 8 * H
        assert self._value("dxn(iota')iota_neps'eps_n", 1, 1) == -4 * H
        assert self._value("dxn(iota')iota'eps'eps_n", 1, 1) == 0

    def test_eps_iota_traces_in_three_dimensions(self):
        """Test that the n = 3 traces halve with the algebra."""
        assert trace_over_directions("eps'iota'", 1, 1, self.directions_3) == 4
        assert trace_over_directions("eps_niota_n", 1, 1, self.directions_3) == 4

    def test_unknown_identity(self):
        """Test that unknown trace names are refused."""
        with pytest.raises(InvalidParameterError):
            evaluate_trace("tr[nothing]", 1, 1, self.directions[0])

    def test_non_unit_direction(self):
        """Test that identities are only stated for unit xi'."""
        with pytest.raises(InvalidParameterError):
            evaluate_trace("eps'iota'", 1, 1, Covector.tangential((1, 1, 0, 0)))

    def test_no_directions(self):
        """Test that at least one direction is required."""
        with pytest.raises(InvalidParameterError):
            trace_over_directions("eps'iota'", 1, 1, [])

    def test_registry_covers_vanishing(self):
        """Test that every vanishing trace is a registered identity."""
        assert set(VANISHING_TRACES) <= set(TRACE_IDENTITIES)
