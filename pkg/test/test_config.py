import json

import pytest
import sympy as sym
from pydantic import ValidationError

from app.config import EngineSettings, RunConfig, load_settings
from app.errors import InvalidParameterError


class TestEngineSettings:
    """Run defaults read from config.json."""

    def setup_method(self):
        """Set up test fixtures."""
        self.settings = load_settings()

    def test_configured_directions(self):
        """Test that the configured directions come first and in order."""
        directions = self.settings.directions_for(4, 4)
        assert [d.components for d in directions] == [
            tuple(sym.Rational(c) for c in components) for components in self.settings.directions["4"]
        ]

    @pytest.mark.parametrize("n", [3, 4])
    def test_directions_topped_up(self, n):
        """Test that asking for more directions than configured extends the list."""
        directions = self.settings.directions_for(n, 7)
        assert len(directions) == 7
        assert len({d.components for d in directions}) == 7
        assert all(d.dim == n and d.is_unit() for d in directions)
        assert directions[:4] == self.settings.directions_for(n, 4)

    def test_unconfigured_dimension(self):
        """Test that a dimension without configured directions uses generated ones."""
        settings = EngineSettings(directions={})
        assert len(settings.directions_for(3, 5)) == 5

    def test_at_least_one_direction(self):
        """Test that zero samples are refused."""
        with pytest.raises(InvalidParameterError):
            self.settings.directions_for(4, 0)

    def test_non_unit_direction_rejected(self):
        """Test that a configured direction must be a unit covector."""
        settings = EngineSettings(directions={"3": [["1", "1", "0"]]})
        with pytest.raises(InvalidParameterError):
            settings.directions_for(3, 1)

    def test_sample_points_need_nonzero_product(self):
        """Test that reconstruction points with ab = 0 are refused."""
        with pytest.raises(ValidationError):
            EngineSettings(sample_points=[("0", "1")])

    def test_env_override(self, tmp_path, monkeypatch):
        """Test that NCWRES_CONFIG points at another settings file."""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"workers": 2}))
        monkeypatch.setenv("NCWRES_CONFIG", str(path))
        assert load_settings().workers == 2


class TestRunConfig:
    """Validation of one command-line run."""

    def test_literals_are_reduced(self):
        """Test that a and b are stored in lowest terms."""
        cfg = RunConfig(a="2/4", b="-6/3")
        assert (cfg.a, cfg.b) == ("1/2", "-2")
        assert cfg.parameters() == (sym.Rational(1, 2), sym.Rational(-2))

    def test_zero_product_rejected(self):
        """Test that ab = 0 is invalid."""
        with pytest.raises(ValidationError):
            RunConfig(b="0")

    def test_dimension_rejected(self):
        """Test that only n = 3 and n = 4 are accepted."""
        with pytest.raises(ValidationError):
            RunConfig(dim=2)
