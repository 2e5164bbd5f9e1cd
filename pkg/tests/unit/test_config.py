from __future__ import annotations

from fractions import Fraction

import pytest

from app import config
from app.cli.commands import load_runtime_config


@pytest.mark.unit
def test_to_int_falls_back_on_invalid_values() -> None:
    assert config._to_int("8", 1) == 8
    assert config._to_int("abc", 1) == 1
    assert config._to_int("0", 3, minimum=1) == 3
    assert config._to_int(None, 5) == 5


@pytest.mark.unit
def test_to_fraction_accepts_rational_text() -> None:
    assert config._to_fraction("1/17", Fraction(1)) == Fraction(1, 17)
    assert config._to_fraction("1/0", Fraction(1)) == 1
    assert config._to_fraction("-1/2", Fraction(1), positive=True) == 1


@pytest.mark.unit
def test_to_bounds_parses_pairs() -> None:
    default = (Fraction(-1), Fraction(2))

    assert config._to_bounds("0,3/2", default) == (Fraction(0), Fraction(3, 2))
    assert config._to_bounds("1", default) == default
    assert config._to_bounds(None, default) == default


@pytest.mark.unit
def test_runtime_config_uses_module_defaults(monkeypatch) -> None:
    monkeypatch.setattr("app.cli.commands.GRID_WORKERS", 0)
    monkeypatch.setattr("app.cli.commands.MC_SEED", 7)

    runtime = load_runtime_config()

    assert runtime.grid_workers == 1
    assert runtime.mc_seed == 7
    assert runtime.grid_step == config.GRID_STEP
