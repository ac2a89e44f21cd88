"""Settings resolution: argument > environment > default"""
import json

import pytest

from ppcalc.chains import prufer_chain
from ppcalc.cli import run_command
from ppcalc.config import load_settings, resolve_budget
from ppcalc.constants import DEFAULT_BUDGET, DEFAULT_MAX_PREIMAGE_CANDIDATES, ENV_BUDGET, ENV_PREIMAGE_BOUND
from ppcalc.serialization import chain_to_dict


@pytest.mark.quick
def test_resolution_order(monkeypatch):
    monkeypatch.delenv(ENV_BUDGET, raising=False)
    assert resolve_budget() == DEFAULT_BUDGET

    monkeypatch.setenv(ENV_BUDGET, "7")
    assert resolve_budget() == 7
    assert resolve_budget(3) == 3

    monkeypatch.setenv(ENV_PREIMAGE_BOUND, "9")
    settings = load_settings(budget=5)
    assert (settings.budget, settings.preimage_bound) == (5, 9)
    assert settings.max_preimage_candidates == DEFAULT_MAX_PREIMAGE_CANDIDATES


@pytest.mark.quick
@pytest.mark.parametrize("raw", ["many", "-1"])
def test_bad_environment_values(monkeypatch, raw):
    monkeypatch.setenv(ENV_BUDGET, raw)
    with pytest.raises(ValueError):
        resolve_budget()


@pytest.mark.quick
@pytest.mark.important
def test_environment_budget_reaches_chain_and_limit_commands(monkeypatch, capsys):
    """PPCALC_BUDGET sets the stage budget of every command that has one; --budget still wins."""
    prufer = '{"family": "prufer", "p": 2, "budget": 6}'
    chain = json.dumps(chain_to_dict(prufer_chain(2, 3)))
    monkeypatch.setenv(ENV_BUDGET, "3")

    def report(*argv):
        run_command(list(argv))
        return json.loads(capsys.readouterr().out)

    stabilize = report("limit", "stabilize", "--limit", prufer, "--start", "1", "--tuple", "[[1]]")
    assert stabilize["budget_used"] == 3
    tails = report("limit", "tails", "--limit", prufer, "--start", "1", "--tuple", "[[1]]")
    assert [entry["stage"] for entry in tails["tail"]] == [1, 2, 3]

    monkeypatch.setenv(ENV_BUDGET, "1")
    built = report("chain", "build", "--class", "flat", "--chain", chain)
    assert len(built["stages"]) == 2
    built = report("chain", "build", "--class", "flat", "--chain", chain, "--budget", "2")
    assert len(built["stages"]) == 3

    monkeypatch.setenv(ENV_BUDGET, "40")
    capped = report("limit", "stabilize", "--limit", prufer, "--start", "1", "--tuple", "[[1]]")
    assert capped["budget_used"] == 6
