import numpy as np
import pytest

from embezzle import protocol, schmidt
from embezzle.cli import main
from embezzle.selftest import CHECKS, run_selftest

FAST = [(name, check) for name, check in CHECKS if name != "protocol instances"]


def test_default_seed_passes_and_is_repeatable():
    a = run_selftest(checks=FAST)
    b = run_selftest(checks=FAST)
    assert a.ok, a.failures
    assert a.summary_lines() == b.summary_lines()


def test_cli_selftest(capsys):
    assert main(["selftest", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "protocol instances: 3000 cases" in out
    assert out.strip().endswith("PASS")


def test_injected_merge_fault_is_named(monkeypatch):
    real = protocol.omega_top_k

    def inflated(n, phi, k):
        out = np.array(real(n, phi, k))
        out[-1] *= 1.5
        return out

    monkeypatch.setattr(protocol, "omega_top_k", inflated)
    result = run_selftest(checks=FAST)
    assert not result.ok
    assert "streaming/oracle equivalence" in result.failures


def test_injected_majorization_fault_is_named(monkeypatch):
    monkeypatch.setattr(schmidt, "majorizes", lambda x, y, tol=0: False)
    result = run_selftest(checks=FAST)
    assert "majorization partial order" in result.failures
    assert any("FAIL" in line for line in result.summary_lines())


def test_cli_exit_code_on_fault(monkeypatch, capsys):
    monkeypatch.setattr(schmidt, "overlap_fidelity", lambda a, b: 0.5)
    assert main(["selftest"]) == 1
    assert "decomposition self-overlap" in capsys.readouterr().out


@pytest.mark.parametrize("seed", [1, 2])
def test_other_seeds(seed):
    assert run_selftest(seed=seed, checks=FAST).ok
