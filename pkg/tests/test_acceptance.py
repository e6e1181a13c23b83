"""End-to-end acceptance checks; each prints one PASS/FAIL line with the measured numbers."""
import pytest

from osig import verify

pytestmark = pytest.mark.acceptance


def _report(capsys, res):
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()


def test_beer_quiche_exactness(capsys):
    _report(capsys, verify.check_beer_quiche())


def test_beer_quiche_dual_strategy(capsys):
    _report(capsys, verify.check_beer_quiche_dual())


def test_hexner_critical_time(capsys):
    _report(capsys, verify.check_critical_time())


def test_hexner_value_convergence(capsys):
    _report(capsys, verify.check_hexner_convergence())


def test_brute_force_equivalence(capsys):
    _report(capsys, verify.check_brute_force())


def test_belief_refinement(capsys):
    _report(capsys, verify.check_refinement())


def test_martingale_and_payoff(capsys):
    _report(capsys, verify.check_martingale())


def test_reach_oracle(capsys):
    _report(capsys, verify.check_reach())


def test_structural_properties(capsys):
    _report(capsys, verify.check_properties())
