"""Acceptance gate: every numbered criterion at its stated tolerance, one
pass/fail line each (shown with pytest -v; details printed on failure)."""

import json

import pytest

from multibump.verify import CRITERIA, NAMES, VerificationContext


@pytest.fixture(scope="module")
def ctx():
    return VerificationContext()


def run(index, ctx):
    details = CRITERIA[index](ctx)
    passed = details.pop("passed")
    line = f"{'PASS' if passed else 'FAIL'}  criterion {index}: {NAMES[index]}"
    print(line)
    assert passed, json.dumps(details, indent=2, default=str)


def test_criterion_01_ground_state_oracles(ctx):
    run(1, ctx)


def test_criterion_02_energy_and_spectral_constants(ctx):
    run(2, ctx)


def test_criterion_03_correction_decay_rate(ctx):
    run(3, ctx)


def test_criterion_04_orthogonality_and_multipliers(ctx):
    run(4, ctx)


def test_criterion_05_two_bump_interaction_law(ctx):
    run(5, ctx)


def test_criterion_06_increment_bound_transfer(ctx):
    run(6, ctx)


def test_criterion_07_ledger_strict_increments(ctx):
    run(7, ctx)


def test_criterion_08_polished_solution_structure(ctx):
    run(8, ctx)


def test_criterion_09_coupled_system(ctx):
    run(9, ctx)


def test_criterion_10_second_order_convergence(ctx):
    run(10, ctx)
