"""Acceptance campaign: thirteen criteria at desk scale.

Runs the default verification campaign once (10 seeds), then judges every
criterion at its stated tolerance.  Each criterion prints one PASS/FAIL line
(in the pytest terminal summary, or on stdout when run as a script).  A few
criteria get an extra direct check that does not go through the suites.

    python3 tests/test_acceptance.py
"""

import sys
import time

import pytest

from schattenmult.harness import CampaignConfig, run_campaign
from schattenmult.harness.generate import Dims, random_riesz, random_symbol
from schattenmult.multipliers import assemble, riesz_invertibility_check
from schattenmult.op_sequences import Symbol
from schattenmult.rng import make_rng

TIME_BUDGET_S = 60.0


def _suite(report, name):
    return report.suite(name)


def _all_pass(s, expected_instances):
    return {
        f"{s.name}: {expected_instances} instances": s.instances == expected_instances,
        f"{s.name}: no failures": s.failed == 0,
    }


def _adversarial_direct(seeds):
    """Ten near-singular symbols on Riesz pairs, judged without the suite."""
    ok = True
    for seed in seeds:
        rng = make_rng(seed, "acceptance-adversarial")
        dims = Dims(8, 2, 2)
        F, G = random_riesz(dims, rng, 5.0), random_riesz(dims, rng, 5.0)
        m = random_symbol(dims.n, rng).values.copy()
        m[seed % dims.n] = (1e-12, 0.0)[seed % 2]
        rep = riesz_invertibility_check(Symbol(m), F, G)
        ok &= rep.passed and not assemble(Symbol(m), F, G).is_invertible()
    return ok


def evaluate(report, elapsed):
    """List of ``(number, title, conditions)``; a criterion passes when all conditions do."""
    S = len(report.config["seeds"])
    seeds = report.config["seeds"]
    sym = _suite(report, "symbol_operator")
    theta = _suite(report, "theta_roundtrip")
    pert = _suite(report, "schatten_class_bounds")
    banach = _suite(report, "banach_consistency")
    crit = [
        (1, "Schatten identities to 1e-12, 100 instances each",
         {**_all_pass(_suite(report, "schatten_identities"), 10 * S),
          "worst residual <= 1e-12": _suite(report, "schatten_identities").worst_residual <= 1e-12}),
        (2, "multiplier upper bound, unsquared bounds, 100 instances",
         _all_pass(_suite(report, "multiplier_upper_bound"), 10 * S)),
        (3, "symbol operator: sup norm, exact adjoint, (N^2)^(1/p) C_p norm",
         {**_all_pass(sym, 5 * S),
          "relative C_p error <= 1e-10": sym.worst_residual <= 1e-10,
          "report notes the N^2 factor": any("N^2" in n and "(N^2)^(1/p)" in n for n in sym.notes)}),
        (4, "flattening equals HS multiplier to 1e-10; Riesz gates agree",
         _all_pass(_suite(report, "flattening"), 5 * S)),
        (5, "C_p class bound on 100 instances; perturbations vanish below 1e-6",
         {**_all_pass(pert, 10 * S), "worst final perturbation residual < 1e-6": pert.worst_residual < 1e-6}),
        (6, "Riesz invertibility iff semi-normalized, 50 instances with 10 adversarial",
         {**_all_pass(_suite(report, "riesz_invertibility"), 5 * S),
          "direct adversarial sweep": _adversarial_direct(seeds)}),
        (7, "inverse decomposition <= 1e-8 over 21 duals, kernel identity, uniqueness probes",
         {**_all_pass(_suite(report, "inverse_decomposition"), 2 * S),
          "decomposition residual <= 1e-8": _suite(report, "inverse_decomposition").worst_residual <= 1e-8}),
        (8, "Riesz case: Gamma = 0 to 1e-10, inverse formula to 1e-8",
         _all_pass(_suite(report, "riesz_inverse"), 2 * S)),
        (9, "Theta roundtrips <= 1e-8 on 20 parameter sets per instance",
         {**_all_pass(theta, S), "all 20 parameter sets evaluated": theta.checks == 4 * 20 * S,
          "worst roundtrip <= 1e-8": theta.worst_residual <= 1e-8}),
        (10, "Lambda roundtrip <= 1e-8 under the gap hypothesis; identity case to 1e-10",
         _all_pass(_suite(report, "lambda_correspondence"), S)),
        (11, "equivalence criterion: formula 1e-8, violation >= 1e-6, planted Q to 1e-8",
         _all_pass(_suite(report, "equivalence_criterion"), S)),
        (12, "duals determine the frame; witness on 50 perturbed pairs",
         _all_pass(_suite(report, "duals_determine_frame"), 5 * S)),
        (13, "banach_p: p = r = 2 within 1%, 50 general-p campaigns pass",
         {**_all_pass(banach, 6 * S), "general-p instances >= 50": banach.instances - S >= 50}),
        (14, f"full campaign under {TIME_BUDGET_S:.0f} s",
         {f"elapsed {elapsed:.1f} s": elapsed < TIME_BUDGET_S}),
    ]
    return crit


def _line(num, title, conditions):
    ok = all(conditions.values())
    bad = [k for k, v in conditions.items() if not v]
    tag = "runtime" if num == 14 else f"criterion {num:2d}"
    return ok, f"{'PASS' if ok else 'FAIL'}  {tag}: {title}" + (f"  [failed: {'; '.join(bad)}]" if bad else "")


def _run():
    t0 = time.perf_counter()
    report = run_campaign(CampaignConfig())
    return report, time.perf_counter() - t0


@pytest.fixture(scope="module")
def campaign():
    return _run()


@pytest.mark.parametrize("num", range(1, 15))
def test_criterion(campaign, num):
    from conftest import ACCEPTANCE_LINES

    report, elapsed = campaign
    _, title, conditions = evaluate(report, elapsed)[num - 1]
    ok, line = _line(num, title, conditions)
    ACCEPTANCE_LINES[num] = line
    print(line)
    if not ok:
        failures = [f for s in report.suites for f in s.failures][:5]
        pytest.fail(f"{line}\nsample failures: {failures}")


def main() -> int:
    report, elapsed = _run()
    ok_all = True
    for num, title, cond in evaluate(report, elapsed):
        ok, line = _line(num, title, cond)
        ok_all &= ok
        print(line)
    for a in report.to_dict()["annotations"]:
        print(f"note  {a}")
    return 0 if ok_all else 1


if __name__ == "__main__":
    sys.exit(main())
