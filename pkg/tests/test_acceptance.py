"""Acceptance battery: one test per criterion, tolerances pinned here.

Every criterion prints a PASS line on success (run with -s to see them).
All checks use exact rational arithmetic; eps values are horizon scoping,
not floating point tolerances.
"""

import json
import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from summa.corpus import (
    alternating01,
    cg_evens,
    density_zero,
    equivalence_combinations,
    fin,
    scalar_families,
    silverman_toeplitz_battery,
    sigma_cross_validation_matrices,
    smoothing_band,
    standard_sequences,
    unit_even,
    unit_odd,
)
from summa.ideals import HorizonParams, Verdict, ideal_lim, ideal_limsup, window_view
from summa.model import (
    MatrixFamily,
    OperatorEntry,
    alternating_cesaro_matrix,
    cesaro_matrix,
    dense_prefix_matrix,
    euler_matrix,
    eventually_constant_sequence,
    identity_matrix,
    unit_shift_matrix,
    FiniteSupportTail,
)
from summa.regularity import TargetOperator, check_core_inclusion, check_regular_singleton
from summa.scalars import upper
from summa.selection import (
    EnumParams,
    adversarial_limsup_selection,
    enumerate_selections,
    select_matrix,
    test_theorem_equivalence,
    verify_uniform_limsup_identity,
)
from summa.sets import finite_set
from summa.sigma import SigmaMap, almost_regular_family_route, check_almost_regular, sigma_limit
from summa.transform import group_norm, scalar_window

DEMO = Path(__file__).resolve().parents[1] / "sample_specs" / "demo.json"


def report(line):
    print(f"ACCEPTANCE {line}")


def test_criterion_1_sigma_limit_of_alternating_is_exactly_one_half():
    result = sigma_limit(alternating01(), SigmaMap.shift(), fin(), HorizonParams(N=64, eps=F(1, 16)))
    assert result.converges
    assert result.certified
    assert result.value == (F(1, 2),)  # exact equality, zero tolerance
    report("1 PASS: shift-mean limit of (1,0,1,0,...) is exactly 1/2")


def test_criterion_2_silverman_toeplitz_battery_six_fixed_verdicts():
    h = HorizonParams(N=256, eps=F(1, 16))
    target = TargetOperator.identity(1)
    expected_witness = {"row-sum-2": "M3", "column": "M4", "ones-lower": "M1"}
    for label, (matrix, should_accept) in silverman_toeplitz_battery().items():
        test_sets = [finite_set({0})] if label == "column" else None
        reports = check_regular_singleton(matrix, fin(), fin(), target, h, test_sets)
        accepted = all(r.verdict == Verdict.HOLDS for r in reports)
        assert accepted == should_accept, (label, [r.to_json() for r in reports])
        if not should_accept:
            failing = {r.condition: r for r in reports}[expected_witness[label]]
            assert failing.verdict == Verdict.FAILS
            assert failing.witness is not None and failing.witness.n is not None
    report("2 PASS: six fixed regularity verdicts with the expected witnesses")


def test_criterion_3_equivalence_harness():
    h = HorizonParams(N=64, eps=F(1, 16))
    enum = EnumParams(prefix_len=1, period_len=4, budget=4096)

    # the even/odd unit-mass family on the alternating input
    eo = MatrixFamily.of(unit_even(), unit_odd())
    rep = test_theorem_equivalence(eo, alternating01(), fin(), h, enum)
    assert rep.item_i == Verdict.FAILS
    assert rep.witness_selection is not None
    bad = select_matrix(eo, rep.witness_selection)
    window = window_view([(v,) for v in scalar_window(bad, alternating01(), h.N)], 1, F(1))
    assert ideal_lim(window, fin(), h).status == "diverges"

    # a regular singleton preserves every corpus-convergent input
    # (the settling prefix must be light enough for the mean transform to
    # re-settle within the horizon)
    for x in (eventually_constant_sequence([4], 3), alternating01()):
        single = MatrixFamily.of(cesaro_matrix())
        rep = test_theorem_equivalence(single, x, fin(), h, EnumParams(2, 3))
        assert rep.item_ii == Verdict.HOLDS and rep.item_iii == Verdict.HOLDS
        values = [o.value[0] for o in rep.outcomes]
        assert max(values) - min(values) <= 2 * h.eps

    # zero counterexamples to (i) <-> (iii) across the combination corpus
    combos = equivalence_combinations()
    assert len(combos) >= 20
    checked = 0
    for N in (64, 256):
        hN = HorizonParams(N=N, eps=F(1, 16))
        for family, x, ideal in combos:
            rep = test_theorem_equivalence(family, x, ideal, hN, enum)
            assert rep.consistent, (family[0].label, x.label, ideal.label, N)
            checked += 1
    report(f"3 PASS: no (i)<->(iii) counterexamples over {checked} runs at N in {{64, 256}}")


def test_criterion_4_uniform_limsup_identity():
    h = HorizonParams(N=64, eps=F(1, 16))
    enum = EnumParams(prefix_len=2, period_len=3, budget=4096)
    families = scalar_families()
    assert len(families) >= 10
    for family in families:
        assert family.kappa <= 3
        rep = verify_uniform_limsup_identity(family, alternating01(), fin(), h, enum)
        assert rep.lhs == rep.adversarial_rhs, family[0].label  # exact
        assert rep.rhs_lower_bound <= rep.lhs, family[0].label
        for sel, limsup_value in rep.per_selection:
            assert limsup_value <= rep.lhs
    report(f"4 PASS: lhs = adversarial rhs exactly on {len(families)} families")


def test_criterion_5_core_inclusion_semantics():
    h = HorizonParams(N=256, eps=F(1, 16))
    from summa.sigma import sigma_matrix

    candidates = [
        cesaro_matrix(),
        euler_matrix(),
        identity_matrix(),
        smoothing_band(),
        sigma_matrix(SigmaMap.shift(), 0),
        unit_shift_matrix(0, 0, label="column"),
    ]
    # sequences with purely periodic tails: their transforms settle within
    # the horizon, so the core inclusion is visible at 1/N slack
    periodic_corpus = [
        x for x in standard_sequences() if x.tail.kind == "periodic" and x.tail.from_index == 0
    ]
    assert len(periodic_corpus) >= 4
    checked = 0
    for ideal in (fin(), density_zero()):
        for A in candidates:
            reports = check_core_inclusion(A, ideal, h)
            if not all(r.verdict == Verdict.HOLDS for r in reports):
                continue
            for x in periodic_corpus:
                window = scalar_window(A, x, h.N)
                horizon_limsup = max(upper(v) for v in window[h.N // 2 :])
                bound = ideal_limsup(x, ideal, h)
                assert horizon_limsup <= bound + F(1, h.N), (A.label, x.label)
                checked += 1

    signed = alternating_cesaro_matrix()
    reports = {r.condition: r for r in check_core_inclusion(signed, fin(), h)}
    assert reports["C2"].verdict == Verdict.FAILS
    assert reports["C2"].witness is not None
    assert reports["C3"].verdict == Verdict.HOLDS
    report(f"5 PASS: horizon cores nested with 1/N slack over {checked} pairs; signed matrix rejected at C2")


def test_criterion_6_almost_regularity_cross_validation():
    h = HorizonParams(N=256, eps=F(3, 8))
    target = TargetOperator.identity(1)
    maps = [SigmaMap.shift(), SigmaMap.affine(2, 1, label="affine2")]
    combos = 0
    for sigma in maps:
        for A in sigma_cross_validation_matrices():
            k_reports = check_almost_regular(
                A, sigma, fin(), fin(), target, h, nu_max=8, cross_validate=False
            )
            d_reports = {
                r.condition: r
                for r in almost_regular_family_route(
                    A, sigma, fin(), fin(), target, h, nu_max=8
                )
            }
            combined = (
                Verdict.FAILS
                if Verdict.FAILS in (d_reports["D1"].verdict, d_reports["D2"].verdict)
                else Verdict.UNKNOWN
                if Verdict.UNKNOWN in (d_reports["D1"].verdict, d_reports["D2"].verdict)
                else Verdict.HOLDS
            )
            expected = {
                "K1": combined,
                "K2": d_reports["D3"].verdict,
                "K3": d_reports["D4"].verdict,
            }
            for r in k_reports:
                assert r.verdict == expected[r.condition], (sigma.label, A.label, r.condition)
            combos += 1
    report(f"6 PASS: dual-route agreement on every condition over {combos} matrix/map pairs")


def test_criterion_7_group_norm_sandwich_and_additivity():
    rng = random.Random(0x5EED)
    for trial in range(200):
        m = rng.randint(1, 3)
        d = rng.randint(1, 3)
        cols = rng.randint(1, 6)
        entries = [
            [
                [F(rng.randint(-8, 8), rng.randint(1, 8)) for _ in range(d)]
                for _ in range(m)
            ]
            for _ in range(cols)
        ]

        def entry_fn(n, k, entries=entries, m=m, d=d, cols=cols):
            if k < cols:
                return OperatorEntry.of(entries[k])
            return OperatorEntry.zeros(m, d)

        from summa.model import OperatorMatrix

        A = OperatorMatrix(f"rand{trial}", d, m, entry_fn, FiniteSupportTail(cols))
        members = sorted(rng.sample(range(cols), rng.randint(0, cols)))
        E = finite_set(members)
        norm = group_norm(A, 0, E)
        mass = sum(
            (abs(entries[k][i][j]) for k in members for i in range(m) for j in range(d)),
            F(0),
        )
        assert mass / d <= norm <= mass  # exact sandwich

        # additivity over a disjoint split of E
        left = finite_set(members[::2])
        right = finite_set(members[1::2])
        assert group_norm(A, 0, left) + group_norm(A, 0, right) == norm
    report("7 PASS: sandwich and additivity exact on 200 random entry matrices")


def test_criterion_8_determinism_of_machine_reports():
    from summa.cli import emit_report, run_document
    from summa.document import parse_spec_document
    from summa.ideals import HorizonParams

    text = DEMO.read_text()
    outputs = []
    for _ in range(2):
        doc = parse_spec_document(text)
        results = run_document(doc, HorizonParams(N=64, eps=F(1, 16)), "exact")
        outputs.append(emit_report(results, "machine"))
    assert outputs[0] == outputs[1]  # bit identical
    json.loads(outputs[0])
    report("8 PASS: two full runs emit bit-identical machine reports")
