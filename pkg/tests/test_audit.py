import math

import numpy as np
import pytest

from unsharpbell.audit import (
    AuditVerdict,
    VerdictKind,
    audit_behavior,
    causality_audit,
    no_signalling_check,
    pr_box,
)
from unsharpbell.bell import ChshSetting, chsh_from_correlations
from unsharpbell.observables import SharpSpin, max_equal_lambda
from unsharpbell.states import BehaviorTable, StateError, behavior_from_state, maximally_mixed, random_state, singlet

from conftest import random_unit

R = 1 / math.sqrt(2)
X = (1.0, 0.0, 0.0)
Z = (0.0, 0.0, 1.0)


def sharp_table(state, setting):
    return behavior_from_state(
        state, [SharpSpin(setting.a), SharpSpin(setting.a_prime)], [SharpSpin(setting.b), SharpSpin(setting.b_prime)]
    )


def test_pr_box():
    box = pr_box()
    assert box.correlations() == (1.0, 1.0, 1.0, -1.0)
    assert chsh_from_correlations(*box.correlations()).value == 4.0
    ok, violation = no_signalling_check(box)
    assert ok and violation == 0.0


def test_quantum_tables_no_signalling(rng):
    for _ in range(100):
        table = sharp_table(random_state(rng), ChshSetting(*(random_unit(rng) for _ in range(4))))
        ok, violation = no_signalling_check(table)
        assert ok and violation < 1e-12


def test_hand_built_signalling_table():
    p = np.full((2, 2, 2, 2), 0.25)
    # Alice's outcome for x=0 follows Bob's setting
    p[0, 0] = [[0.5, 0.5], [0, 0]]
    p[0, 1] = [[0, 0], [0.5, 0.5]]
    ok, violation = no_signalling_check(BehaviorTable(p))
    assert not ok
    assert violation == pytest.approx(1.0)


def test_bob_side_signalling_detected():
    p = np.full((2, 2, 2, 2), 0.25)
    p[1, 0] = [[0.5, 0], [0.5, 0]]
    ok, violation = no_signalling_check(BehaviorTable(p))
    assert not ok
    assert violation == pytest.approx(0.5)


def test_audit_examples():
    v = causality_audit(1, 1, 1, -1, R, X, Z)
    assert v.kind is VerdictKind.IMPLIES_SIGNALLING
    assert v.lhs_eq16 == pytest.approx(2 * math.sqrt(2), abs=1e-12)

    v = causality_audit(-R, -R, -R, R, R, X, Z)
    assert v.kind is VerdictKind.CONSISTENT
    assert abs(v.lhs_eq16 - 2) < 1e-9

    v = causality_audit(0.1, 0.2, 0.3, 0.4, 1.0, X, Z)
    assert v.kind is VerdictKind.JOINT_MEASUREMENT_IMPOSSIBLE


def test_audit_parallel_directions_allow_sharp():
    v = causality_audit(1, 1, 1, -1, 1.0, Z, Z)
    assert v.lambda_max == 1.0
    assert v.kind is VerdictKind.IMPLIES_SIGNALLING


def test_audit_rejects_bad_lambda():
    with pytest.raises(ValueError):
        causality_audit(0, 0, 0, 0, 0.0, X, Z)


def test_audit_behavior_examples():
    assert audit_behavior(pr_box(), R, X, Z).kind is VerdictKind.IMPLIES_SIGNALLING
    table = sharp_table(singlet(), ChshSetting.singlet_optimal())
    v = audit_behavior(table, R, X, Z)
    assert v.kind is VerdictKind.CONSISTENT
    assert v.lhs_eq16 == pytest.approx(2.0, abs=1e-9)
    v = audit_behavior(sharp_table(maximally_mixed(), ChshSetting.singlet_optimal()), 0.5, X, Z)
    assert v.kind is VerdictKind.CONSISTENT and v.lhs_eq16 == pytest.approx(0, abs=1e-15)
    with pytest.raises(StateError):
        audit_behavior(np.zeros((2, 2, 2, 2)), 0.5, X, Z)


def test_verdict_trichotomy(rng):
    for _ in range(50):
        corr = rng.uniform(-1, 1, 4)
        a1, a2 = random_unit(rng), random_unit(rng)
        lmax = max_equal_lambda(a1, a2)
        for lam in np.round(np.arange(0.1, 1.01, 0.1), 10):
            v = causality_audit(*corr, lam, a1, a2)
            impossible = lam > lmax + 1e-12
            signalling = not impossible and v.lhs_eq16 > 2 + 1e-9
            expected = (
                VerdictKind.JOINT_MEASUREMENT_IMPOSSIBLE
                if impossible
                else VerdictKind.IMPLIES_SIGNALLING
                if signalling
                else VerdictKind.CONSISTENT
            )
            assert v.kind is expected


def test_verdict_monotone_in_lambda(rng):
    for _ in range(50):
        corr = rng.uniform(-1, 1, 4)
        a1, a2 = random_unit(rng), random_unit(rng)
        lmax = max_equal_lambda(a1, a2)
        grid = np.linspace(0.01, lmax, 30)
        kinds = [causality_audit(*corr, lam, a1, a2).kind for lam in grid]
        for lo in range(len(grid)):
            for hi in range(lo + 1, len(grid)):
                if kinds[hi] is VerdictKind.CONSISTENT:
                    assert kinds[lo] is VerdictKind.CONSISTENT


def test_quantum_tables_never_imply_signalling(rng):
    for _ in range(100):
        setting = ChshSetting(*(random_unit(rng) for _ in range(4)))
        table = sharp_table(random_state(rng, rank=int(rng.integers(1, 5))), setting)
        lam = rng.uniform(0.01, 1) * max_equal_lambda(setting.a, setting.a_prime)
        assert audit_behavior(table, lam, setting.a, setting.a_prime).kind is not VerdictKind.IMPLIES_SIGNALLING


def test_perturbed_tables_rejected(rng):
    for _ in range(50):
        table = sharp_table(random_state(rng), ChshSetting(*(random_unit(rng) for _ in range(4))))
        p = table.p.copy()
        x = int(rng.integers(2))
        b = int(np.argmax(p[x, 0].min(axis=0)))
        eps = 1e-6
        # shift eps between Alice outcomes within the y=0 slice only
        p[x, 0, 0, b] -= eps
        p[x, 0, 1, b] += eps
        ok, violation = no_signalling_check(BehaviorTable(p))
        assert not ok
        assert violation == pytest.approx(eps, rel=1e-6)


def test_verdict_roundtrip():
    v = causality_audit(1, 1, 1, -1, R, X, Z)
    assert AuditVerdict.from_dict(v.to_dict()) == v


def test_transpose_gives_bob_side_audit():
    box = pr_box()
    assert box.transpose().correlations() == (1.0, 1.0, 1.0, -1.0)
