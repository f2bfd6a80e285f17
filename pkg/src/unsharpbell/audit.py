"""No-signalling checks and the causality verdict for unsharp CHSH correlations.

Alice is the party performing the joint measurement. For a Bob-side audit,
pass ``table.transpose()``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bell import chsh_from_correlations
from .observables import max_equal_lambda
from .states import BehaviorTable, StateError

NO_SIGNALLING_TOL = 1e-9
VERDICT_TOL = 1e-9
LAMBDA_TOL = 1e-12


class VerdictKind(str, enum.Enum):
    CONSISTENT = "Consistent"
    IMPLIES_SIGNALLING = "ImpliesSignalling"
    JOINT_MEASUREMENT_IMPOSSIBLE = "JointMeasurementImpossible"


@dataclass(frozen=True)
class AuditVerdict:
    kind: VerdictKind
    lhs_eq16: float
    lambda_max: float
    lam: float
    details: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "lhs_eq16": self.lhs_eq16,
            "lambda_max": self.lambda_max,
            "lam": self.lam,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AuditVerdict":
        return cls(
            kind=VerdictKind(doc["kind"]),
            lhs_eq16=float(doc["lhs_eq16"]),
            lambda_max=float(doc["lambda_max"]),
            lam=float(doc["lam"]),
            details=doc["details"],
        )


def no_signalling_check(table: BehaviorTable) -> tuple[bool, float]:
    """Largest dependence of either party's marginal on the other party's setting."""
    alice = table.alice_marginals()  # [x, y, a]
    bob = table.bob_marginals()  # [x, y, b]
    violation = max(
        float(np.max(np.abs(alice[:, 0, :] - alice[:, 1, :]))),
        float(np.max(np.abs(bob[0, :, :] - bob[1, :, :]))),
    )
    return violation <= NO_SIGNALLING_TOL, violation


def pr_box() -> BehaviorTable:
    """Uniform over outcome pairs with ``a * b = (-1)**(x * y)``; correlations (1, 1, 1, -1)."""
    p = np.zeros((2, 2, 2, 2))
    values = (1, -1)
    for x in range(2):
        for y in range(2):
            for ia, a in enumerate(values):
                for ib, b in enumerate(values):
                    if a * b == (-1) ** (x * y):
                        p[x, y, ia, ib] = 0.5
    return BehaviorTable(p)


def causality_audit(
    e_ab: float,
    e_apb: float,
    e_abp: float,
    e_apbp: float,
    lam: float,
    a1: Sequence[float],
    a2: Sequence[float],
) -> AuditVerdict:
    """Decide what CHSH correlations imply at common unsharpness ``lam``.

    If Alice's two spins at ``lam`` cannot be measured jointly nothing follows.
    Otherwise, a scaled CHSH value above 2 means joint measurement and
    no-signalling cannot both hold.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"unsharpness must satisfy 0 < lam <= 1, got {lam!r}")
    report = chsh_from_correlations(e_ab, e_apb, e_abp, e_apbp)
    lambda_max = max_equal_lambda(a1, a2)
    lhs = lam * report.value
    if lam > lambda_max + LAMBDA_TOL:
        return AuditVerdict(
            VerdictKind.JOINT_MEASUREMENT_IMPOSSIBLE,
            lhs,
            lambda_max,
            lam,
            f"lam={lam:.12g} exceeds the joint-measurability limit {lambda_max:.12g}; "
            "no statement about signalling follows",
        )
    if lhs > 2 + VERDICT_TOL:
        return AuditVerdict(
            VerdictKind.IMPLIES_SIGNALLING,
            lhs,
            lambda_max,
            lam,
            f"unsharp CHSH value {lhs:.12g} > 2 while a joint measurement exists; "
            f"sharp value {report.value:.12g} exceeds 2/lam = {2 / lam:.12g}",
        )
    return AuditVerdict(
        VerdictKind.CONSISTENT,
        lhs,
        lambda_max,
        lam,
        f"unsharp CHSH value {lhs:.12g} <= 2",
    )


def audit_behavior(table: BehaviorTable, lam: float, a1: Sequence[float], a2: Sequence[float]) -> AuditVerdict:
    if not isinstance(table, BehaviorTable):
        raise StateError("audit_behavior expects a BehaviorTable")
    return causality_audit(*table.correlations(), lam, a1, a2)

