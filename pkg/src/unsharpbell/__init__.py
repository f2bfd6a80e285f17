"""Joint measurability of unsharp qubit spins and the causality argument for Tsirelson's bound."""

from .audit import AuditVerdict, VerdictKind, audit_behavior, causality_audit, no_signalling_check, pr_box
from .bell import (
    TSIRELSON,
    ChshReport,
    ChshSetting,
    chsh_from_correlations,
    chsh_quantum,
    horodecki_oracle,
    lhv_max,
    tsirelson_optimize,
    verify_derivation_chain,
)
from .observables import (
    JointSpinPovm,
    Povm,
    SharpSpin,
    UnsharpSpin,
    build_joint_povm,
    coexistence_check,
    max_equal_lambda,
    sharp_projector,
    spectral_decompose,
    unsharp_effect,
)
from .states import (
    BehaviorTable,
    JointBehavior,
    TwoQubitState,
    behavior_from_state,
    correlation,
    expectation,
    joint_behavior_from_state,
    sample_outcomes,
    singlet,
    werner,
)

__version__ = "0.1.0"
