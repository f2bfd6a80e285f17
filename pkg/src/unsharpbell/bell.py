"""CHSH evaluation, the joint-measurement Bell inequality, and bound recovery.

The CHSH combination used throughout is

    |E(A,B) + E(A',B)| + |E(A,B') - E(A',B')|

with the minus sign on the primed-primed term. Relabeling observables
permutes which term carries the sign.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .linalg import PAULIS, tensor, unit
from .observables import SharpSpin, as_observable
from .states import JointBehavior, TwoQubitState, correlation

CORRELATION_TOL = 1e-9
CHAIN_TOL = 1e-9
BELL_BOUND_TOL = 1e-10
SIMPLEX_XTOL = 1e-9
TSIRELSON = 2 * math.sqrt(2)


class BellError(ValueError):
    pass


class OptimizationError(RuntimeError):
    def __init__(self, message: str, best: float | None = None):
        super().__init__(message)
        self.best = best


def chsh_value(e_ab: float, e_apb: float, e_abp: float, e_apbp: float) -> float:
    return abs(e_ab + e_apb) + abs(e_abp - e_apbp)


@dataclass(frozen=True)
class ChshSetting:
    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, unit(getattr(self, name)))

    @classmethod
    def singlet_optimal(cls) -> "ChshSetting":
        """Directions reaching 2*sqrt(2) on the singlet with the sign convention above."""
        r = 1 / math.sqrt(2)
        return cls(a=(0, 0, 1), a_prime=(1, 0, 0), b=(r, 0, r), b_prime=(-r, 0, r))

    def to_dict(self) -> dict:
        return {k: [float(c) for c in getattr(self, k)] for k in ("a", "a_prime", "b", "b_prime")}

    @classmethod
    def from_dict(cls, doc: dict) -> "ChshSetting":
        return cls(**{k: doc[k] for k in ("a", "a_prime", "b", "b_prime")})


@dataclass(frozen=True)
class ChshReport:
    e_ab: float
    e_apb: float
    e_abp: float
    e_apbp: float
    value: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "value", chsh_value(self.e_ab, self.e_apb, self.e_abp, self.e_apbp))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ChshReport":
        return cls(doc["e_ab"], doc["e_apb"], doc["e_abp"], doc["e_apbp"])


def chsh_from_correlations(e_ab: float, e_apb: float, e_abp: float, e_apbp: float) -> ChshReport:
    values = (e_ab, e_apb, e_abp, e_apbp)
    for v in values:
        if not (math.isfinite(v) and abs(v) <= 1 + CORRELATION_TOL):
            raise BellError(f"correlation {v!r} lies outside [-1, 1]")
    return ChshReport(*(float(v) for v in values))


def chsh_quantum(state: TwoQubitState, setting: ChshSetting, lam: float = 1.0) -> ChshReport:
    """CHSH report with Alice's spins measured at unsharpness ``lam``."""
    if not 0.0 < lam <= 1.0:
        raise BellError(f"unsharpness must satisfy 0 < lam <= 1, got {lam!r}")
    alice = [as_observable(lam, d) for d in (setting.a, setting.a_prime)]
    bob = [SharpSpin(d) for d in (setting.b, setting.b_prime)]
    return ChshReport(
        correlation(state, alice[0], bob[0]),
        correlation(state, alice[1], bob[0]),
        correlation(state, alice[0], bob[1]),
        correlation(state, alice[1], bob[1]),
    )


@dataclass
class ChainStep:
    """Quantities for one Bob setting."""

    p_equal: float
    p_opposite: float
    p_equal_and_b: float
    p_equal_and_not_b: float
    e_first: float
    e_second: float


@dataclass
class ChainReport:
    per_setting: list[ChainStep]
    checks: dict[str, bool]
    residuals: dict[str, float]
    bell_lhs: float

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def signalling(self) -> bool:
        return not self.checks["no_signalling_eq7"]

    def to_dict(self) -> dict:
        return {
            "per_setting": [asdict(s) for s in self.per_setting],
            "checks": dict(self.checks),
            "residuals": dict(self.residuals),
            "bell_lhs": self.bell_lhs,
            "passed": self.passed,
        }


def _chain_step(q: np.ndarray) -> ChainStep:
    # q[j, k, b]; index 0 is +1
    signs = np.array([1, -1])
    j = signs[:, None, None]
    k = signs[None, :, None]
    b = signs[None, None, :]
    equal = (j == k)
    return ChainStep(
        p_equal=float(q[np.broadcast_to(equal, q.shape)].sum()),
        p_opposite=float(q[np.broadcast_to(~equal, q.shape)].sum()),
        p_equal_and_b=float(q[np.broadcast_to(equal & (j == b), q.shape)].sum()),
        p_equal_and_not_b=float(q[np.broadcast_to(equal & (j == -b), q.shape)].sum()),
        e_first=float((q * j * b).sum()),
        e_second=float((q * k * b).sum()),
    )


def verify_derivation_chain(jb: JointBehavior) -> ChainReport:
    """Check each step from the joint-outcome probabilities to the Bell bound.

    Setting y=0 plays B and y=1 plays B'. The no-signalling step compares the
    probability of opposite joint outcomes across Bob's settings; when it fails
    the final bound is no longer implied and the report says so.
    """
    if not isinstance(jb, JointBehavior):
        raise BellError("verify_derivation_chain expects a JointBehavior")
    s0, s1 = (_chain_step(jb.q[y]) for y in range(2))
    residuals: dict[str, float] = {}
    checks: dict[str, bool] = {}

    eq1 = max(abs(s.p_equal - (s.p_equal_and_b + s.p_equal_and_not_b)) for s in (s0, s1))
    residuals["eq1_decomposition"] = eq1
    checks["eq1_decomposition"] = eq1 <= CHAIN_TOL

    eq2 = min(s.p_equal_and_b + s.p_equal_and_not_b - abs(s.p_equal_and_b - s.p_equal_and_not_b) for s in (s0, s1))
    residuals["eq2_nonnegativity"] = eq2
    checks["eq2_nonnegativity"] = eq2 >= -CHAIN_TOL

    eq3 = max(
        abs(abs(s.p_equal_and_b - s.p_equal_and_not_b) - abs(s.e_first + s.e_second) / 2) for s in (s0, s1)
    )
    residuals["eq3_identity"] = eq3
    checks["eq3_identity"] = eq3 <= CHAIN_TOL

    half_plus = abs(s0.e_first + s0.e_second) / 2
    half_minus = abs(s1.e_first - s1.e_second) / 2
    residuals["eq4_bound"] = s0.p_equal - half_plus
    checks["eq4_bound"] = residuals["eq4_bound"] >= -CHAIN_TOL
    residuals["eq5_bound"] = s1.p_opposite - half_minus
    checks["eq5_bound"] = residuals["eq5_bound"] >= -CHAIN_TOL
    residuals["eq6_sum"] = s0.p_equal + s1.p_opposite - (half_plus + half_minus)
    checks["eq6_sum"] = residuals["eq6_sum"] >= -CHAIN_TOL

    gap = abs(s0.p_opposite - s1.p_opposite)
    residuals["no_signalling_eq7"] = gap
    checks["no_signalling_eq7"] = gap <= CHAIN_TOL

    residuals["eq8_substituted"] = s0.p_equal + s0.p_opposite - (half_plus + half_minus)
    checks["eq8_substituted"] = residuals["eq8_substituted"] >= -CHAIN_TOL

    bell_lhs = chsh_value(s0.e_first, s0.e_second, s1.e_first, s1.e_second)
    residuals["eq9_bell"] = 2 - bell_lhs
    checks["eq9_bell"] = bell_lhs <= 2 + BELL_BOUND_TOL

    return ChainReport(per_setting=[s0, s1], checks=checks, residuals=residuals, bell_lhs=bell_lhs)


def lhv_strategies():
    """Deterministic assignments (A, A', B, B') in lexicographic order, +1 first."""
    return itertools.product((1, -1), repeat=4)


def lhv_max(setting: ChshSetting | None = None, state: TwoQubitState | None = None) -> int:
    """Largest CHSH value over the 16 deterministic local strategies.

    Arguments are accepted for interface uniformity only; the bound does not
    depend on them.
    """
    best, _ = lhv_best_strategy()
    return best


def lhv_best_strategy() -> tuple[int, tuple[int, int, int, int]]:
    best = None
    arg = None
    for a, ap, b, bp in lhv_strategies():
        v = abs(a * b + ap * b) + abs(a * bp - ap * bp)
        if best is None or v > best:
            best, arg = v, (a, ap, b, bp)
    return best, arg


def correlation_tensor(state: TwoQubitState) -> np.ndarray:
    """``T[i, j] = Tr[rho sigma_i x sigma_j]``."""
    return np.array([[np.trace(state.rho @ tensor(si, sj)).real for sj in PAULIS] for si in PAULIS])


def horodecki_oracle(state: TwoQubitState) -> float:
    """Closed-form maximum of the sharp CHSH value: ``2 sqrt(m1 + m2)``."""
    t = correlation_tensor(state)
    m = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return float(2 * math.sqrt(max(m[0] + m[1], 0.0)))


def _direction(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def _setting_from_angles(x) -> ChshSetting:
    return ChshSetting(*(_direction(x[2 * i], x[2 * i + 1]) for i in range(4)))


def tsirelson_optimize(
    state: TwoQubitState,
    seed: int = 0,
    starts: int = 16,
    max_polish: int = 20,
) -> tuple[ChshReport, ChshSetting]:
    """Maximize the sharp CHSH value over all four measurement directions.

    Each start is a uniformly random point in angle space; Nelder-Mead is rerun
    from its own optimum until the value stops improving, since a collapsed
    simplex in 8 dimensions can stall short of the maximum.
    """
    if starts < 1:
        raise BellError("need at least one start")
    t = correlation_tensor(state)

    def objective(x):
        theta, phi = x[0::2], x[1::2]
        st = np.sin(theta)
        d = np.column_stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])
        # e[i, j] = E(alice_i, bob_j) for sharp spins
        e = d[:2] @ t @ d[2:].T
        return -(abs(e[0, 0] + e[1, 0]) + abs(e[0, 1] - e[1, 1]))

    rng = np.random.default_rng(seed)
    options = {"xatol": SIMPLEX_XTOL, "fatol": 1e-12, "maxiter": 20000, "maxfev": 40000}
    best_x, best_f = None, math.inf
    converged = 0
    for _ in range(starts):
        x0 = np.column_stack([np.arccos(rng.uniform(-1, 1, 4)), rng.uniform(0, 2 * np.pi, 4)]).ravel()
        res = minimize(objective, x0, method="Nelder-Mead", options=options)
        for _ in range(max_polish):
            again = minimize(objective, res.x, method="Nelder-Mead", options=options)
            improved = again.fun < res.fun - 1e-12
            res = again
            if not improved:
                break
        if res.success:
            converged += 1
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    if converged == 0:
        raise OptimizationError(f"no start converged; best value {-best_f:.12g}", best=-best_f)
    setting = _setting_from_angles(best_x)
    return chsh_quantum(state, setting, 1.0), setting
