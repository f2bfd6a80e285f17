"""Two-qubit states, correlation functions, behavior tables and sampling.

Outcome index 0 always stands for the value +1 and index 1 for -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import I2, I4, PSD_TOL, bloch_operator, eigvals_hermitian, hermitian, tensor, vec3
from .observables import SIGNS, JointSpinPovm, Povm, SharpSpin, UnsharpSpin, spin_povm

TRACE_TOL = 1e-12
TABLE_TOL = 1e-12
IMAG_TOL = 1e-10
SAMPLE_CHUNK = 1 << 20

OUTCOME_VALUES = np.array([1, -1])


class StateError(ValueError):
    pass


@dataclass(frozen=True)
class TwoQubitState:
    rho: np.ndarray

    def __post_init__(self):
        rho = hermitian(self.rho)
        if rho.shape != (4, 4):
            raise StateError(f"two-qubit state must be 4x4, got {rho.shape}")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"density operator has trace {tr!r}, expected 1")
        if eigvals_hermitian(rho)[0] < -PSD_TOL:
            raise StateError("density operator is not positive semidefinite")
        object.__setattr__(self, "rho", rho)


def pure_state(psi: Sequence[complex]) -> TwoQubitState:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return TwoQubitState(np.outer(psi, psi.conj()))


def singlet() -> TwoQubitState:
    """(|01> - |10>)/sqrt(2); sharp correlations are ``-a.b``."""
    return pure_state([0, 1, -1, 0])


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(I4 / 4)


def werner(p: float) -> TwoQubitState:
    """``p * singlet + (1 - p) * I/4``."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"Werner weight must lie in [0, 1], got {p!r}")
    return TwoQubitState(p * singlet().rho + (1 - p) * I4 / 4)


def product_state(bloch_a: Sequence[float] = (0, 0, 1), bloch_b: Sequence[float] = (0, 0, 1)) -> TwoQubitState:
    """Product of two single-qubit states given by Bloch vectors (|v| <= 1)."""
    ra = (I2 + bloch_operator(vec3(bloch_a))) / 2
    rb = (I2 + bloch_operator(vec3(bloch_b))) / 2
    return TwoQubitState(tensor(ra, rb))


def random_state(rng: np.random.Generator, rank: int = 4) -> TwoQubitState:
    """Ginibre-distributed density operator of the given rank."""
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return TwoQubitState(rho / np.trace(rho).real)


def expectation(state: TwoQubitState, a, b) -> float:
    """``Tr[rho (A x B)]`` for single-qubit operators A (Alice) and B (Bob)."""
    value = np.trace(state.rho @ tensor(a, b))
    if abs(value.imag) > IMAG_TOL:
        raise StateError(f"expectation has imaginary part {value.imag:.3e}; operators not Hermitian?")
    return float(value.real)


def _as_povm(obs) -> Povm:
    if isinstance(obs, Povm):
        return obs
    if isinstance(obs, (SharpSpin, UnsharpSpin)):
        return spin_povm(obs)
    raise StateError(f"cannot interpret {obs!r} as a measurement")


def _dichotomic(povm: Povm) -> Povm:
    if len(povm) != 2 or povm.dim != 2:
        raise StateError("behavior tables need dichotomic single-qubit POVMs")
    return povm


def outcome_table(state: TwoQubitState, alice, bob) -> np.ndarray:
    """``p[a, b] = Tr[rho (E_a x F_b)]`` over all outcome indices."""
    ea = _as_povm(alice)
    fb = _as_povm(bob)
    p = np.array([[expectation(state, e, f) for f in fb.effects] for e in ea.effects])
    return np.clip(p, 0.0, 1.0)


def correlation(state: TwoQubitState, obs_a, obs_b) -> float:
    """``E = sum_ab a b p(a, b)`` for dichotomic observables."""
    p = outcome_table(state, _dichotomic(_as_povm(obs_a)), _dichotomic(_as_povm(obs_b)))
    return float(OUTCOME_VALUES @ p @ OUTCOME_VALUES)


@dataclass(frozen=True)
class BehaviorTable:
    """``p[x, y, a, b]``: probability of outcomes (a, b) given settings (x, y)."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2, 2, 2, 2):
            raise StateError(f"behavior table must have shape (2, 2, 2, 2), got {p.shape}")
        if np.any(p < -TABLE_TOL) or np.any(p > 1 + TABLE_TOL):
            raise StateError("behavior table has entries outside [0, 1]")
        sums = p.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1)) > TABLE_TOL:
            raise StateError(f"behavior table slices do not sum to 1: {sums.tolist()}")
        object.__setattr__(self, "p", p)

    def correlation(self, x: int, y: int) -> float:
        return float(OUTCOME_VALUES @ self.p[x, y] @ OUTCOME_VALUES)

    def correlations(self) -> tuple[float, float, float, float]:
        """(E(A,B), E(A',B), E(A,B'), E(A',B'))."""
        return (self.correlation(0, 0), self.correlation(1, 0), self.correlation(0, 1), self.correlation(1, 1))

    def alice_marginals(self) -> np.ndarray:
        """``[x, y, a]``."""
        return self.p.sum(axis=3)

    def bob_marginals(self) -> np.ndarray:
        """``[x, y, b]``."""
        return self.p.sum(axis=2)

    def transpose(self) -> "BehaviorTable":
        """Swap the roles of Alice and Bob."""
        return BehaviorTable(self.p.transpose(1, 0, 3, 2))

    def to_dict(self) -> dict:
        return {
            "settings": {"x": 2, "y": 2},
            "outcomes": [1, -1],
            "p": {f"{x},{y}": self.p[x, y].tolist() for x in range(2) for y in range(2)},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BehaviorTable":
        try:
            if doc.get("outcomes", [1, -1]) != [1, -1]:
                raise StateError("outcomes must be listed as [1, -1]")
            settings = doc.get("settings", {"x": 2, "y": 2})
            if settings != {"x": 2, "y": 2}:
                raise StateError("only two settings per party are supported")
            p = np.empty((2, 2, 2, 2))
            for x in range(2):
                for y in range(2):
                    p[x, y] = np.asarray(doc["p"][f"{x},{y}"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, StateError):
                raise
            raise StateError(f"malformed behavior table: {exc}") from exc
        return cls(p)

    def rows(self):
        """(x, y, a, b, probability) with a, b as +-1 values."""
        for x in range(2):
            for y in range(2):
                for ia, a in enumerate(OUTCOME_VALUES):
                    for ib, b in enumerate(OUTCOME_VALUES):
                        yield x, y, int(a), int(b), float(self.p[x, y, ia, ib])


def behavior_from_state(state: TwoQubitState, alice: Sequence, bob: Sequence) -> BehaviorTable:
    """Behavior of two measurements per side; entries of ``alice``/``bob`` are POVMs or spins."""
    alice = [_dichotomic(_as_povm(m)) for m in alice]
    bob = [_dichotomic(_as_povm(m)) for m in bob]
    if len(alice) != 2 or len(bob) != 2:
        raise StateError("need exactly two measurements per party")
    p = np.array([[outcome_table(state, ea, fb) for fb in bob] for ea in alice])
    return BehaviorTable(p)


@dataclass(frozen=True)
class JointBehavior:
    """``q[y, j, k, b]`` for Alice's joint outcomes (j, k) and Bob's outcome b under setting y."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (2, 2, 2, 2):
            raise StateError(f"joint behavior must have shape (2, 2, 2, 2), got {q.shape}")
        if np.any(q < -TABLE_TOL) or np.any(q > 1 + TABLE_TOL):
            raise StateError("joint behavior has entries outside [0, 1]")
        sums = q.sum(axis=(1, 2, 3))
        if np.max(np.abs(sums - 1)) > TABLE_TOL:
            raise StateError(f"joint behavior slices do not sum to 1: {sums.tolist()}")
        object.__setattr__(self, "q", q)

    def marginal_behavior(self, which: int) -> np.ndarray:
        """``[y, a, b]`` for the first (which=1) or second (which=2) joint outcome."""
        axis = 2 if which == 1 else 1
        return self.q.sum(axis=axis)

    def to_dict(self) -> dict:
        return {"outcomes": [1, -1], "q": {str(y): self.q[y].tolist() for y in range(2)}}

    @classmethod
    def from_dict(cls, doc: dict) -> "JointBehavior":
        try:
            if doc.get("outcomes", [1, -1]) != [1, -1]:
                raise StateError("outcomes must be listed as [1, -1]")
            q = np.array([np.asarray(doc["q"][str(y)], dtype=float) for y in range(2)])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, StateError):
                raise
            raise StateError(f"malformed joint behavior: {exc}") from exc
        return cls(q)


def joint_behavior_from_state(state: TwoQubitState, joint: JointSpinPovm, bobs: Sequence) -> JointBehavior:
    bob = [_dichotomic(_as_povm(m)) for m in bobs]
    if len(bob) != 2:
        raise StateError("need exactly two Bob measurements")
    q = np.empty((2, 2, 2, 2))
    for y, fb in enumerate(bob):
        for ij, j in enumerate(SIGNS):
            for ik, k in enumerate(SIGNS):
                for ib, f in enumerate(fb.effects):
                    q[y, ij, ik, ib] = expectation(state, joint.g[(j, k)], f)
    return JointBehavior(np.clip(q, 0.0, 1.0))


def sample_counts(probs, n: int, seed: int | Sequence[int]) -> np.ndarray:
    """Draw ``n`` outcomes from ``probs`` by inverse CDF; returns counts with ``probs``' shape.

    The draws are split into fixed chunks of ``SAMPLE_CHUNK``; chunk ``c`` uses a
    Philox stream keyed by ``(seed, c)``, so chunks are independent of each
    other and of how they are scheduled. ``seed`` may be an integer or a
    sequence of integers.
    """
    key = [int(s) for s in seed] if isinstance(seed, (list, tuple)) else [int(seed)]
    if n < 1:
        raise StateError(f"sample size must be at least 1, got {n!r}")
    probs = np.asarray(probs, dtype=float)
    flat = np.clip(probs.ravel(), 0.0, None)
    cdf = np.cumsum(flat)
    cdf /= cdf[-1]
    counts = np.zeros(flat.size, dtype=np.int64)
    for chunk, start in enumerate(range(0, n, SAMPLE_CHUNK)):
        size = min(SAMPLE_CHUNK, n - start)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([*key, chunk])))
        idx = np.searchsorted(cdf, rng.random(size), side="right")
        counts += np.bincount(np.minimum(idx, flat.size - 1), minlength=flat.size)
    return counts.reshape(probs.shape)


def sample_outcomes(state: TwoQubitState, alice_povm, bob_povm, n: int, seed: int | Sequence[int]) -> np.ndarray:
    """Counts ``[a, b]`` of ``n`` simulated joint outcomes."""
    return sample_counts(outcome_table(state, alice_povm, bob_povm), n, seed)


def sample_joint_outcomes(state: TwoQubitState, joint: JointSpinPovm, bob_povm, n: int, seed: int | Sequence[int]) -> np.ndarray:
    """Counts ``[j, k, b]`` for a joint POVM on Alice's side and one Bob measurement."""
    fb = _dichotomic(_as_povm(bob_povm))
    probs = np.array(
        [[[expectation(state, joint.g[(j, k)], f) for f in fb.effects] for k in SIGNS] for j in SIGNS]
    )
    return sample_counts(probs, n, seed)


def empirical_correlation(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    return float(OUTCOME_VALUES @ counts @ OUTCOME_VALUES / counts.sum())
