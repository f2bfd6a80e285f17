"""Sharp and unsharp qubit spin observables and their joint measurability."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    I2,
    PSD_TOL,
    bloch_operator,
    eigvals_hermitian,
    hermitian,
    unit,
)

COEXISTENCE_TOL = 1e-12
SIGNS = (+1, -1)


class ObservableError(ValueError):
    pass


class NotCoexistentError(ObservableError):
    pass


def _check_sign(sign: int) -> int:
    if sign not in SIGNS:
        raise ObservableError(f"outcome sign must be +1 or -1, got {sign!r}")
    return sign


@dataclass(frozen=True)
class SharpSpin:
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", unit(self.direction))

    @property
    def lam(self) -> float:
        return 1.0


@dataclass(frozen=True)
class UnsharpSpin:
    lam: float
    direction: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise ObservableError(f"unsharpness must satisfy 0 < lam <= 1, got {self.lam!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "direction", unit(self.direction))


@dataclass(frozen=True)
class Povm:
    """A list of effects on a common space, validated at construction."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(hermitian(e) for e in self.effects)
        if not effects:
            raise ObservableError("a POVM needs at least one effect")
        dim = effects[0].shape[0]
        if any(e.shape[0] != dim for e in effects):
            raise ObservableError("POVM effects have mixed dimensions")
        identity = np.eye(dim)
        for i, e in enumerate(effects):
            spectrum = eigvals_hermitian(e)
            if spectrum[0] < -PSD_TOL or spectrum[-1] > 1 + PSD_TOL:
                raise ObservableError(f"effect {i} is not between 0 and I (spectrum {spectrum})")
        if np.max(np.abs(sum(effects) - identity)) > HERMITIAN_TOL:
            raise ObservableError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)

    def __len__(self):
        return len(self.effects)

    def __getitem__(self, i):
        return self.effects[i]

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


def sharp_projector(s: SharpSpin, sign: int) -> np.ndarray:
    sign = _check_sign(sign)
    return hermitian((I2 + sign * bloch_operator(s.direction)) / 2)


def unsharp_effect(u: UnsharpSpin | SharpSpin, sign: int) -> np.ndarray:
    """``(I + sign * lam * a.sigma) / 2``."""
    sign = _check_sign(sign)
    return hermitian((I2 + sign * u.lam * bloch_operator(u.direction)) / 2)


def spin_povm(obs: UnsharpSpin | SharpSpin) -> Povm:
    """The dichotomic POVM of a spin observable, outcome +1 first."""
    return Povm((unsharp_effect(obs, +1), unsharp_effect(obs, -1)))


@dataclass(frozen=True)
class SpectralDecomposition:
    reality: float
    unsharpness: float
    p_plus: np.ndarray
    p_minus: np.ndarray

    def recompose(self) -> np.ndarray:
        return self.reality * self.p_plus + self.unsharpness * self.p_minus


def spectral_decompose(u: UnsharpSpin) -> SpectralDecomposition:
    """Split ``E_lam(a)`` into its eigenvalues ``(1 +- lam)/2`` and spin projectors."""
    sharp = SharpSpin(u.direction)
    return SpectralDecomposition(
        reality=(1 + u.lam) / 2,
        unsharpness=(1 - u.lam) / 2,
        p_plus=sharp_projector(sharp, +1),
        p_minus=sharp_projector(sharp, -1),
    )


def _bloch_sum_diff(u1, u2) -> tuple[float, float]:
    v1 = u1.lam * u1.direction
    v2 = u2.lam * u2.direction
    return float(np.linalg.norm(v1 + v2)), float(np.linalg.norm(v1 - v2))


def coexistence_check(u1: UnsharpSpin, u2: UnsharpSpin) -> tuple[bool, float]:
    """Return ``(coexistent, lhs)`` with ``lhs = |l1 a1 + l2 a2| + |l1 a1 - l2 a2|``.

    The two observables admit a joint measurement iff ``lhs <= 2``.
    """
    plus, minus = _bloch_sum_diff(u1, u2)
    lhs = plus + minus
    return lhs <= 2 + COEXISTENCE_TOL, lhs


def max_equal_lambda(a1: Sequence[float], a2: Sequence[float]) -> float:
    """Largest common unsharpness at which spins along ``a1`` and ``a2`` coexist."""
    a1 = unit(a1)
    a2 = unit(a2)
    return min(1.0, 2.0 / (np.linalg.norm(a1 + a2) + np.linalg.norm(a1 - a2)))


@dataclass(frozen=True)
class JointSpinPovm:
    """Joint observable for two coexistent unsharp spins.

    ``g[(j, k)]`` is the effect for outcome ``j`` of the first spin and ``k``
    of the second.
    """

    g: Mapping[tuple[int, int], np.ndarray]
    lam1: float
    lam2: float
    dir1: np.ndarray
    dir2: np.ndarray
    gamma: float
    povm: Povm = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "povm", Povm(tuple(self.g[jk] for jk in self.outcomes())))

    @staticmethod
    def outcomes() -> list[tuple[int, int]]:
        return [(j, k) for j in SIGNS for k in SIGNS]

    def marginal(self, which: int, sign: int) -> np.ndarray:
        """Sum the effects over the partner index; ``which`` is 1 or 2."""
        if which == 1:
            return self.g[(sign, +1)] + self.g[(sign, -1)]
        if which == 2:
            return self.g[(+1, sign)] + self.g[(-1, sign)]
        raise ObservableError(f"marginal index must be 1 or 2, got {which!r}")


def gamma_interval(u1: UnsharpSpin, u2: UnsharpSpin) -> tuple[float, float]:
    """Correlation parameters for which every joint effect is positive."""
    plus, minus = _bloch_sum_diff(u1, u2)
    return plus - 1.0, 1.0 - minus


def joint_effects(u1: UnsharpSpin, u2: UnsharpSpin, gamma: float) -> dict[tuple[int, int], np.ndarray]:
    """``G_jk = [(1 + j k gamma) I + (j l1 a1 + k l2 a2).sigma] / 4``, unvalidated."""
    v1 = u1.lam * u1.direction
    v2 = u2.lam * u2.direction
    return {
        (j, k): ((1 + j * k * gamma) * I2 + bloch_operator(j * v1 + k * v2)) / 4
        for j in SIGNS
        for k in SIGNS
    }


def build_joint_povm(u1: UnsharpSpin, u2: UnsharpSpin) -> JointSpinPovm:
    coexistent, lhs = coexistence_check(u1, u2)
    if not coexistent:
        raise NotCoexistentError(
            f"no joint observable exists: |l1 a1 + l2 a2| + |l1 a1 - l2 a2| = {lhs:.12g} > 2"
        )
    low, high = gamma_interval(u1, u2)
    gamma = (low + high) / 2
    return JointSpinPovm(
        g=joint_effects(u1, u2, gamma),
        lam1=u1.lam,
        lam2=u2.lam,
        dir1=u1.direction,
        dir2=u2.direction,
        gamma=gamma,
    )


def as_observable(lam: float, direction: Sequence[float]) -> UnsharpSpin | SharpSpin:
    if lam == 1.0:
        return SharpSpin(direction)
    return UnsharpSpin(lam, direction)

