"""Thermal entropy function, entanglement sharing, and the global bound.

The per-mode entropy of a thermal mode with local symplectic value c is

    s(c) = ((c + 1) / 2) log2((c + 1) / 2) - ((c - 1) / 2) log2((c - 1) / 2),

a monotone increasing concave function on [1, inf) with s(1) = 0, measured
in bits.  For a globally pure state the entanglement of mode j with the rest
is s(c_j), and the attainable entanglement profiles form the image of the
cone c_j - 1 <= sum_{k != j} (c_k - 1).  For any state, Gaussian or not,
with local values c the global von Neumann entropy is bounded by s(sum c_k).
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .core import _as_covariance, symplectic_eigenvalues
from .errors import BelowOne, InversionFailure, NegativeEntry, NotPure
from .marginals import _as_vector, check_pure, local_diagonal


@dataclass
class EntropyReport:
    """Per-mode entropies and the local-measurement entropy bound."""

    per_mode_entropies: np.ndarray
    total_local_sum: float
    global_upper_bound: float
    purity_consistent: bool


def entropy_s(c: float, tol: Tolerances = DEFAULT) -> float:
    """Thermal entropy in bits of a mode with local symplectic value c >= 1.

    Values within tol_psd below one are clamped to one; s(1) = 0 by the
    0 log 0 = 0 convention.
    """
    c = float(c)
    if c < 1.0 - tol.tol_psd:
        raise BelowOne(f"entropy argument {c} lies below 1")
    c = max(c, 1.0)
    up = 0.5 * (c + 1.0)
    down = 0.5 * (c - 1.0)
    out = up * np.log2(up)
    if down > 0.0:
        out -= down * np.log2(down)
    return float(out)


def entropy_s_inverse(value: float, tol: Tolerances = DEFAULT) -> float:
    """Monotone inverse of entropy_s by bisection.

    Brackets the root by geometric growth of the upper end, then bisects the
    interval down to 1e-12 (absolute, with a relative floor for large
    arguments).
    """
    value = float(value)
    if not np.isfinite(value):
        raise InversionFailure(f"entropy value {value} is not finite")
    if value < 0.0:
        raise NegativeEntry(f"entropy value {value} is negative")
    if value == 0.0:
        return 1.0
    hi = 2.0
    for _ in range(1100):
        if entropy_s(hi, tol) >= value:
            break
        hi *= 2.0
    else:
        raise InversionFailure(f"failed to bracket entropy value {value}")
    lo = 1.0
    while hi - lo > 1e-12 * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if entropy_s(mid, tol) < value:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def entanglement_profile(gamma, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Entropies (s(c_1), ..., s(c_n)) of the single-mode reductions.

    Requires a physical pure-state covariance; for such states the per-mode
    entropy equals the entanglement of that mode with the rest.
    """
    cov = _as_covariance(gamma, tol)
    d = symplectic_eigenvalues(cov, tol).values
    if np.max(np.abs(d - 1.0)) > tol.tol_psd:
        raise NotPure(f"matrix is not pure: symplectic spectrum {d}")
    c = local_diagonal(cov, tol).values.values
    return np.array([entropy_s(cj, tol) for cj in c])


def sharing_feasible(E, tol: Tolerances = DEFAULT):
    """Can entanglement entropies E arise from one pure global state?

    Inverts the entropy function mode by mode and applies the pure-state
    feasibility cone to the recovered local excitations.
    """
    E = _as_vector(E, "E")
    if np.any(E < 0):
        raise NegativeEntry("entanglement entropies must be non-negative")
    c = np.array([entropy_s_inverse(v, tol) for v in E])
    return check_pure(np.maximum(c - 1.0, 0.0), tol)


def entropy_upper_bound(c, tol: Tolerances = DEFAULT) -> float:
    """Bound s(sum c_k) on the global entropy from local values alone.

    Valid for any state with these local second moments, Gaussian or not:
    the Gaussian state with the same covariance majorises the entropy, its
    entropy is the spectrum sum, and concavity plus the trace comparison
    finish the chain.
    """
    c = _as_vector(c, "c")
    if np.any(c < 1.0 - tol.tol_psd):
        raise BelowOne("local values must be >= 1 for the entropy bound")
    return entropy_s(float(np.sum(np.maximum(c, 1.0))), tol)


def entropy_report(c=None, gamma=None, tol: Tolerances = DEFAULT) -> EntropyReport:
    """Assemble the entropy summary from local values or a full matrix."""
    if (c is None) == (gamma is None):
        raise ValueError("provide exactly one of c or gamma")
    if gamma is not None:
        c = local_diagonal(_as_covariance(gamma, tol), tol).values.values
    else:
        c = np.sort(_as_vector(c, "c"))
    per_mode = np.array([entropy_s(v, tol) for v in c])
    bound = entropy_upper_bound(c, tol)
    pure_ok = check_pure(np.maximum(c - 1.0, 0.0), tol).feasible
    return EntropyReport(
        per_mode_entropies=per_mode,
        total_local_sum=float(np.sum(per_mode)),
        global_upper_bound=bound,
        purity_consistent=pure_ok,
    )
