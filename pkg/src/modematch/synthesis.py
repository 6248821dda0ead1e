"""Constructive synthesis of matrices with prescribed (c, d) data.

Given feasible local values c and spectrum d, the builder assembles an
explicit strictly positive matrix realising both.  The construction is
inductive: each level couples two modes through a closed-form 4x4 kernel,
direct-sums the untouched part of the spectrum, and splices in the
recursively built remainder through a symplectic congruence on the other
n - 1 modes.  Every step is recorded so the result can be replayed and
audited.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .core import (
    CovarianceMatrix,
    embed_transform,
    interleaved_diagonal,
    mode_permutation,
    symplectic_inverse,
    williamson,
)
from .errors import (
    InfeasibleInput,
    InfeasiblePair,
    NotPositive,
    NumericalFailure,
    ToleranceCollapse,
)
from .marginals import _as_vector, check_mixed, check_pure


@dataclass
class TwoModeBlock:
    """4x4 coupling kernel with locals (c1, c2) and spectrum (d1, d2).

    The assembled matrix is
        [[c1, 0,  e, 0],
         [0,  c1, 0, f],
         [e,  0,  c2, 0],
         [0,  f,  0, c2]].
    """

    c1: float
    c2: float
    d1: float
    d2: float
    e: float
    f: float

    def matrix(self) -> np.ndarray:
        return assemble_two_mode(self.c1, self.c2, self.e, self.f)


@dataclass
class DirectSumStep:
    """Seed the listed modes with uncoupled diagonal blocks value * I."""

    modes: tuple[int, ...]
    values: tuple[float, ...]


@dataclass
class TwoModeStep:
    """Install a two-mode kernel between a pair of seeded modes."""

    modes: tuple[int, int]
    locals_: tuple[float, float]
    couplings: tuple[float, float]


@dataclass
class CongruenceStep:
    """Apply a symplectic congruence on the listed modes."""

    modes: tuple[int, ...]
    transform: np.ndarray


SynthesisStep = DirectSumStep | TwoModeStep | CongruenceStep


@dataclass
class SynthesisTrace:
    """Ordered build log plus the final matrix.

    Steps are recorded innermost level first; replaying them in order on a
    zeroed state reproduces ``final_matrix``.  Each level contributes a
    DirectSumStep seeding all of its modes, optionally a TwoModeStep, and
    optionally a CongruenceStep acting on all but one of its modes.
    """

    n: int
    steps: list[SynthesisStep] = field(default_factory=list)
    final_matrix: CovarianceMatrix | None = None


def assemble_two_mode(c1: float, c2: float, e: float, f: float) -> np.ndarray:
    out = np.diag([c1, c1, c2, c2]).astype(float)
    out[0, 2] = out[2, 0] = e
    out[1, 3] = out[3, 1] = f
    return out


def two_mode_eigenvalues_closed_form(c1: float, c2: float, e: float, f: float,
                                     tol: Tolerances = DEFAULT):
    """Symplectic eigenvalues of the assembled two-mode matrix, closed form.

    d_{1/2}^2 = (c1^2 + c2^2 + 2ef
                 +/- sqrt(c1^4 + c2^4 + 4 e f c2^2 - 2 c1^2 (c2^2 - 2 e f)
                          + 4 c1 c2 (e^2 + f^2))) / 2

    Requires the assembled matrix to be strictly positive.
    """
    if c1 <= 0 or c2 <= 0 or c1 * c2 - e * e <= 0 or c1 * c2 - f * f <= 0:
        raise NotPositive("assembled two-mode matrix is not strictly positive")
    radicand = (
        c1**4
        + c2**4
        + 4.0 * e * f * c2**2
        - 2.0 * c1**2 * (c2**2 - 2.0 * e * f)
        + 4.0 * c1 * c2 * (e**2 + f**2)
    )
    root = np.sqrt(max(radicand, 0.0))
    base = c1 * c1 + c2 * c2 + 2.0 * e * f
    d1_sq = (base - root) / 2.0
    d2_sq = (base + root) / 2.0
    if d1_sq <= 0:
        raise NotPositive("assembled two-mode matrix has non-positive symplectic eigenvalue")
    return float(np.sqrt(d1_sq)), float(np.sqrt(d2_sq))


def solve_two_mode(c1: float, c2: float, d1: float, d2: float,
                   tol: Tolerances = DEFAULT) -> TwoModeBlock:
    """Couplings (e, f) realising spectrum (d1, d2) with locals (c1, c2).

    Solves the two symmetric-function equations

        e * f       = (d1^2 + d2^2 - c1^2 - c2^2) / 2
        e^2 + f^2   = ((c1 c2)^2 + (e f)^2 - (d1 d2)^2) / (c1 c2)

    choosing e >= 0 and sign(f) = sign(e * f).  Requires c2 >= c1 > 0,
    d2 >= d1 > 0 and the pair inequalities

        c1 + c2 >= d1 + d2,    c2 - c1 <= d2 - d1.
    """
    if not (0 < c1 <= c2) or not (0 < d1 <= d2):
        raise InfeasiblePair(
            f"inputs must satisfy 0 < c1 <= c2 and 0 < d1 <= d2, got "
            f"c=({c1}, {c2}), d=({d1}, {d2})"
        )
    if (c1 + c2) - (d1 + d2) < -tol.tol_ineq or (d2 - d1) - (c2 - c1) < -tol.tol_ineq:
        raise InfeasiblePair(
            f"pair inequalities violated for c=({c1}, {c2}), d=({d1}, {d2})"
        )
    eps = np.finfo(float).eps
    p = 0.5 * (d1 * d1 + d2 * d2 - c1 * c1 - c2 * c2)
    s = ((c1 * c2) ** 2 + p * p - (d1 * d2) ** 2) / (c1 * c2)
    if s < -tol.tol_ineq:
        raise NumericalFailure(f"coupling magnitude e^2 + f^2 = {s:.3g} is negative")
    s = max(s, 0.0)
    p_noise = 16.0 * eps * (d1 * d1 + d2 * d2 + c1 * c1 + c2 * c2)
    s_noise = 16.0 * eps * ((c1 * c2) ** 2 + p * p + (d1 * d2) ** 2) / (c1 * c2)
    if abs(p) <= p_noise and s <= s_noise:
        # both target equations vanish to rounding noise (c = d): keep the
        # boundary exactly uncoupled rather than sqrt(noise)-coupled
        return TwoModeBlock(c1=c1, c2=c2, d1=d1, d2=d2, e=0.0, f=0.0)
    disc = s * s - 4.0 * p * p
    if disc < -tol.tol_ineq:
        raise NumericalFailure(f"discriminant for (e^2, f^2) is negative: {disc:.3g}")
    noise = 64.0 * eps * (s * s + 4.0 * p * p + s * c1 * c2)
    if disc <= noise:
        # double root |e| = |f|: store the couplings with bit-exact symmetry
        # so a degenerate target spectrum survives in the assembled matrix
        # instead of splitting by the square root of the rounding noise
        e = float(np.sqrt(abs(p)))
        f = float(np.copysign(e, p)) if e > 0 else 0.0
    else:
        t = 0.5 * (s + np.sqrt(disc))
        e = float(np.sqrt(t))
        f = float(p / e) if e > 0 else 0.0
    return TwoModeBlock(c1=c1, c2=c2, d1=d1, d2=d2, e=e, f=f)


def _coupling_block(e: float, f: float) -> np.ndarray:
    return np.diag([e, f]).astype(float)


def _recursion_check(c: np.ndarray, d: np.ndarray, tol: Tolerances):
    verdict = check_mixed(c, d, tol)
    if not verdict.feasible:
        raise ToleranceCollapse(
            "recursive subproblem lost feasibility "
            f"(min slack {verdict.min_slack:.3g}); this indicates a bug"
        )


def _splice_transform(child_matrix: np.ndarray, remainder_values: np.ndarray,
                      tol: Tolerances) -> np.ndarray:
    """Symplectic T with T diag(remainder) T^T = child_matrix.

    Built from the Williamson factors of the child and the mode permutation
    aligning the remainder's diagonal order with Williamson (sorted) order.
    """
    S_w, _ = williamson(child_matrix, tol)
    perm = np.argsort(remainder_values, kind="stable")
    Pi = mode_permutation(perm)
    return symplectic_inverse(S_w.entries) @ Pi.T


def _shift_steps(steps, offset: int):
    if offset == 0:
        return steps
    out = []
    for step in steps:
        if isinstance(step, DirectSumStep):
            out.append(DirectSumStep(tuple(m + offset for m in step.modes), step.values))
        elif isinstance(step, TwoModeStep):
            out.append(TwoModeStep((step.modes[0] + offset, step.modes[1] + offset),
                                   step.locals_, step.couplings))
        else:
            out.append(CongruenceStep(tuple(m + offset for m in step.modes), step.transform))
    return out


def _synthesize(c: np.ndarray, d: np.ndarray, tol: Tolerances):
    """Recursive builder; returns (matrix, steps) with level-local modes."""
    n = c.size
    if np.array_equal(c, d):
        # all partial-sum slacks vanish, the witness is exactly diagonal
        return interleaved_diagonal(c), [DirectSumStep(tuple(range(n)), tuple(c))]
    if n == 1:
        # conditions force c1 = d1; within tolerance the witness is diag(c1, c1)
        return interleaved_diagonal(c), [DirectSumStep((0,), (float(c[0]),))]
    if n == 2:
        block = solve_two_mode(c[0], c[1], d[0], d[1], tol)
        steps = [
            DirectSumStep((0, 1), (float(c[0]), float(c[1]))),
            TwoModeStep((0, 1), (float(c[0]), float(c[1])), (block.e, block.f)),
        ]
        return block.matrix(), steps

    # largest k (1-based) with c1 >= d_k, equality within tolerance rounding up
    k = int(np.searchsorted(d, c[0] + tol.tol_ineq, side="right"))
    if 1 <= k <= n - 2:
        # pair (c1, x) with (d_k, d_{k+1}) where x = d_k + d_{k+1} - c1
        x = float(d[k - 1] + d[k] - c[0])
        lo, hi = sorted((float(c[0]), x))
        block = solve_two_mode(lo, hi, float(d[k - 1]), float(d[k]), tol)
        tail = np.concatenate([d[: k - 1], d[k + 1 :]])
        d_child = np.sort(np.concatenate([tail, [x]]))
        _recursion_check(c[1:], d_child, tol)
        child, child_steps = _synthesize(c[1:], d_child, tol)
        remainder = np.concatenate([[x], tail])
        T = _splice_transform(child, remainder, tol)

        seed = np.concatenate([[c[0]], remainder])
        M = interleaved_diagonal(seed)
        M[0:2, 2:4] = _coupling_block(block.e, block.f)
        M[2:4, 0:2] = M[0:2, 2:4]
        G = embed_transform(T, range(1, n), n)
        steps = _shift_steps(child_steps, 1)
        steps.append(DirectSumStep(tuple(range(n)), tuple(seed)))
        steps.append(TwoModeStep((0, 1), (float(c[0]), x), (block.e, block.f)))
        steps.append(CongruenceStep(tuple(range(1, n)), T))
        return G @ M @ G.T, steps

    # k in {n-1, n}: pair (c_n, x) with (d_{n-1}, d_n), x anywhere in the
    # interval below; the midpoint stays clear of boundary degeneracies
    lower = max(
        float(d[n - 2]),
        float(d[n - 2] + d[n - 1] - c[n - 1]),
        float(d[n - 2] - d[n - 1] + c[n - 1]),
        float(np.sum(d[: n - 2]) + c[n - 2] - np.sum(c[: n - 2])),
    )
    upper = min(
        float(d[n - 1] - d[n - 2] + c[n - 1]),
        float(np.sum(c[: n - 1]) - np.sum(d[: n - 2])),
    )
    if lower > upper + tol.tol_ineq:
        raise ToleranceCollapse(
            f"empty interval for the auxiliary value: [{lower:.17g}, {upper:.17g}]"
        )
    x = 0.5 * (lower + max(lower, upper))
    lo, hi = sorted((x, float(c[n - 1])))
    block = solve_two_mode(lo, hi, float(d[n - 2]), float(d[n - 1]), tol)
    tail = d[: n - 2]
    d_child = np.sort(np.concatenate([tail, [x]]))
    _recursion_check(c[: n - 1], d_child, tol)
    child, child_steps = _synthesize(c[: n - 1], d_child, tol)
    remainder = np.concatenate([tail, [x]])
    T = _splice_transform(child, remainder, tol)

    seed = np.concatenate([remainder, [c[n - 1]]])
    M = interleaved_diagonal(seed)
    i0 = 2 * (n - 2)
    M[i0 : i0 + 2, i0 + 2 : i0 + 4] = _coupling_block(block.e, block.f)
    M[i0 + 2 : i0 + 4, i0 : i0 + 2] = M[i0 : i0 + 2, i0 + 2 : i0 + 4]
    G = embed_transform(T, range(n - 1), n)
    steps = list(child_steps)
    steps.append(DirectSumStep(tuple(range(n)), tuple(seed)))
    steps.append(TwoModeStep((n - 2, n - 1), (x, float(c[n - 1])), (block.e, block.f)))
    steps.append(CongruenceStep(tuple(range(n - 1)), T))
    return G @ M @ G.T, steps


def synthesize(c, d, tol: Tolerances = DEFAULT) -> SynthesisTrace:
    """Build a matrix with local values c and symplectic spectrum d.

    Both vectors must be sorted non-decreasing, strictly positive, and pass
    the feasibility gate.  Returns the build trace; the witness matrix is
    ``trace.final_matrix``.  The realising matrix is not unique, this returns
    the one produced by the recorded two-mode steps.
    """
    c = _as_vector(c, "c").copy()
    d = _as_vector(d, "d").copy()
    verdict = check_mixed(c, d, tol)
    if not verdict.feasible:
        worst = min(verdict.violated, key=lambda s: s.slack)
        raise InfeasibleInput(
            f"(c, d) pair is infeasible: {worst.label()} slack {worst.slack:.3g}"
        )
    matrix, steps = _synthesize(c, d, tol)
    return SynthesisTrace(n=c.size, steps=steps,
                          final_matrix=CovarianceMatrix(matrix, tol=tol))


def synthesize_pure(b, tol: Tolerances = DEFAULT) -> SynthesisTrace:
    """Build a pure-state covariance with local excitations b >= 0.

    Delegates to synthesize(c = b + 1, d = (1, ..., 1)); the result has all
    symplectic eigenvalues equal to one within tolerance and unit determinant.
    """
    b = np.sort(_as_vector(b, "b"))
    verdict = check_pure(b, tol)
    if not verdict.feasible:
        raise InfeasibleInput(
            f"b vector is outside the pure cone: slack {verdict.min_slack:.3g}"
        )
    return synthesize(b + 1.0, np.ones_like(b), tol)


def replay_trace(trace: SynthesisTrace) -> np.ndarray:
    """Re-run the recorded steps on a blank state.

    DirectSumSteps reset their modes (clearing stale couplings), TwoModeSteps
    install kernels, CongruenceSteps conjugate.  The result must match
    ``trace.final_matrix`` within the reconstruction tolerance.
    """
    m = 2 * trace.n
    state = np.zeros((m, m))
    for step in trace.steps:
        if isinstance(step, DirectSumStep):
            for mode, value in zip(step.modes, step.values):
                state[2 * mode : 2 * mode + 2, :] = 0.0
                state[:, 2 * mode : 2 * mode + 2] = 0.0
                state[2 * mode, 2 * mode] = value
                state[2 * mode + 1, 2 * mode + 1] = value
        elif isinstance(step, TwoModeStep):
            i, j = step.modes
            a, b = step.locals_
            state[2 * i, 2 * i] = state[2 * i + 1, 2 * i + 1] = a
            state[2 * j, 2 * j] = state[2 * j + 1, 2 * j + 1] = b
            coup = _coupling_block(*step.couplings)
            state[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = coup
            state[2 * j : 2 * j + 2, 2 * i : 2 * i + 2] = coup
        else:
            E = embed_transform(step.transform, step.modes, trace.n)
            state = E @ state @ E.T
    return state


def sample_feasible_pair(rng: np.random.Generator, n: int,
                         d_low: float = 0.5, d_high: float = 4.0,
                         physical: bool = False, tol: Tolerances = DEFAULT):
    """Random feasible (c, d) pair for property testing.

    Samples d, starts from the boundary point c = d, applies feasibility
    preserving perturbations (uniform increase of a suffix of c, with the
    last-entry-only case capped by the remaining slack), and with probability
    0.2 tightens back toward the boundary.  The result is re-checked before
    being returned.
    """
    low = max(d_low, 1.0) if physical else d_low
    d = np.sort(rng.uniform(low, d_high, n))
    c = d.copy()
    for _ in range(int(rng.integers(1, 4))):
        j0 = int(rng.integers(0, n))
        if j0 == n - 1:
            head = (2.0 * d[-1] - np.sum(d)) - (2.0 * c[-1] - np.sum(c))
            delta = rng.uniform(0.0, max(head, 0.0))
        else:
            delta = rng.uniform(0.0, d_high / 2.0)
        c[j0:] += delta
    if rng.random() < 0.2:
        c = d + rng.random() * (c - d)
    verdict = check_mixed(c, d, tol)
    if not verdict.feasible:
        raise NumericalFailure("feasibility-preserving sampler produced an infeasible pair")
    return c, d
