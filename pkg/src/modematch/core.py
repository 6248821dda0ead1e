"""Symplectic linear algebra core.

Conventions used throughout the package:

* modes are interleaved as (x1, p1, ..., xn, pn);
* the symplectic form is the block-diagonal stack of [[0, 1], [-1, 0]];
* a covariance matrix is a real symmetric strictly positive 2n x 2n matrix;
* Williamson output satisfies S @ gamma @ S.T = diag(d1, d1, ..., dn, dn)
  with S symplectic and d non-decreasing.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    DegenerateSubspaceFailure,
    NotPositive,
    NotSorted,
    NotSymplectic,
    NumericalFailure,
    SpectralPairingFailure,
)

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n: int) -> np.ndarray:
    """Return the 2n x 2n symplectic form in interleaved mode ordering."""
    out = np.zeros((2 * n, 2 * n))
    for k in range(n):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = _J
    return out


class SymplecticForm:
    """The canonical antisymmetric form for ``n`` modes."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("mode count must be positive")
        self.n = int(n)
        self.matrix = symplectic_form(self.n)

    def __repr__(self):
        return f"SymplecticForm(n={self.n})"


def _check_even_square(entries: np.ndarray, what: str) -> int:
    entries = np.asarray(entries)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {entries.shape}")
    if entries.shape[0] % 2 != 0:
        raise ValueError(f"{what} must have even dimension, got {entries.shape[0]}")
    return entries.shape[0] // 2


def interleaved_diagonal(values: np.ndarray) -> np.ndarray:
    """diag(v1, v1, ..., vn, vn) for a length-n vector."""
    values = np.asarray(values, dtype=float)
    return np.diag(np.repeat(values, 2))


def symplectic_defect(entries: np.ndarray) -> float:
    """Max-norm of S sigma S^T - sigma."""
    n = _check_even_square(entries, "transform")
    sig = symplectic_form(n)
    return float(np.max(np.abs(entries @ sig @ entries.T - sig)))


def symplectic_inverse(entries: np.ndarray) -> np.ndarray:
    """Inverse of a symplectic matrix via S^-1 = -sigma S^T sigma."""
    n = _check_even_square(entries, "transform")
    sig = symplectic_form(n)
    return -sig @ entries.T @ sig


class CovarianceMatrix:
    """Real symmetric strictly positive matrix of second moments.

    Validation enforces symmetry (relative to the max-norm) and strict
    positivity of the smallest eigenvalue.  Physicality, i.e. compatibility
    with the uncertainty bound gamma + i*sigma >= 0, is a separate optional
    check because the feasibility machinery also applies to strictly positive
    matrices that are not covariance matrices of quantum states.
    """

    def __init__(self, entries: np.ndarray, tol: Tolerances = DEFAULT):
        entries = np.asarray(entries, dtype=float)
        self.n = _check_even_square(entries, "covariance matrix")
        scale = max(1.0, float(np.max(np.abs(entries))))
        sym_defect = float(np.max(np.abs(entries - entries.T)))
        if sym_defect > tol.tol_sym * scale:
            raise ValueError(
                f"matrix is not symmetric: defect {sym_defect:.3g} exceeds "
                f"{tol.tol_sym:.3g} relative to max-norm {scale:.3g}"
            )
        self.entries = 0.5 * (entries + entries.T)
        min_eig = float(np.linalg.eigvalsh(self.entries)[0])
        if min_eig <= tol.tol_pos:
            raise NotPositive(
                f"matrix is not strictly positive: smallest eigenvalue {min_eig:.3g}"
            )
        self._min_eig = min_eig

    @classmethod
    def identity(cls, n: int) -> "CovarianceMatrix":
        return cls(np.eye(2 * n))

    def is_physical(self, tol_psd: float = DEFAULT.tol_psd) -> bool:
        """Uncertainty test: smallest eigenvalue of gamma + i*sigma >= -tol."""
        sig = symplectic_form(self.n)
        herm = self.entries.astype(complex) + 1j * sig
        return bool(np.linalg.eigvalsh(herm)[0] >= -tol_psd)

    def is_physical_by_spectrum(self, tol_psd: float = DEFAULT.tol_psd) -> bool:
        """Independent physicality test via the symplectic spectrum."""
        return bool(symplectic_eigenvalues(self).values[0] >= 1.0 - tol_psd)

    def __repr__(self):
        return f"CovarianceMatrix(n={self.n})"


class SymplecticTransform:
    """Real matrix S with S sigma S^T = sigma within tolerance."""

    def __init__(self, entries: np.ndarray, tol: Tolerances = DEFAULT):
        entries = np.asarray(entries, dtype=float)
        self.n = _check_even_square(entries, "symplectic transform")
        scale = max(1.0, float(np.max(np.abs(entries))) ** 2)
        defect = symplectic_defect(entries)
        if defect > tol.tol_sympl * scale:
            raise NotSymplectic(
                f"symplectic defect {defect:.3g} exceeds tolerance "
                f"{tol.tol_sympl:.3g} at scale {scale:.3g}"
            )
        self.entries = entries

    @classmethod
    def identity(cls, n: int) -> "SymplecticTransform":
        return cls(np.eye(2 * n))

    def inverse(self) -> "SymplecticTransform":
        return SymplecticTransform(symplectic_inverse(self.entries))

    def __matmul__(self, other):
        if isinstance(other, SymplecticTransform):
            return SymplecticTransform(self.entries @ other.entries)
        return self.entries @ other

    def __repr__(self):
        return f"SymplecticTransform(n={self.n})"


SPECTRUM_KINDS = ("symplectic_spectrum", "local_diagonal")


@dataclass
class SpectrumVector:
    """Non-decreasing vector of positive values.

    ``kind`` records whether the values are symplectic eigenvalues of the
    full matrix or the per-mode local symplectic values.
    """

    values: np.ndarray
    kind: str = "symplectic_spectrum"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("spectrum must be a non-empty 1-d vector")
        if self.kind not in SPECTRUM_KINDS:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if np.any(self.values <= 0):
            raise NotPositive("spectrum entries must be strictly positive")
        if np.any(np.diff(self.values) < 0):
            raise NotSorted("spectrum values must be non-decreasing")

    @classmethod
    def from_unsorted(cls, values, kind: str = "symplectic_spectrum"):
        """Sort then build; returns the vector and the sorting permutation."""
        values = np.asarray(values, dtype=float)
        order = np.argsort(values, kind="stable")
        return cls(values[order], kind), order

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values)


@dataclass
class EulerFactors:
    """Passive-squeeze-passive factorisation S = O Q V.

    ``z`` holds the n squeezing magnitudes, all >= 1; the middle factor is
    diag(z1, 1/z1, ..., zn, 1/zn).
    """

    O: SymplecticTransform
    z: np.ndarray
    V: SymplecticTransform

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)

    def q_matrix(self) -> np.ndarray:
        return np.diag(np.ravel(np.column_stack([self.z, 1.0 / self.z])))

    def reconstruct(self) -> np.ndarray:
        return self.O.entries @ self.q_matrix() @ self.V.entries


def _as_covariance(gamma, tol: Tolerances) -> CovarianceMatrix:
    if isinstance(gamma, CovarianceMatrix):
        return gamma
    return CovarianceMatrix(gamma, tol=tol)


def matrix_sqrt_spd(entries: np.ndarray, tol_pos: float = DEFAULT.tol_pos):
    """Square root and inverse square root of a symmetric positive matrix."""
    w, U = np.linalg.eigh(entries)
    if w[0] <= tol_pos:
        raise NotPositive(f"matrix is not strictly positive: smallest eigenvalue {w[0]:.3g}")
    root = np.sqrt(w)
    return (U * root) @ U.T, (U / root) @ U.T


def _skew_spectral_basis(gamma: np.ndarray, n: int, tol: Tolerances):
    """Eigen-data of the skew kernel K = sqrt(gamma) sigma sqrt(gamma).

    Returns (d, W, A_inv) where d are the n symplectic eigenvalues in
    non-decreasing order, W is orthogonal with K = W blockdiag(d_j J) W^T,
    and A_inv is the inverse square root of gamma.
    """
    sig = symplectic_form(n)
    A, A_inv = matrix_sqrt_spd(gamma, tol.tol_pos)
    K = A @ sig @ A
    lam, vecs = np.linalg.eigh(1j * K)
    # the Hermitian spectrum must be symmetric about zero: +/- doublets
    pair_tol = tol.tol_pair_rel * max(float(np.max(np.abs(lam))), 1e-300)
    mismatch = float(np.max(np.abs(lam + lam[::-1])))
    if mismatch > pair_tol:
        raise SpectralPairingFailure(
            f"skew spectrum does not pair into doublets: mismatch {mismatch:.3g}"
        )
    d = lam[n:]
    if d[0] <= 0:
        raise NotPositive("symplectic eigenvalues must be strictly positive")
    W = np.empty((2 * n, 2 * n))
    sqrt2 = np.sqrt(2.0)
    for j in range(n):
        v = vecs[:, n + j]
        mags = np.abs(v)
        # phase convention: rotate the dominant entry onto the imaginary
        # axis, first index winning near-ties, so diagonal inputs map to W = I
        lead = int(np.nonzero(mags >= mags.max() * (1.0 - 1e-9))[0][0])
        v = v * np.exp(1j * (np.pi / 2 - np.angle(v[lead])))
        W[:, 2 * j] = sqrt2 * v.imag
        W[:, 2 * j + 1] = sqrt2 * v.real
    orth_defect = float(np.max(np.abs(W.T @ W - np.eye(2 * n))))
    if orth_defect > 1e-8:
        raise DegenerateSubspaceFailure(
            f"canonical basis of the skew kernel is not orthogonal: defect {orth_defect:.3g}"
        )
    return d.copy(), W, A_inv


def symplectic_eigenvalues(gamma, tol: Tolerances = DEFAULT) -> SpectrumVector:
    """Simply-counted symplectic eigenvalues, non-decreasing.

    The values are the positive square roots of the doubly-degenerate
    eigenvalues of -gamma sigma gamma sigma, computed through the Hermitian
    spectral problem for i sqrt(gamma) sigma sqrt(gamma).
    """
    cov = _as_covariance(gamma, tol)
    d, _, _ = _skew_spectral_basis(cov.entries, cov.n, tol)
    return SpectrumVector(d, kind="symplectic_spectrum")


def williamson(gamma, tol: Tolerances = DEFAULT):
    """Normal-mode decomposition of a strictly positive matrix.

    Returns (S, D) with S symplectic and S gamma S^T = diag(d1, d1, ..., dn, dn),
    D non-decreasing.  Computed from the skew kernel sqrt(gamma) sigma
    sqrt(gamma): its orthogonal canonical form W gives S = D^{1/2} W^T
    gamma^{-1/2}, which is symplectic because the same W also canonicalises
    the inverse kernel.
    """
    cov = _as_covariance(gamma, tol)
    d, W, A_inv = _skew_spectral_basis(cov.entries, cov.n, tol)
    d_half = np.sqrt(np.repeat(d, 2))
    S = (d_half[:, None] * W.T) @ A_inv
    return SymplecticTransform(S, tol=tol), SpectrumVector(d, kind="symplectic_spectrum")


def symplectic_trace(gamma, tol: Tolerances = DEFAULT) -> float:
    """Sum of the symplectic eigenvalues.

    Bounded above by half the ordinary trace whenever the 2x2 diagonal
    blocks are proportional to the identity; in general the bound holds
    against the sum of the local symplectic values.
    """
    return float(np.sum(symplectic_eigenvalues(gamma, tol=tol).values))


def _symplectic_gram_schmidt_pairs(candidates, sig_t, chosen):
    """Pick the candidate with the largest residual after projecting out
    ``chosen``; return the normalised vector and its symplectic partner."""
    best = None
    best_norm = -1.0
    for vec in candidates:
        resid = vec.copy()
        for used in chosen:
            resid -= (used @ resid) * used
        norm = float(np.linalg.norm(resid))
        if norm > best_norm:
            best_norm = norm
            best = resid
    if best is None or best_norm < 1e-8:
        raise NumericalFailure("failed to extend symplectic basis of the unit subspace")
    u = best / best_norm
    v = sig_t @ u
    for used in chosen:
        v -= (used @ v) * used
    v -= (u @ v) * u
    norm = float(np.linalg.norm(v))
    if norm < 1e-8:
        raise NumericalFailure("symplectic partner collapsed in the unit subspace")
    return u, v / norm


def _positive_leading_sign(u: np.ndarray) -> np.ndarray:
    mags = np.abs(u)
    lead = int(np.nonzero(mags >= mags.max() * (1.0 - 1e-9))[0][0])
    return -u if u[lead] < 0 else u


def _polish_passive(M: np.ndarray) -> np.ndarray:
    """Project onto the exact orthogonal-symplectic structure.

    Averages the 2x2 blocks into the complex embedding and applies one
    Newton unitarisation step; moves M by no more than its structural
    defect, which is assumed small.
    """
    re = 0.5 * (M[0::2, 0::2] + M[1::2, 1::2])
    im = 0.5 * (M[0::2, 1::2] - M[1::2, 0::2])
    U = re + 1j * im
    eye = np.eye(U.shape[0])
    for _ in range(2):
        U = 0.5 * U @ (3.0 * eye - U.conj().T @ U)
    out = np.empty_like(M)
    out[0::2, 0::2] = U.real
    out[0::2, 1::2] = U.imag
    out[1::2, 0::2] = -U.imag
    out[1::2, 1::2] = U.real
    return out


def euler_decompose(S, tol: Tolerances = DEFAULT) -> EulerFactors:
    """Factor a symplectic matrix as S = O Q V with passive O, V.

    The symmetric positive part P of the polar splitting S = P R is
    diagonalised by an orthogonal-symplectic congruence.  Its eigenvalue
    pairs (z, 1/z) are recovered from the symmetric matrix
    sigma (P - P^{-1}) / 2, whose spectrum is +/- (z - 1/z) / 2 per mode:
    an eigenvector w for a positive value there yields the anti-squeezed
    direction u = (w - sigma w) / sqrt(2) with exact partner sigma^T u, a
    construction whose error stays at machine scale even for close or
    near-unit squeezing values.  Squeezing magnitudes are normalised to
    z >= 1 by assigning the larger member of each pair to the x quadrature.
    """
    if isinstance(S, SymplecticTransform):
        St = S
    else:
        St = SymplecticTransform(S, tol=tol)
    m = 2 * St.n
    sig = symplectic_form(St.n)
    sig_t = sig.T
    w, U = np.linalg.eigh(St.entries @ St.entries.T)
    lam = np.sqrt(np.maximum(w, 0.0))
    P = (U * lam) @ U.T
    P_inv = (U / lam) @ U.T

    half_diff = sig @ (P - P_inv) / 2.0
    half_diff = 0.5 * (half_diff + half_diff.T)
    mu, W = np.linalg.eigh(half_diff)
    # below the noise floor a plane is numerically unsqueezed; above it the
    # construction from eigenvectors is self-correcting, so no gap is needed
    tau = max(1e-12, 100.0 * np.finfo(float).eps * max(1.0, float(np.abs(mu).max())))

    pairs = []
    for i in range(m):
        if mu[i] > tau:
            u = _positive_leading_sign((W[:, i] - sig @ W[:, i]) / np.sqrt(2.0))
            z = float(mu[i] + np.sqrt(mu[i] * mu[i] + 1.0))
            pairs.append((z, u, sig_t @ u))
    if len(pairs) > St.n:
        raise NumericalFailure(
            "squeeze planes of the polar factor do not pair into doublets: "
            f"spectrum {np.sort(mu)}"
        )
    # leftover eigenvectors over-cover the unit subspace; the max-residual
    # selection inside the pairing discards what the planes already span
    cluster = [W[:, i].copy() for i in range(m) if mu[i] <= tau]
    chosen = [vec for pair in pairs for vec in pair[1:]]
    for _ in range(St.n - len(pairs)):
        u, v = _symplectic_gram_schmidt_pairs(cluster, sig_t, chosen)
        z = max(1.0, float(u @ P @ u))
        pairs.append((z, u, v))
        chosen.extend([u, v])

    pairs.sort(key=lambda item: item[0])
    O1 = np.empty((m, m))
    z_vec = np.empty(St.n)
    for r, (z, u, v) in enumerate(pairs):
        z_vec[r] = z
        O1[:, 2 * r] = u
        O1[:, 2 * r + 1] = v
    O1 = _polish_passive(O1)
    V = _polish_passive(O1.T @ (P_inv @ St.entries))
    return EulerFactors(
        O=SymplecticTransform(O1, tol=tol),
        z=z_vec,
        V=SymplecticTransform(V, tol=tol),
    )


def haar_orthogonal_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random passive transform, drawn Haar-like from the unitary picture."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    out = np.zeros((2 * n, 2 * n))
    out[0::2, 0::2] = q.real
    out[0::2, 1::2] = q.imag
    out[1::2, 0::2] = -q.imag
    out[1::2, 1::2] = q.real
    return out


def random_symplectic(n: int, squeeze_bound: float = 1.0, seed=None,
                      tol: Tolerances = DEFAULT) -> SymplecticTransform:
    """Random symplectic matrix O diag(z, 1/z, ...) V, deterministic per seed.

    O and V are Haar-like random passive transforms and the squeezing
    magnitudes are uniform in [1, squeeze_bound].
    """
    if n < 1:
        raise ValueError("mode count must be positive")
    if squeeze_bound < 1.0:
        raise ValueError("squeeze_bound must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    O = haar_orthogonal_symplectic(n, rng)
    V = haar_orthogonal_symplectic(n, rng)
    z = rng.uniform(1.0, squeeze_bound, n)
    Q = np.diag(np.ravel(np.column_stack([z, 1.0 / z])))
    return SymplecticTransform(O @ Q @ V, tol=tol)


def mode_permutation(perm) -> np.ndarray:
    """Symplectic permutation sending mode i to mode perm[i]."""
    perm = np.asarray(perm, dtype=int)
    n = perm.size
    P = np.zeros((2 * n, 2 * n))
    for i, q in enumerate(perm):
        P[2 * q, 2 * i] = 1.0
        P[2 * q + 1, 2 * i + 1] = 1.0
    return P


def embed_transform(T: np.ndarray, modes, n: int) -> np.ndarray:
    """Embed a transform on the listed modes into the identity on n modes."""
    modes = list(modes)
    E = np.eye(2 * n)
    for a, ma in enumerate(modes):
        for b, mb in enumerate(modes):
            E[2 * ma : 2 * ma + 2, 2 * mb : 2 * mb + 2] = T[2 * a : 2 * a + 2, 2 * b : 2 * b + 2]
    return E
