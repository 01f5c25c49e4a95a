"""Fermionic LCU decompositions and their symmetry shifts.

Double factorization writes the two-electron tensor as a sum of low-rank
fragments g = sum_a sign_a L_a (x) L_a with L_a = U_a^T diag(eps_a) U_a, so
each fragment is a rotated perfect square sign * U+ (sum_is eps_i n_is)^2 U.
The qubitization 1-norm of such a fragment is

    lambda_DF = (1/2) (sum_i |eps_i - phi|)^2

for an optional scalar shift phi; the unshifted fragment has phi = None.
Full-rank fragments carry a symmetric coefficient matrix lambda and cost

    lambda_CSA = sum_{i != j} |l_ij - mu2 - (th_i + th_j)/2|
               + (1/2) sum_i |l_ii - mu2 - th_i|.

Two fragment-shift strategies are provided: the analytic median shift that
preserves the perfect-square structure (:func:`lrps_shift`) and a small LP
over (mu2, theta) that trades the structure for a lower bound-free optimum
(:func:`lrbs_shift`).  :func:`assemble_global_bliss` folds either family of
per-fragment shifts into one global parameter triple.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hamiltonian import BlissParams, MolecularHamiltonian
from .l1min import (L1Problem, L1Status, SolverOptions, l1_minimize,
                    merge_duplicate_rows)

__all__ = [
    "DFFragment",
    "CsaFragment",
    "OneBodySpectrum",
    "LrpsCorrection",
    "FragmentNorm",
    "FermionicNormReport",
    "IterationLimitError",
    "double_factorize",
    "factorize_two_body_tensor",
    "reconstruct_two_body",
    "fragment_hamiltonian",
    "lambda_df",
    "lambda_csa",
    "canonical_median",
    "one_electron_shift",
    "lrps_shift",
    "lrps_one_body_correction",
    "lrbs_shift",
    "to_csa_fragment",
    "build_fermionic_report",
    "assemble_global_bliss",
    "FERMIONIC_METHODS",
]

FERMIONIC_METHODS = ("df", "df-lrps", "df-lrbs")

# Eigenvectors of the reshaped two-body matrix must be symmetric matrices;
# larger asymmetry on a non-negligible eigenvalue signals a broken tensor.
EIGENVECTOR_SYMMETRY_TOL = 1e-8


class IterationLimitError(RuntimeError):
    """An inner LP stopped on its pivot budget instead of at optimality."""


def _orthogonality_defect(u: np.ndarray) -> float:
    return float(np.abs(u @ u.T - np.eye(u.shape[0])).max())


@dataclass(frozen=True)
class DFFragment:
    """One perfect-square fragment of a double factorization.

    Attributes:
        u: (N, N) orthogonal matrix; row i is the i-th eigenbasis vector.
        eps: fragment coefficients in the rotated basis.
        sign: +1 or -1, the sign of the source eigenvalue.
        phi: optional scalar shift; None for an unshifted fragment.
    """

    u: np.ndarray
    eps: np.ndarray
    sign: int
    phi: float | None = None

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=float)
        eps = np.array(self.eps, dtype=float)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"u must be square, got shape {u.shape}")
        if eps.shape != (u.shape[0],):
            raise ValueError("eps length must match the rotation dimension")
        if _orthogonality_defect(u) > 1e-10:
            raise ValueError("u must be orthogonal")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        u.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "sign", int(self.sign))
        if self.phi is not None:
            object.__setattr__(self, "phi", float(self.phi))

    @property
    def n_orb(self) -> int:
        return self.u.shape[0]

    def shifted_eps(self) -> np.ndarray:
        return self.eps - self.phi if self.phi is not None else self.eps

    def coefficient_matrix(self, shifted: bool = False) -> np.ndarray:
        """U^T diag(eps) U, optionally with the phi shift applied."""
        eps = self.shifted_eps() if shifted else self.eps
        return self.u.T @ np.diag(eps) @ self.u


@dataclass(frozen=True)
class CsaFragment:
    """Full-rank fragment sum_ij,st lam_ij n_is n_jt in the frame ``u``,
    with an optional shift (mu2, theta) recorded alongside."""

    u: np.ndarray
    lam: np.ndarray
    mu2: float = 0.0
    theta: np.ndarray | None = None

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=float)
        lam = np.array(self.lam, dtype=float)
        n = u.shape[0]
        if u.ndim != 2 or u.shape != (n, n) or lam.shape != (n, n):
            raise ValueError("u and lam must be square matrices of equal size")
        if _orthogonality_defect(u) > 1e-10:
            raise ValueError("u must be orthogonal")
        if float(np.abs(lam - lam.T).max()) > 1e-12 * max(1.0, float(np.abs(lam).max(initial=0.0))):
            raise ValueError("lam must be symmetric")
        lam = np.triu(lam) + np.triu(lam, 1).T
        theta = (np.zeros(n) if self.theta is None
                 else np.array(self.theta, dtype=float))
        if theta.shape != (n,):
            raise ValueError("theta length must match the fragment dimension")
        for arr in (u, lam, theta):
            arr.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu2", float(self.mu2))
        object.__setattr__(self, "theta", theta)

    @property
    def n_orb(self) -> int:
        return self.u.shape[0]

    def shifted_lam(self) -> np.ndarray:
        th = self.theta
        return self.lam - self.mu2 - 0.5 * (th[:, None] + th[None, :])


@dataclass(frozen=True)
class OneBodySpectrum:
    """Eigen-decomposition of a one-body tensor with its median shift.

    ``gamma`` is ascending, ``v`` holds eigenvectors as rows (so the tensor
    is v.T @ diag(gamma) @ v), ``mu1`` is the canonical median of gamma and
    ``lambda_1e = sum_i |gamma_i - mu1|``.
    """

    gamma: np.ndarray
    v: np.ndarray
    mu1: float
    lambda_1e: float


@dataclass(frozen=True)
class LrpsCorrection:
    """Exact remainder of a median-shifted perfect-square fragment.

    The fragment identity reads

        H_frag = H_frag(phi) + S_1e - constant - K(mu2, xi)

    where ``one_body`` is the tensor of S_1e = sign * 2 phi n_elec * L(eps),
    ``constant`` = sign * phi^2 * n_elec^2, and (mu2, xi) parametrize the
    number-symmetry operator K with mu2 = sign * phi^2 and
    xi = -2 sign phi * L(eps).
    """

    one_body: np.ndarray
    constant: float
    mu2: float
    xi: np.ndarray


def factorize_two_body_tensor(g: np.ndarray, tol: float = 1e-8) -> list[DFFragment]:
    """Eigendecompose a two-body tensor into perfect-square fragments.

    Fragments are emitted in descending |eigenvalue| order; eigenvalues with
    magnitude at or below ``tol`` are dropped.

    Raises:
        ValueError: if a retained eigenvector fails to reshape into a
            symmetric matrix, which signals a tensor without the required
            index symmetry.
    """
    n = g.shape[0]
    flat = g.reshape(n * n, n * n)
    w, vecs = np.linalg.eigh(flat)
    order = sorted(range(w.size), key=lambda idx: (-abs(w[idx]), idx))
    # Noise-level eigenvalues live in the antisymmetric kernel; only vectors
    # carrying real weight are held to the symmetry check.
    gate = 1e-10 * max(1.0, float(np.abs(w).max(initial=0.0)))
    fragments: list[DFFragment] = []
    for idx in order:
        if abs(w[idx]) <= tol:
            continue
        mat = vecs[:, idx].reshape(n, n)
        asym = float(np.abs(mat - mat.T).max())
        if asym > EIGENVECTOR_SYMMETRY_TOL and abs(w[idx]) > gate:
            raise ValueError(
                f"reshaped eigenvector for eigenvalue {w[idx]:.6g} is not "
                f"symmetric (defect {asym:.3g}); two-body tensor symmetry "
                "is broken")
        mat = 0.5 * (mat + mat.T)
        d, p = np.linalg.eigh(mat)
        fragments.append(DFFragment(
            u=p.T, eps=np.sqrt(abs(w[idx])) * d, sign=1 if w[idx] >= 0 else -1))
    return fragments


def double_factorize(hamiltonian: MolecularHamiltonian,
                     tol: float = 1e-8) -> list[DFFragment]:
    """Double-factorize the two-electron tensor of ``hamiltonian``."""
    return factorize_two_body_tensor(hamiltonian.g, tol)


def reconstruct_two_body(fragments: list[DFFragment], n_orb: int,
                         shifted: bool = False) -> np.ndarray:
    """Sum of sign * L (x) L over fragments; inverse of the factorization."""
    g = np.zeros((n_orb,) * 4)
    for frag in fragments:
        mat = frag.coefficient_matrix(shifted=shifted)
        g += frag.sign * np.multiply.outer(mat, mat)
    return g


def fragment_hamiltonian(fragment: DFFragment, n_elec: int = 0,
                         traceless: bool = False) -> MolecularHamiltonian:
    """Integral form of one fragment, for exact-spectrum checks.

    With ``traceless=False`` this is the raw square sign * U+ l(eps')^2 U
    (eps' includes phi when present).  With ``traceless=True`` the square is
    re-centered, sign * U+ (l(eps') - sum_i eps'_i)^2 U, the operator whose
    full Fock-space spectral range equals 2 * :func:`lambda_df`.
    """
    eps = fragment.shifted_eps()
    mat = fragment.u.T @ np.diag(eps) @ fragment.u
    g = fragment.sign * np.multiply.outer(mat, mat)
    n = fragment.n_orb
    if traceless:
        center = float(eps.sum())
        h = -2.0 * center * fragment.sign * mat
        e_const = fragment.sign * center ** 2
    else:
        h = np.zeros((n, n))
        e_const = 0.0
    return MolecularHamiltonian(n_orb=n, e_const=e_const, h=h, g=g,
                                n_elec=n_elec)


def lambda_df(fragment: DFFragment) -> float:
    """Qubitization 1-norm (1/2)(sum_i |eps_i - phi|)^2 of one fragment."""
    return 0.5 * float(np.abs(fragment.shifted_eps()).sum()) ** 2


def lambda_csa(fragment: CsaFragment) -> float:
    """Reflection-LCU 1-norm of a full-rank fragment at its stored shift."""
    lam = fragment.shifted_lam()
    off = float(np.abs(lam).sum()) - float(np.abs(np.diag(lam)).sum())
    return off + 0.5 * float(np.abs(np.diag(lam)).sum())


def canonical_median(values: np.ndarray) -> float:
    """Median that is always an attained element: the lower of the two
    middle values for even counts, the middle value otherwise."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("median of an empty vector")
    return float(np.sort(values)[(values.size - 1) // 2])


def one_electron_shift(h_eff: np.ndarray) -> OneBodySpectrum:
    """Diagonalize a one-body tensor and apply the optimal scalar shift.

    The 1-norm sum_i |gamma_i - mu1| is minimized over mu1 exactly by any
    median of the eigenvalues; the canonical attained median is used.
    """
    h_eff = np.asarray(h_eff, dtype=float)
    gamma, vecs = np.linalg.eigh(h_eff)
    mu1 = canonical_median(gamma)
    return OneBodySpectrum(gamma=gamma, v=vecs.T, mu1=mu1,
                           lambda_1e=float(np.abs(gamma - mu1).sum()))


def lrps_shift(fragment: DFFragment) -> DFFragment:
    """Attach the optimal square-preserving shift phi = median(eps).

    The median minimizes (1/2)(sum_i |eps_i - phi|)^2 and, being attained,
    zeroes at least one shifted coefficient.

    Raises:
        ValueError: if the fragment is already shifted.
    """
    if fragment.phi is not None:
        raise ValueError("fragment already carries a shift")
    return replace(fragment, phi=canonical_median(fragment.eps))


def lrps_one_body_correction(fragment: DFFragment,
                             n_elec: int) -> LrpsCorrection:
    """Exact one-body, scalar and symmetry-shift remainders of a phi shift.

    Raises:
        ValueError: if the fragment has no phi.
    """
    if fragment.phi is None:
        raise ValueError("fragment has no shift; run lrps_shift first")
    mat = fragment.coefficient_matrix(shifted=False)
    phi, sign = fragment.phi, fragment.sign
    return LrpsCorrection(
        one_body=sign * 2.0 * phi * n_elec * mat,
        constant=sign * phi ** 2 * n_elec ** 2,
        mu2=sign * phi ** 2,
        xi=-2.0 * sign * phi * mat)


def lrbs_shift(fragment: CsaFragment,
               options: SolverOptions | None = None) -> CsaFragment:
    """Minimize lambda_csa over (mu2, theta) by linear programming.

    Raises:
        ValueError: if the fragment already carries a nonzero shift.
        IterationLimitError: if the LP backend exhausts its pivot budget.
    """
    if fragment.mu2 != 0.0 or float(np.abs(fragment.theta).max(initial=0.0)) != 0.0:
        raise ValueError("fragment already carries a shift")
    n = fragment.n_orb
    rows = []
    b = []
    weights = []
    for i in range(n):
        for j in range(n):
            if i == j:
                rows.append(((0, 1.0), (1 + i, 1.0)))
                weights.append(0.5)
            else:
                rows.append(tuple(sorted(((0, 1.0), (1 + i, 0.5), (1 + j, 0.5)))))
                weights.append(1.0)
            b.append(float(fragment.lam[i, j]))
    names = ("mu2",) + tuple(f"theta_{i}" for i in range(n))
    problem = merge_duplicate_rows(
        L1Problem(1 + n, tuple(rows), np.array(b), np.array(weights), names))
    solution = l1_minimize(problem, options)
    if solution.status is L1Status.ITERATION_LIMIT:
        raise IterationLimitError(
            f"fragment shift LP stopped after {solution.iterations} pivots")
    return replace(fragment, mu2=float(solution.x_opt[0]),
                   theta=solution.x_opt[1:].copy())


def to_csa_fragment(fragment: DFFragment) -> CsaFragment:
    """View a perfect-square fragment as a full-rank one, lam = sign*eps eps^T.

    Raises:
        ValueError: if the fragment carries a phi shift, which has no
            counterpart in the full-rank form.
    """
    if fragment.phi is not None:
        raise ValueError("cannot convert a phi-shifted fragment")
    return CsaFragment(u=fragment.u,
                       lam=fragment.sign * np.outer(fragment.eps, fragment.eps))


@dataclass(frozen=True)
class FragmentNorm:
    """Per-fragment entry of a fermionic norm report."""

    index: int
    one_norm: float
    kind: str
    phi: float | None = None
    mu2: float | None = None
    theta_max_abs: float | None = None


@dataclass(frozen=True)
class FermionicNormReport:
    """1-norm accounting of a fermionic LCU.

    ``lambda_total = lambda_one_body + lambda_fragments``.  For methods
    built from perfect squares, ``fragment_bound_sum`` equals the sum of
    per-fragment spectral lower bounds dE/2, which coincide with lambda_df;
    it is None when fragments are full rank.
    """

    method: str
    lambda_total: float
    lambda_one_body: float
    lambda_fragments: float
    mu1: float
    gamma: np.ndarray
    fragments: tuple[FragmentNorm, ...]
    fragment_bound_sum: float | None
    metadata: tuple[tuple[str, str], ...] = ()


def _one_body_reflection_correction(fragments: list[DFFragment], n_orb: int,
                                    shifted: bool) -> np.ndarray:
    """Tensor of sum_a 2 tr(L_a) sign_a L_a, the one-body remainder of
    writing each occupation-number square over reflections."""
    corr = np.zeros((n_orb, n_orb))
    for frag in fragments:
        mat = frag.coefficient_matrix(shifted=shifted)
        corr += 2.0 * frag.sign * np.trace(mat) * mat
    return corr


def _csa_reflection_correction(fragment: CsaFragment) -> np.ndarray:
    lam = fragment.shifted_lam()
    return fragment.u.T @ np.diag(2.0 * lam.sum(axis=1)) @ fragment.u


def build_fermionic_report(hamiltonian: MolecularHamiltonian, method: str,
                           df_tol: float = 1e-8,
                           lp_options: SolverOptions | None = None
                           ) -> FermionicNormReport:
    """Compute the fermionic LCU 1-norm for one of ``FERMIONIC_METHODS``.

    "df" is the unshifted baseline: fragments cost lambda_df(eps) and the
    one-body part, with the reflection corrections folded in, costs
    sum_i |gamma_i| so that the total upper-bounds half the spectral range
    of the input Hamiltonian.  "df-lrps" applies the median shift to every
    fragment and the scalar median shift to the corrected one-body part;
    "df-lrbs" does the same with the LP fragment shift.
    """
    if method not in FERMIONIC_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of "
                         f"{FERMIONIC_METHODS}")
    n = hamiltonian.n_orb
    n_elec = hamiltonian.n_elec
    fragments = double_factorize(hamiltonian, df_tol)
    metadata = (("one_body_convention",
                 "reflection corrections folded before diagonalization"),)

    if method == "df":
        h_eff = hamiltonian.h + _one_body_reflection_correction(fragments, n, False)
        gamma = np.linalg.eigh(h_eff)[0]
        mu1 = 0.0
        lambda_1e = float(np.abs(gamma).sum())
        norms = [lambda_df(f) for f in fragments]
        frag_rows = tuple(FragmentNorm(i, v, "df") for i, v in enumerate(norms))
        bound_sum = float(sum(norms))
    elif method == "df-lrps":
        shifted = [lrps_shift(f) for f in fragments]
        s_one_body = np.zeros((n, n))
        for frag in shifted:
            s_one_body += lrps_one_body_correction(frag, n_elec).one_body
        h_eff = (hamiltonian.h + s_one_body
                 + _one_body_reflection_correction(shifted, n, True))
        spectrum = one_electron_shift(h_eff)
        gamma, mu1, lambda_1e = spectrum.gamma, spectrum.mu1, spectrum.lambda_1e
        norms = [lambda_df(f) for f in shifted]
        frag_rows = tuple(FragmentNorm(i, v, "df", phi=f.phi)
                          for i, (v, f) in enumerate(zip(norms, shifted)))
        bound_sum = float(sum(norms))
    else:
        shifted_csa = [lrbs_shift(to_csa_fragment(f), lp_options)
                       for f in fragments]
        h_eff = hamiltonian.h.copy()
        for frag in shifted_csa:
            h_eff += n_elec * (frag.u.T @ np.diag(frag.theta) @ frag.u)
            h_eff += _csa_reflection_correction(frag)
        spectrum = one_electron_shift(h_eff)
        gamma, mu1, lambda_1e = spectrum.gamma, spectrum.mu1, spectrum.lambda_1e
        norms = [lambda_csa(f) for f in shifted_csa]
        frag_rows = tuple(
            FragmentNorm(i, v, "csa", mu2=f.mu2,
                         theta_max_abs=float(np.abs(f.theta).max(initial=0.0)))
            for i, (v, f) in enumerate(zip(norms, shifted_csa)))
        bound_sum = None

    lambda_frag = float(sum(norms))
    gamma = np.array(gamma)
    gamma.setflags(write=False)
    return FermionicNormReport(
        method=method,
        lambda_total=lambda_1e + lambda_frag,
        lambda_one_body=lambda_1e,
        lambda_fragments=lambda_frag,
        mu1=mu1,
        gamma=gamma,
        fragments=frag_rows,
        fragment_bound_sum=bound_sum,
        metadata=metadata)


def assemble_global_bliss(hamiltonian: MolecularHamiltonian, flavor: str,
                          df_tol: float = 1e-8,
                          lp_options: SolverOptions | None = None
                          ) -> BlissParams:
    """Aggregate per-fragment shifts into one global parameter triple.

    ``flavor="flr"`` uses the square-preserving median shifts: the shifted
    Hamiltonian H - K keeps every fragment a perfect square.  The fragment
    identity H_frag = H_frag(phi) + S_1e - const - K_frag places -K_frag on
    the original side, so the global parameters accumulate the negatives of
    the per-fragment (mu2, xi) contributions.

    ``flavor="ffr"`` uses the LP fragment shifts, which subtract K_frag
    directly; their (mu2, theta) contributions accumulate with sign as is.

    In both cases mu1 is the canonical median of the eigenvalues of the
    unmodified one-body tensor.
    """
    n = hamiltonian.n_orb
    fragments = double_factorize(hamiltonian, df_tol)
    mu1 = one_electron_shift(hamiltonian.h).mu1
    mu2 = 0.0
    xi = np.zeros((n, n))
    if flavor == "flr":
        for frag in fragments:
            corr = lrps_one_body_correction(lrps_shift(frag), hamiltonian.n_elec)
            mu2 -= corr.mu2
            xi -= corr.xi
    elif flavor == "ffr":
        for frag in fragments:
            shifted = lrbs_shift(to_csa_fragment(frag), lp_options)
            mu2 += shifted.mu2
            xi += shifted.u.T @ np.diag(shifted.theta) @ shifted.u
    else:
        raise ValueError(f"unknown flavor {flavor!r}; expected 'flr' or 'ffr'")
    xi = 0.5 * (xi + xi.T)
    return BlissParams(mu1, mu2, xi)
