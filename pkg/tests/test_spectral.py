"""Tests for sector vectors, exact ranges and the truncated Lanczos."""

import numpy as np
import pytest

import oracles
from blisslp import (
    CIVector,
    Determinant,
    LanczosOptions,
    MolecularHamiltonian,
    apply_bliss,
    apply_hamiltonian,
    build_spectral_report,
    deviation_metric,
    one_body_eigenbasis,
    reference_determinant,
    sector_determinants,
    sector_matrix,
    spectral_range,
    truncated_lanczos,
)
from blisslp.spectral import sector_dimension


def sector_civector(rng, n_spin_orb, n_elec) -> CIVector:
    masks = sector_determinants(n_spin_orb, n_elec)
    amps = rng.normal(size=len(masks))
    return CIVector(entries=dict(zip(masks, amps)), n_elec=n_elec,
                    n_spin_orb=n_spin_orb)


def civector_to_dense(vec: CIVector) -> np.ndarray:
    masks = sector_determinants(vec.n_spin_orb, vec.n_elec)
    return np.array([vec.entries.get(m, 0.0) for m in masks])


def test_determinant_validation():
    det = Determinant(occupancy=0b1101, n_elec=3)
    assert det.spin_orbitals() == (0, 2, 3)
    with pytest.raises(ValueError, match="non-negative"):
        Determinant(occupancy=-1, n_elec=0)
    with pytest.raises(ValueError, match="set bits"):
        Determinant(occupancy=0b11, n_elec=1)
    assert Determinant(0b01, 1) < Determinant(0b10, 1)


def test_civector_validation_and_algebra():
    vec = CIVector(entries={0b0011: 3.0, 0b0101: 4.0}, n_elec=2, n_spin_orb=4)
    assert vec.norm() == pytest.approx(5.0)
    other = CIVector(entries={0b0011: 1.0}, n_elec=2, n_spin_orb=4)
    assert vec.dot(other) == pytest.approx(3.0)
    with pytest.raises(TypeError):
        vec.entries[0b0011] = 0.0
    with pytest.raises(ValueError, match="sector"):
        CIVector(entries={0b0111: 1.0}, n_elec=2, n_spin_orb=4)
    with pytest.raises(ValueError, match="spin-orbitals"):
        CIVector(entries={0b10000: 1.0}, n_elec=1, n_spin_orb=4)
    with pytest.raises(ValueError, match="finite"):
        CIVector(entries={0b0011: float("nan")}, n_elec=2, n_spin_orb=4)
    with pytest.raises(ValueError, match="sectors"):
        vec.dot(CIVector(entries={}, n_elec=1, n_spin_orb=4))


def test_sector_enumeration():
    masks = sector_determinants(4, 2)
    assert len(masks) == sector_dimension(4, 2) == 6
    assert masks == tuple(sorted(masks))
    assert all(m.bit_count() == 2 for m in masks)
    assert sector_determinants(4, 0) == (0,)
    with pytest.raises(ValueError):
        sector_determinants(4, 5)


def test_apply_diagonal_hamiltonian():
    """Diagonal h scales a determinant by e_const plus occupied energies."""
    h = np.diag([0.5, -2.0])
    H = MolecularHamiltonian(n_orb=2, e_const=1.0, h=h,
                             g=np.zeros((2,) * 4), n_elec=2)
    vec = CIVector(entries={0b0110: 2.0}, n_elec=2, n_spin_orb=4)
    out = apply_hamiltonian(H, vec)
    # Spin-orbitals 1 (orbital 0) and 2 (orbital 1) are occupied.
    want = (1.0 + 0.5 - 2.0) * 2.0
    assert set(out.entries) == {0b0110}
    assert out.entries[0b0110] == pytest.approx(want, abs=1e-12)


def test_apply_zero_vector():
    rng = np.random.default_rng(61)
    H = oracles.random_hamiltonian(rng, 2, 2)
    out = apply_hamiltonian(H, CIVector(entries={}, n_elec=2, n_spin_orb=4))
    assert dict(out.entries) == {}


@pytest.mark.parametrize("n_elec", [0, 1, 2, 3, 4])
def test_apply_matches_dense_oracle(n_elec):
    rng = np.random.default_rng(1800 + n_elec)
    H = oracles.random_hamiltonian(rng, 2, n_elec)
    vec = sector_civector(rng, 4, n_elec)
    got = civector_to_dense(apply_hamiltonian(H, vec))
    fock = oracles.fock_matrix(H)
    idx = oracles.sector_indices(4, n_elec)
    want = fock[np.ix_(idx, idx)] @ civector_to_dense(vec)
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_apply_sector_mismatch_error():
    rng = np.random.default_rng(62)
    H = oracles.random_hamiltonian(rng, 2, 2)
    with pytest.raises(ValueError, match="differ"):
        apply_hamiltonian(H, CIVector(entries={0b11: 1.0}, n_elec=2,
                                      n_spin_orb=6))


def test_apply_linearity_and_hermiticity():
    rng = np.random.default_rng(63)
    H = oracles.random_hamiltonian(rng, 3, 3)
    u = sector_civector(rng, 6, 3)
    v = sector_civector(rng, 6, 3)
    hv = apply_hamiltonian(H, v)
    hu = apply_hamiltonian(H, u)
    assert u.dot(hv) == pytest.approx(hu.dot(v), abs=1e-10)
    combo = CIVector(
        entries={occ: 2.0 * u.entries.get(occ, 0.0) - 3.0 * v.entries.get(occ, 0.0)
                 for occ in set(u.entries) | set(v.entries)},
        n_elec=3, n_spin_orb=6)
    h_combo = apply_hamiltonian(H, combo)
    np.testing.assert_allclose(
        civector_to_dense(h_combo),
        2.0 * civector_to_dense(hu) - 3.0 * civector_to_dense(hv), atol=1e-10)


def test_sector_matrix_basis_order():
    rng = np.random.default_rng(64)
    H = oracles.random_hamiltonian(rng, 2, 2)
    mat, basis = sector_matrix(H, 2)
    assert basis == sector_determinants(4, 2)
    np.testing.assert_allclose(mat, mat.T, atol=1e-12)
    idx = oracles.sector_indices(4, 2)
    want = oracles.fock_matrix(H)[np.ix_(idx, idx)]
    np.testing.assert_allclose(mat, want, atol=1e-10)


def test_one_body_eigenbasis_preserves_spectrum():
    rng = np.random.default_rng(65)
    H = oracles.random_hamiltonian(rng, 2, 2)
    rotated = one_body_eigenbasis(H)
    np.testing.assert_allclose(rotated.h, np.diag(np.diag(rotated.h)),
                               atol=1e-10)
    assert np.all(np.diff(np.diag(rotated.h)) >= -1e-12)
    ev_a = np.linalg.eigvalsh(oracles.fock_matrix(H))
    ev_b = np.linalg.eigvalsh(oracles.fock_matrix(rotated))
    np.testing.assert_allclose(ev_a, ev_b, atol=1e-10)


def test_reference_determinant_examples():
    H = MolecularHamiltonian(n_orb=2, e_const=0.0, h=np.diag([-1.0, 5.0]),
                             g=np.zeros((2,) * 4), n_elec=2)
    assert reference_determinant(H, 2, "lowest").occupancy == 0b0011
    assert reference_determinant(H, 2, "highest").occupancy == 0b1100
    flat = MolecularHamiltonian(n_orb=2, e_const=0.0, h=0.7 * np.eye(2),
                                g=np.zeros((2,) * 4), n_elec=2)
    assert reference_determinant(flat, 2, "lowest").occupancy == 0b0011
    assert reference_determinant(H, 3, "lowest").occupancy == 0b0111
    with pytest.raises(ValueError, match="extreme"):
        reference_determinant(H, 2, "middle")
    with pytest.raises(ValueError):
        reference_determinant(H, 5)


def test_lanczos_options_validation():
    with pytest.raises(ValueError):
        LanczosOptions(max_iters=0)
    with pytest.raises(ValueError):
        LanczosOptions(residual_tol=0.0)


def test_lanczos_exact_on_two_dim_sector():
    rng = np.random.default_rng(66)
    H = oracles.random_hamiltonian(rng, 1, 1)
    values = np.linalg.eigvalsh(sector_matrix(H, 1)[0])
    low = truncated_lanczos(H, 1, "lowest")
    high = truncated_lanczos(H, 1, "highest")
    assert low.converged and high.converged
    assert low.energy == pytest.approx(values[0], abs=1e-9)
    assert high.energy == pytest.approx(values[-1], abs=1e-9)


def test_lanczos_converges_immediately_on_eigenvector():
    """Number-diagonal H makes the start determinant an eigenvector."""
    d = np.array([[0.4, 0.1], [0.1, -0.3]])
    g = np.zeros((2,) * 4)
    for i in range(2):
        for k in range(2):
            g[i, i, k, k] = d[i, k]
    H = MolecularHamiltonian(n_orb=2, e_const=0.0, h=np.diag([1.0, 2.0]),
                             g=g, n_elec=2)
    result = truncated_lanczos(H, 2, "lowest")
    assert result.converged
    assert result.iterations == 1
    assert result.subspace_dim == 1


@pytest.mark.parametrize("seed", range(4))
def test_lanczos_variational_and_accurate(seed):
    rng = np.random.default_rng(1900 + seed)
    H = oracles.random_hamiltonian(rng, 3, 3)
    values = np.linalg.eigvalsh(sector_matrix(H, 3)[0])
    spread = values[-1] - values[0]
    low = truncated_lanczos(H, 3, "lowest")
    high = truncated_lanczos(H, 3, "highest")
    assert low.energy >= values[0] - 1e-12
    assert high.energy <= values[-1] + 1e-12
    assert abs(low.energy - values[0]) < 0.05 * spread
    assert abs(high.energy - values[-1]) < 0.05 * spread


def test_lanczos_iteration_cap_flags_unconverged():
    rng = np.random.default_rng(67)
    H = oracles.random_hamiltonian(rng, 3, 3)
    result = truncated_lanczos(H, 3, "lowest",
                               LanczosOptions(max_iters=2, residual_tol=1e-12))
    assert not result.converged
    assert result.iterations == 2
    exact_min = np.linalg.eigvalsh(sector_matrix(H, 3)[0])[0]
    assert result.energy >= exact_min - 1e-12


def test_spectral_range_constant_hamiltonian():
    H = MolecularHamiltonian(n_orb=2, e_const=3.0, h=np.zeros((2, 2)),
                             g=np.zeros((2,) * 4), n_elec=2)
    result = spectral_range(H)
    assert result.delta == pytest.approx(0.0, abs=1e-12)
    assert len(result.sector_extremes) == 5


def test_spectral_range_full_vs_sector():
    rng = np.random.default_rng(68)
    H = oracles.random_hamiltonian(rng, 2, 2)
    full = spectral_range(H)
    ens = spectral_range(H, sector=2)
    assert len(ens.sector_extremes) == 1
    assert full.delta >= ens.delta - 1e-12
    evals = np.linalg.eigvalsh(oracles.fock_matrix(H))
    assert full.e_min == pytest.approx(evals[0], abs=1e-10)
    assert full.e_max == pytest.approx(evals[-1], abs=1e-10)


def test_spectral_range_method_validation():
    rng = np.random.default_rng(69)
    H = oracles.random_hamiltonian(rng, 2, 2)
    with pytest.raises(ValueError, match="method"):
        spectral_range(H, method="dense")
    big = MolecularHamiltonian(n_orb=8, e_const=0.0, h=np.zeros((8, 8)),
                               g=np.zeros((8,) * 4), n_elec=8)
    with pytest.raises(ValueError, match="capped"):
        spectral_range(big, method="exact")


def test_lanczos_range_never_exceeds_exact():
    rng = np.random.default_rng(70)
    H = oracles.random_hamiltonian(rng, 3, 3)
    values = np.linalg.eigvalsh(sector_matrix(H, 3)[0])
    low = truncated_lanczos(H, 3, "lowest")
    high = truncated_lanczos(H, 3, "highest")
    assert high.energy - low.energy <= values[-1] - values[0] + 1e-12


@pytest.mark.parametrize("de, de_shifted, de_ens, want", [
    (4.0, 2.0, 2.0, 0.0),
    (4.0, 4.0, 2.0, 1.0),
    (4.0, 3.0, 2.0, 0.5),
])
def test_deviation_metric_values(de, de_shifted, de_ens, want):
    assert deviation_metric(de, de_shifted, de_ens) == pytest.approx(want)


def test_deviation_metric_undefined():
    assert deviation_metric(2.0, 1.5, 2.0) is None
    assert deviation_metric(1.0, 1.0, 3.0) is None


def test_spectral_report_without_shift():
    rng = np.random.default_rng(71)
    H = oracles.random_hamiltonian(rng, 2, 2)
    report = build_spectral_report(H)
    assert report.delta_e_shifted is None
    assert report.deviation is None
    assert report.method == "exact"
    assert report.converged
    assert report.delta_e >= report.delta_e_ens - 1e-12


def test_spectral_report_with_shift_and_sector_invariance():
    rng = np.random.default_rng(72)
    H = oracles.random_hamiltonian(rng, 2, 2)
    shifted = apply_bliss(H, oracles.random_bliss(rng, 2))
    report = build_spectral_report(H, shifted)
    assert report.delta_e_shifted is not None
    want = deviation_metric(report.delta_e, report.delta_e_shifted,
                            report.delta_e_ens)
    assert report.deviation == pytest.approx(want)
    ens_h = spectral_range(H, sector=2)
    ens_s = spectral_range(shifted, sector=2)
    assert ens_h.e_min == pytest.approx(ens_s.e_min, abs=1e-9)
    assert ens_h.e_max == pytest.approx(ens_s.e_max, abs=1e-9)
