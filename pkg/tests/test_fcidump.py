"""Tests for FCIDUMP parsing and emission."""

import numpy as np
import pytest

import oracles
from blisslp import FcidumpError, MolecularHamiltonian, parse_fcidump, write_fcidump

HEADER_N1 = " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n"


def test_parse_one_orbital_example():
    """t=-1.0, (00|00)=0.5 fold to h=-1.25, g=0.25 under the half/exchange
    convention."""
    text = HEADER_N1 + "0.5 1 1 1 1\n-1.0 1 1 0 0\n0.1 0 0 0 0\n"
    H = parse_fcidump(text)
    assert H.n_orb == 1
    assert H.n_elec == 2
    assert H.e_const == pytest.approx(0.1)
    assert H.g[0, 0, 0, 0] == pytest.approx(0.25)
    assert H.h[0, 0] == pytest.approx(-1.25)


def test_parse_fock_operator_matches_physical_hamiltonian():
    """e + sum h F + sum g FF equals e + t a+a + (1/2)(00|00) a+a+aa."""
    text = HEADER_N1 + "0.5 1 1 1 1\n-1.0 1 1 0 0\n0.1 0 0 0 0\n"
    H = parse_fcidump(text)
    ams = oracles.annihilation_matrices(2)
    num = sum(a.T @ a for a in ams)
    physical = (0.1 * np.eye(4) - 1.0 * num
                + 0.25 * sum(ams[p].T @ ams[q].T @ ams[q] @ ams[p]
                             for p in range(2) for q in range(2)))
    np.testing.assert_allclose(oracles.fock_matrix(H), physical, atol=1e-12)


def test_parse_empty_body_is_zero_hamiltonian():
    H = parse_fcidump(" &FCI NORB=2,NELEC=2,\n &END\n")
    assert H.e_const == 0.0
    assert np.all(H.h == 0.0)
    assert np.all(H.g == 0.0)


def test_parse_expands_eightfold_orbit():
    text = " &FCI NORB=2,NELEC=2,\n &END\n0.8 1 2 1 1\n"
    H = parse_fcidump(text)
    val = 0.4
    for idx in [(0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)]:
        assert H.g[idx] == pytest.approx(val)
    assert np.count_nonzero(H.g) == 4


@pytest.mark.parametrize("terminator", ["&END", "/"])
def test_parse_header_terminators(terminator):
    text = f" &FCI NORB=1,NELEC=1\n {terminator}\n0.5 1 1 1 1\n"
    assert parse_fcidump(text).g[0, 0, 0, 0] == pytest.approx(0.25)


def test_parse_orbsym_run_length_and_metadata():
    text = " &FCI NORB=3,NELEC=2,MS2=1,\n  ORBSYM=2*1,3,\n  ISYM=4,\n &END\n"
    H = parse_fcidump(text)
    assert H.orbsym == (1, 1, 3)
    assert H.isym == 4
    assert H.ms2 == 1


def test_parse_fortran_d_exponent():
    text = HEADER_N1 + "5.0D-1 1 1 1 1\n"
    assert parse_fcidump(text).g[0, 0, 0, 0] == pytest.approx(0.25)


def test_parse_bytes_input():
    text = (HEADER_N1 + "0.5 1 1 1 1\n").encode("utf-8")
    assert parse_fcidump(text).g[0, 0, 0, 0] == pytest.approx(0.25)


def test_parse_duplicate_consistent_last_wins():
    text = HEADER_N1 + "0.5 1 1 1 1\n0.5 1 1 1 1\n"
    assert parse_fcidump(text).g[0, 0, 0, 0] == pytest.approx(0.25)


def test_parse_duplicate_conflicting_reports_both_values():
    text = HEADER_N1 + "0.5 1 1 1 1\n0.7 1 1 1 1\n"
    with pytest.raises(FcidumpError) as err:
        parse_fcidump(text)
    assert "0.5" in str(err.value)
    assert "0.7" in str(err.value)


@pytest.mark.parametrize("body, lineno", [
    ("0.5 1 1 1 1\nnope 1 1 1 1\n", 4),
    ("0.5 1 1 2 1\n", 3),
    ("0.5 1 1 1\n", 3),
    ("0.5 1 0 0 0\n", 3),
    ("0.5 1 0 1 1\n", 3),
])
def test_parse_errors_carry_line_numbers(body, lineno):
    with pytest.raises(FcidumpError) as err:
        parse_fcidump(HEADER_N1 + body)
    assert err.value.line == lineno
    assert f"line {lineno}" in str(err.value)


def test_parse_missing_header_fields():
    with pytest.raises(FcidumpError):
        parse_fcidump(" &FCI NELEC=2,\n &END\n")
    with pytest.raises(FcidumpError):
        parse_fcidump(" &FCI NORB=2,\n &END\n")
    with pytest.raises(FcidumpError):
        parse_fcidump("   \n\n")


def test_write_zero_hamiltonian_core_line_only():
    H = MolecularHamiltonian(n_orb=2, e_const=0.0, h=np.zeros((2, 2)),
                             g=np.zeros((2, 2, 2, 2)), n_elec=2)
    body = [ln for ln in write_fcidump(H).splitlines()
            if ln.strip() and not ln.lstrip().startswith("&")
            and "NORB" not in ln]
    assert len(body) == 1
    assert body[0].split()[1:] == ["0", "0", "0", "0"]


def test_write_single_canonical_line_per_orbit():
    g = np.zeros((2, 2, 2, 2))
    for idx in [(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)]:
        g[idx] = 0.3
    H = MolecularHamiltonian(n_orb=2, e_const=0.0, h=np.zeros((2, 2)),
                             g=g, n_elec=2)
    two_body = [ln for ln in write_fcidump(H).splitlines()
                if len(ln.split()) == 5 and "0" not in ln.split()[1:]]
    assert len(two_body) == 1
    assert two_body[0].split()[1:] == ["2", "1", "2", "1"]


def test_roundtrip_first_parse_example():
    text = HEADER_N1 + "0.5 1 1 1 1\n-1.0 1 1 0 0\n0.1 0 0 0 0\n"
    H = parse_fcidump(text)
    H2 = parse_fcidump(write_fcidump(H))
    np.testing.assert_allclose(H2.h, H.h, atol=1e-12)
    np.testing.assert_allclose(H2.g, H.g, atol=1e-12)
    assert H2.e_const == pytest.approx(H.e_const, abs=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_roundtrip_random(seed):
    rng = np.random.default_rng(200 + seed)
    n = int(rng.integers(1, 5))
    H = oracles.random_hamiltonian(rng, n, int(rng.integers(0, 2 * n + 1)))
    H2 = parse_fcidump(write_fcidump(H))
    assert H2.n_orb == H.n_orb
    assert H2.n_elec == H.n_elec
    assert H2.ms2 == H.ms2
    np.testing.assert_allclose(H2.h, H.h, atol=1e-12)
    np.testing.assert_allclose(H2.g, H.g, atol=1e-12)
    assert H2.e_const == pytest.approx(H.e_const, abs=1e-12)


def test_roundtrip_preserves_symmetry_metadata():
    H = MolecularHamiltonian(n_orb=2, e_const=1.0, h=np.eye(2),
                             g=np.zeros((2, 2, 2, 2)), n_elec=2,
                             ms2=2, orbsym=(1, 2), isym=3)
    H2 = parse_fcidump(write_fcidump(H))
    assert H2.orbsym == (1, 2)
    assert H2.isym == 3
    assert H2.ms2 == 2
