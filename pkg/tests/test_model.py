import numpy as np
import pytest

from heomkit import (
    BathSpec,
    SystemHamiltonian,
    build_hamiltonian_matrix,
    hermiticity_defect,
    site_basis_state,
    spectral_density,
    validate_density_matrix,
)


class TestSystemHamiltonian:
    def test_two_level_matrix(self):
        h = SystemHamiltonian(energies=[0.0, 100.0], couplings=[100.0])
        assert np.array_equal(build_hamiltonian_matrix(h),
                              [[0.0, 100.0], [100.0, 100.0]])

    def test_zero_chain_is_zero_matrix(self):
        h = SystemHamiltonian(energies=[0.0, 0.0, 0.0], couplings=[0.0, 0.0])
        assert np.array_equal(build_hamiltonian_matrix(h), np.zeros((3, 3)))

    def test_four_level_is_tridiagonal(self):
        h = SystemHamiltonian(energies=[0.0, -100.0, 50.0, 100.0],
                              couplings=[30.0, -30.0, 100.0])
        m = build_hamiltonian_matrix(h)
        assert m[0, 2] == m[0, 3] == m[1, 3] == 0.0
        assert m[2, 0] == m[3, 0] == m[3, 1] == 0.0
        assert np.array_equal(np.diag(m), [0.0, -100.0, 50.0, 100.0])
        assert np.array_equal(np.diag(m, 1), [30.0, -30.0, 100.0])

    def test_matrix_is_exactly_symmetric(self):
        rng = np.random.default_rng(3)
        for n in (2, 3, 4, 6):
            h = SystemHamiltonian(
                energies=np.concatenate([[0.0], rng.uniform(-100, 100, n - 1)]),
                couplings=rng.uniform(-100, 100, n - 1))
            m = build_hamiltonian_matrix(h)
            assert np.array_equal(m, m.T)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            SystemHamiltonian(energies=[0.0, 1.0, 2.0], couplings=[1.0])

    def test_nonzero_reference_energy_rejected(self):
        with pytest.raises(ValueError):
            SystemHamiltonian(energies=[5.0, 1.0], couplings=[1.0])

    def test_labels_order(self):
        h = SystemHamiltonian(energies=[0.0, -7.0, 9.0], couplings=[1.0, -2.0])
        assert np.array_equal(h.labels(), [-7.0, 9.0, 1.0, -2.0])


class TestSpectralDensity:
    def test_peak_value_is_lambda(self):
        assert spectral_density(106.1767, 35.0, 106.1767) == pytest.approx(35.0)

    def test_zero_at_origin(self):
        assert spectral_density(0.0, 35.0, 106.1767) == 0.0

    def test_odd_function(self):
        assert spectral_density(-50.0, 35.0, 106.1767) == pytest.approx(
            -spectral_density(50.0, 35.0, 106.1767))

    def test_maximum_at_gamma_by_dense_scan(self):
        lam, gamma = 35.0, 106.1767
        omega = np.arange(0.0, 5.0 * gamma, 1e-2 * gamma)
        values = spectral_density(omega, lam, gamma)
        assert values.max() <= lam + 1e-12
        peak = omega[np.argmax(values)]
        assert abs(peak - gamma) <= 1e-2 * gamma

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(ValueError):
            spectral_density(1.0, 35.0, 0.0)


class TestBathSpec:
    def test_uniform_builder(self):
        bath = BathSpec.uniform(3, 35.0, 106.1767, 300.0)
        assert bath.n_sites == 3
        assert np.all(bath.lambdas == 35.0)
        assert np.all(bath.gammas == 106.1767)

    def test_requires_positive_entries(self):
        with pytest.raises(ValueError):
            BathSpec.uniform(2, 0.0, 106.1767, 300.0)
        with pytest.raises(ValueError):
            BathSpec.uniform(2, 35.0, -1.0, 300.0)
        with pytest.raises(ValueError):
            BathSpec.uniform(2, 35.0, 106.1767, 0.0)

    def test_high_temperature_ratio(self):
        bath = BathSpec.uniform(2, 35.0, 106.1767, 300.0)
        ratio = bath.high_temperature_ratio()
        assert ratio == pytest.approx(106.1767 / 208.51044, rel=1e-4)
        assert (ratio < 1.0).all()


class TestDensityMatrixChecks:
    def test_site_basis_state(self):
        rho = site_basis_state(3, 1)
        assert rho[1, 1] == 1.0
        assert np.trace(rho) == 1.0
        validate_density_matrix(rho)

    def test_site_out_of_range(self):
        with pytest.raises(ValueError):
            site_basis_state(2, 2)

    def test_hermiticity_defect(self):
        rho = np.array([[0.5, 0.1 + 0.2j], [0.1 - 0.2j, 0.5]])
        assert hermiticity_defect(rho) == 0.0
        rho[0, 1] += 1e-3
        assert hermiticity_defect(rho) == pytest.approx(1e-3)

    def test_validate_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            validate_density_matrix(np.eye(2, dtype=complex))

    def test_validate_rejects_non_hermitian(self):
        rho = np.array([[1.0, 1e-6], [0.0, 0.0]], dtype=complex)
        with pytest.raises(ValueError):
            validate_density_matrix(rho)
