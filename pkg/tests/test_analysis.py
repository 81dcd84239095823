import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmimo.analysis import (
    StudyConfig,
    eigen_study,
    model_mses,
    normalized_mse,
    singular_spectrum,
    sweep_distance,
    sweep_elements,
    sweep_spacing,
)
from hmimo.assembly import Ordering, SystemChannel
from hmimo.channel import Model, QuadratureSpec
from hmimo.errors import ZeroReference

ORACLE = QuadratureSpec(nodes_per_axis=6)


def _wrap(matrix, m, n, model=Model.EXACT):
    return SystemChannel(
        matrix=matrix,
        ordering=Ordering.ELEMENT_MAJOR,
        m_elements=m,
        n_elements=n,
        model=model,
        frequency=30e9,
    )


class TestNormalizedMse:
    def test_identical_channels(self, rng):
        h = _wrap(rng.normal(size=(3, 6)) + 1j * rng.normal(size=(3, 6)), 1, 2)
        assert normalized_mse(h, h) == 0.0

    def test_scaled_channel(self, rng):
        matrix = rng.normal(size=(3, 6)) + 1j * rng.normal(size=(3, 6))
        h = _wrap(matrix, 1, 2)
        h2 = _wrap(2.0 * matrix, 1, 2, model=Model.CA1)
        assert normalized_mse(h2, h) == pytest.approx(1.0, rel=1e-12)

    def test_zero_reference_rejected(self):
        h = _wrap(np.ones((3, 3), dtype=complex), 1, 1)
        zero = _wrap(np.zeros((3, 3), dtype=complex), 1, 1)
        assert normalized_mse(zero, h) == pytest.approx(1.0)
        with pytest.raises(ZeroReference):
            normalized_mse(h, zero)

    def test_dimension_mismatch_rejected(self, rng):
        h = _wrap(np.ones((3, 3), dtype=complex), 1, 1)
        g = _wrap(np.ones((3, 6), dtype=complex), 1, 2)
        with pytest.raises(ValueError):
            normalized_mse(h, g)


class TestSingularSpectrum:
    def test_known_diagonal(self):
        matrix = np.zeros((3, 6), dtype=complex)
        matrix[0, 0], matrix[1, 1], matrix[2, 2] = 1.0, 0.5, 0.005
        spec = singular_spectrum(_wrap(matrix, 1, 2))
        np.testing.assert_allclose(spec.singular_values[:3], [1.0, 0.5, 0.005])
        assert spec.eigenmode_count == 2
        assert singular_spectrum(_wrap(matrix, 1, 2), threshold_ratio=1e-3).eigenmode_count == 3

    def test_values_sorted_descending(self, rng):
        matrix = rng.normal(size=(6, 9)) + 1j * rng.normal(size=(6, 9))
        spec = singular_spectrum(_wrap(matrix, 2, 3))
        assert np.all(np.diff(spec.singular_values) <= 0)
        assert np.all(spec.singular_values >= 0)

    @settings(deadline=None, max_examples=30)
    @given(
        st.integers(min_value=0, max_value=10**6),
        st.floats(min_value=0.01, max_value=100.0),
        st.floats(min_value=0.0, max_value=6.28),
    )
    def test_count_invariant_under_complex_scaling(self, seed, mag, phase):
        local = np.random.default_rng(seed)
        matrix = local.normal(size=(6, 6)) + 1j * local.normal(size=(6, 6))
        base = singular_spectrum(_wrap(matrix, 2, 2))
        scaled = singular_spectrum(_wrap(matrix * mag * np.exp(1j * phase), 2, 2))
        assert scaled.eigenmode_count == base.eigenmode_count

    def test_bad_threshold_rejected(self, rng):
        h = _wrap(np.ones((3, 3), dtype=complex), 1, 1)
        with pytest.raises(ValueError):
            singular_spectrum(h, threshold_ratio=0.0)


class TestModelMses:
    def test_ca1_beats_ca2_at_default_point(self, k30):
        cfg = StudyConfig(tx_count=(3, 3), rx_count=(2, 2), quadrature=ORACLE)
        lam = k30.wavelength
        mse1, mse2 = model_mses(cfg, 0.05 * lam, lam, 90.0)
        assert 0.0 < mse1 < mse2


class TestSweeps:
    def _cfg(self):
        return StudyConfig(tx_count=(3, 3), rx_count=(2, 2), quadrature=ORACLE)

    def test_sweep_spacing_structure(self, k30):
        lam = k30.wavelength
        cfg = StudyConfig(
            tx_count=(3, 3), rx_count=(2, 2), tilts_deg=(90.0,),
            distance=lam, quadrature=ORACLE,
        )
        values = [0.05 * lam, 0.2 * lam]
        result = sweep_spacing(cfg, values)
        assert result.sweep_variable == "spacing"
        assert len(result.points) == 2
        for point, value in zip(result.points, values):
            assert point.value == value
            assert point.converged
            assert 0.0 < point.mse_ca1 < point.mse_ca2
        assert result.points[0].mse_ca1 < result.points[1].mse_ca1

    def test_parallel_jobs_reproduce_serial(self, k30):
        lam = k30.wavelength
        serial = StudyConfig(
            tx_count=(2, 2), rx_count=(1, 1), tilts_deg=(60.0, 90.0),
            distance=lam, quadrature=ORACLE, jobs=1,
        )
        parallel = StudyConfig(
            tx_count=(2, 2), rx_count=(1, 1), tilts_deg=(60.0, 90.0),
            distance=lam, quadrature=ORACLE, jobs=4,
        )
        values = [0.05 * lam, 0.1 * lam]
        a = sweep_spacing(serial, values)
        b = sweep_spacing(parallel, values)
        for pa, pb in zip(a.points, b.points):
            assert (pa.value, pa.tilt_deg) == (pb.value, pb.tilt_deg)
            assert pa.mse_ca1 == pb.mse_ca1
            assert pa.mse_ca2 == pb.mse_ca2

    def test_sweep_distance_structure(self, k30):
        lam = k30.wavelength
        cfg = StudyConfig(
            tx_count=(2, 2), rx_count=(1, 1), tilts_deg=(90.0,),
            spacing=0.05 * lam, quadrature=ORACLE,
        )
        result = sweep_distance(cfg, [lam, 2 * lam])
        assert result.sweep_variable == "distance"
        assert all(p.converged for p in result.points)
        # the closed forms improve with distance
        assert result.points[1].mse_ca1 < result.points[0].mse_ca1

    def test_sweep_elements_structure(self, k30):
        lam = k30.wavelength
        cfg = StudyConfig(
            rx_count=(1, 1), tilts_deg=(90.0,),
            spacing=0.05 * lam, distance=lam, quadrature=ORACLE,
        )
        result = sweep_elements(cfg, [(2, 2), (3, 3)])
        assert result.sweep_variable == "elements"
        assert len(result.points) == 2
        assert all(p.converged for p in result.points)


class TestEigenStudy:
    def test_counts_and_ids(self, k30):
        lam = k30.wavelength
        cfg = StudyConfig(tilts_deg=(90.0,), quadrature=ORACLE)
        results = eigen_study(cfg, [((9, 9), (3, 3), 0.5 * lam)])
        assert len(results) == 3
        by_model = {r.model: r for r in results}
        assert set(by_model) == {Model.EXACT, Model.CA1, Model.CA2}
        for r in results:
            assert r.config_id == "tx9x9_rx3x3_d0.5lam"
            assert r.threshold_ratio == 0.01
        assert by_model[Model.CA1].eigenmode_count == by_model[Model.EXACT].eigenmode_count
