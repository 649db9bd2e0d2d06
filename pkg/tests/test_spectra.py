import numpy as np
import pytest

from conftest import table1_at
from nv13c.spectra import (
    MeasuredPeak,
    assign_peaks,
    local_maxima,
    synthesize_spectrum,
)
from nv13c.transitions import TransitionRecord, enumerate_transitions


def make_record(nu, kappa, gamma=21.05, curvature=0.56, b=608.0, i=0, f=1):
    return TransitionRecord(
        b_gauss=b,
        level_i=i,
        level_f=f,
        nu_mhz=nu,
        tme=1.0,
        d_pop=0.01,
        d_sz2=0.01,
        kappa=kappa,
        gamma_eff_khz_per_g=gamma,
        curvature_khz_per_g2=curvature,
        manifold_i=0,
        manifold_f=0,
    )


AXIS = np.linspace(5.0, 80.0, 7501)


class TestSynthesizeSpectrum:
    def test_empty_records_all_zero(self):
        trace = synthesize_spectrum([], AXIS)
        assert np.all(trace.intensity == 0)

    def test_single_line_position_and_width(self):
        # feed the published 27.25 MHz line parameters straight in; the model
        # width for (21.05 kHz/G, 0.56 kHz/G^2) is 0.717 MHz
        rec = make_record(27.25, 7.54e-5)
        trace = synthesize_spectrum([rec], AXIS)
        peak = AXIS[np.argmax(trace.intensity)]
        assert abs(peak - 27.25) <= AXIS[1] - AXIS[0]
        half = trace.intensity.max() / 2
        above = AXIS[trace.intensity >= half]
        fwhm = above[-1] - above[0]
        assert abs(fwhm - 0.7167) < 2 * (AXIS[1] - AXIS[0])

    def test_linearity_for_separated_lines(self):
        a = make_record(20.0, 1e-5, i=0, f=1)
        b = make_record(60.0, 3e-5, i=0, f=2)
        combined = synthesize_spectrum([a, b], AXIS).intensity
        separate = synthesize_spectrum([a], AXIS).intensity + synthesize_spectrum([b], AXIS).intensity
        assert np.abs(combined - separate).max() < 1e-18

    def test_threshold_excludes_weak_lines(self):
        weak = make_record(40.0, 1e-8)
        trace = synthesize_spectrum([weak], AXIS, kappa_min=1e-6)
        assert np.all(trace.intensity == 0)

    def test_line_integral(self):
        rec = make_record(40.0, 5e-5)
        trace = synthesize_spectrum([rec], AXIS)
        y = trace.intensity
        integral = float(np.sum((y[:-1] + y[1:]) / 2) * (AXIS[1] - AXIS[0]))
        sigma = 0.7167 / (2 * np.sqrt(2 * np.log(2)))
        expected = rec.kappa * sigma * np.sqrt(2 * np.pi)
        assert abs(integral - expected) < 0.01 * expected

    def test_rejects_bad_axis(self):
        with pytest.raises(ValueError):
            synthesize_spectrum([], np.array([]))
        with pytest.raises(ValueError):
            synthesize_spectrum([], np.array([2.0, 1.0]))

    def test_608_spectrum_has_four_resolvable_maxima(self, nv3c):
        records = enumerate_transitions(nv3c, 608.0, kappa_min=1e-6)
        trace = synthesize_spectrum(records, np.linspace(10.0, 80.0, 7001))
        floor = trace.intensity.max() * 1e-4
        assert len(local_maxima(trace, floor=floor)) >= 4


class TestAssignPeaks:
    def test_exact_match_distance_zero(self):
        predicted = [make_record(30.0, 1e-5)]
        peaks = [MeasuredPeak(30.0, 1.0, 1.0)]
        out = assign_peaks(peaks, predicted)
        assert out[0].assigned
        assert out[0].distance_mhz == 0.0

    def test_higher_kappa_wins_at_equal_distance(self):
        strong = make_record(31.0, 1e-4, i=0, f=2)
        weak = make_record(29.0, 1e-6, i=0, f=1)
        out = assign_peaks([MeasuredPeak(30.0, 1.0, 1.0)], [weak, strong])
        assert (out[0].level_i, out[0].level_f) == (0, 2)

    def test_no_reuse_of_predictions(self):
        predicted = [make_record(30.0, 1e-4)]
        peaks = [MeasuredPeak(30.0, 1.0, 2.0), MeasuredPeak(30.5, 1.0, 1.0)]
        out = assign_peaks(peaks, predicted)
        assert out[0].assigned and not out[1].assigned

    def test_unmatched_peak_stays_unassigned(self):
        out = assign_peaks([MeasuredPeak(30.0, 1.0, 1.0)], [make_record(50.0, 1e-4)])
        assert not out[0].assigned

    def test_stable_under_prediction_permutation(self, nv3c):
        records = enumerate_transitions(nv3c, 608.0, kappa_min=1e-6, fmin_mhz=5, fmax_mhz=85)
        peaks = [MeasuredPeak(nu, dnu, kappa) for _, nu, dnu, _, _, kappa, _ in table1_at(608.0)]
        base = assign_peaks(peaks, records)
        rng = np.random.default_rng(4)
        for _ in range(3):
            shuffled = list(records)
            rng.shuffle(shuffled)
            again = assign_peaks(peaks, shuffled)
            assert [(a.level_i, a.level_f) for a in again] == [
                (a.level_i, a.level_f) for a in base
            ]

    def test_window_must_be_positive(self):
        with pytest.raises(ValueError):
            assign_peaks([], [], window_mhz=0.0)

    def test_table_peaks_at_608_all_assigned(self, nv3c):
        records = enumerate_transitions(nv3c, 608.0, kappa_min=1e-6)
        peaks = [MeasuredPeak(nu, dnu, kappa) for _, nu, dnu, _, _, kappa, _ in table1_at(608.0)]
        out = assign_peaks(peaks, records, window_mhz=5.0)
        assert all(a.assigned for a in out)
        assert all(a.distance_mhz <= 5.0 for a in out)
        # assignments go to protected intra-manifold transitions
        assigned = {(a.level_i, a.level_f) for a in out}
        by_pair = {(r.level_i, r.level_f): r for r in records}
        for pair in assigned:
            assert by_pair[pair].manifold_i == 0
            assert by_pair[pair].manifold_f == 0
