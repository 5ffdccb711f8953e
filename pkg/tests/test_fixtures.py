import numpy as np
import pytest

from harvestkit.exceptions import ValidationError
from harvestkit.fixtures import (
    FIXTURE_POINTS,
    TABLE_NAME,
    FixturePoint,
    fixture_hash,
    freeze_fixtures,
    load_fixtures,
    oracle_value,
    provenance_hash,
    time_domain_integrand,
)
from harvestkit.models import DimensionlessPoint
from harvestkit.response import element_integrand, g2
from harvestkit.settings import PACKAGE_DIR
from harvestkit.validation import (
    ValidationReport,
    check_causal_boundary,
    check_fixtures,
    check_partial_transpose,
    check_quadratures,
    check_time_integrals,
    run_validation,
)

COMMITTED = str(PACKAGE_DIR / 'fixtures')


class TestProvenance:
    def test_stable(self):
        assert provenance_hash(FIXTURE_POINTS) == provenance_hash(list(FIXTURE_POINTS))

    def test_sensitive_to_parameters(self):
        changed = list(FIXTURE_POINTS)
        changed[0] = FixturePoint('g1_a1_w1', 'g1', a=1.0, b=1.5)
        assert provenance_hash(changed) != provenance_hash(FIXTURE_POINTS)

    def test_unfrozen_directory(self, tmp_path):
        assert fixture_hash(str(tmp_path)) == 'unfrozen'
        assert load_fixtures(str(tmp_path)) == {}

    def test_oracle_names(self):
        assert FixturePoint('x', 'g2', a=1.0, b=1.0).oracle.startswith('double_time')
        assert FixturePoint('x', 'M', a=1.0, b=2.0).oracle.startswith(
            'radial_trapezoid'
        )

    def test_g2_oracle_value(self):
        value = oracle_value(FixturePoint('g2', 'g2', a=1.0, b=1.0))
        assert abs(value - g2(1.0, 1.0)) <= 1e-6


@pytest.mark.slow
class TestFreeze:
    def test_freeze_and_load(self, tmp_path):
        target = freeze_fixtures(str(tmp_path))
        assert target.name == TABLE_NAME
        text = target.read_text(encoding='utf-8')
        assert text.startswith('# harvestkit fixture table\n')
        assert '\r' not in text
        records = load_fixtures(str(tmp_path))
        assert set(records) == {entry.name for entry in FIXTURE_POINTS}
        assert fixture_hash(str(tmp_path)) == provenance_hash(FIXTURE_POINTS)
        assert records['L_a1_s0125'].value.real > 0
        assert records['L_a1_s0125'].value.imag == 0.0

    def test_live_values_match_frozen(self, tmp_path):
        freeze_fixtures(str(tmp_path))
        report = ValidationReport()
        check_fixtures(report, str(tmp_path))
        assert report.passed, report.to_text()
        assert len(report.checks) == len(FIXTURE_POINTS)

    def test_tampered_provenance(self, tmp_path):
        target = freeze_fixtures(str(tmp_path))
        lines = target.read_text(encoding='utf-8').splitlines(keepends=True)
        lines = [
            '# provenance: deadbeef\n' if line.startswith('# provenance') else line
            for line in lines
        ]
        target.write_text(''.join(lines), encoding='utf-8')
        with pytest.raises(ValidationError):
            load_fixtures(str(tmp_path))


class TestValidationChecks:
    def test_partial_transpose(self):
        report = ValidationReport()
        check_partial_transpose(report)
        assert report.passed, report.to_text()

    def test_quadratures(self):
        report = ValidationReport()
        check_quadratures(report)
        assert report.passed, report.to_text()

    def test_causal_boundary(self):
        report = ValidationReport()
        check_causal_boundary(report)
        assert report.passed

    def test_time_integrals(self):
        report = ValidationReport()
        check_time_integrals(report)
        assert report.passed, report.to_text()

    def test_failure_reported(self):
        report = ValidationReport()
        report.add('broken', float('nan'), 1.0)
        report.add('fine', 0.5, 1.0)
        assert not report.passed
        assert [check.name for check in report.failures] == ['broken']
        assert 'FAIL' in report.to_text()

    @pytest.mark.slow
    def test_run_validation_unfrozen(self, tmp_path):
        report = run_validation(str(tmp_path))
        assert report.passed, report.to_text()
        assert any('skipped' in check.note for check in report.checks)
        assert np.isfinite([check.residual for check in report.checks]).all()


class TestCommittedTable:
    def test_table_matches_current_definitions(self):
        records = load_fixtures(COMMITTED)
        assert set(records) == {entry.name for entry in FIXTURE_POINTS}
        assert fixture_hash(COMMITTED) == provenance_hash(FIXTURE_POINTS)

    def test_live_values_match_committed(self):
        report = ValidationReport()
        check_fixtures(report, COMMITTED)
        assert report.passed, report.to_text()
        assert len(report.checks) == len(FIXTURE_POINTS)

    def test_dispersion_negligible_at_rubidium(self):
        records = load_fixtures(COMMITTED)
        dispersive = records['N_rubidium_bogoliubov'].value.real
        linear = records['N_rubidium_linear'].value.real
        assert linear > 0
        assert abs(dispersive - linear) / linear <= 1e-2

    def test_harvesting_entries_are_consistent(self):
        records = load_fixtures(COMMITTED)
        L = records['L_a1_s0125'].value.real
        assert 0 < records['Lab_a1_b2'].value.real < L
        assert abs(records['M_a1_b2'].value) < abs(records['M_a1_b0'].value)

    def test_time_domain_integrand_tracks_closed_form(self):
        point = DimensionlessPoint(a=1.0, b=2.0, s=0.125)
        u = np.linspace(0.0, 10.0, 41)
        np.testing.assert_allclose(
            time_domain_integrand(point)(u), element_integrand(point)(u),
            rtol=1e-7, atol=1e-12,
        )

    @pytest.mark.slow
    def test_freeze_reproduces_committed(self, tmp_path):
        committed = load_fixtures(COMMITTED)
        freeze_fixtures(str(tmp_path))
        fresh = load_fixtures(str(tmp_path))
        for name, record in committed.items():
            scale = max(abs(record.value), 1e-12)
            assert abs(fresh[name].value - record.value) / scale <= 1e-9, name
