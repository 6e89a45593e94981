"""
=============================================================================
UNIT TESTS FOR THE IDENTITY SUITE
=============================================================================

Tests for the exact scalar-product tables, resolutions of the identity,
the bra entry-order rule and the operator algebra checks.

HOW TO RUN:
    python -m pytest tests/test_identity_suite.py -v
"""

import pytest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.algebra import AlgebraDescriptor
from models.errors import AlgebraError
from models.metric import Metric
from services.identity_suite import IdentityCheck, IdentityReport, IdentitySuite, run_identity_suite
from services.scalar_products import gauge_metric, symplectic_metric


# =============================================================================
# TESTS FOR THE SUITE
# =============================================================================

class TestIdentitySuite:
    """Tests for IdentitySuite.run."""

    def test_single_pair_passes(self):
        """Every n = 1 identity holds to the exactness tolerance."""
        report = run_identity_suite(1)
        assert report.passed, report.failures
        assert report.max_deviation <= 1e-12

    def test_two_pairs_pass(self):
        """The n = 2 tables, resolutions, entry order and operator algebra hold."""
        report = run_identity_suite(2)
        assert report.passed, report.failures
        names = {check.name for check in report.checks}
        assert {'svh.n2.resolution(+)', 'svh.n2.resolution(-)', 'svh.n2.entry_order',
                'gauge.n2.entry_order', 'algebra.n2.anticommutators'} <= names

    def test_single_pair_covers_all_products(self):
        """n = 1 reports tables for SvH, gauge and symplectic."""
        names = [check.name for check in run_identity_suite(1).checks]
        for prefix in ('svh.single.table', 'gauge.single.table', 'svh.pair.table', 'gauge.pair.table',
                       'symplectic.pair.table', 'symplectic.pair.resolution', 'symplectic.n1.entry_order'):
            assert any(name.startswith(prefix) for name in names), prefix

    @pytest.mark.parametrize('n', [0, 3])
    def test_unsupported_sizes(self, n):
        """Only n = 1 and n = 2 are supported."""
        with pytest.raises(AlgebraError):
            IdentitySuite(n)

    def test_corrupted_metric_fails(self):
        """A doubled SvH metric breaks the SvH tables and nothing else."""
        corrupted = Metric(AlgebraDescriptor(1), 2 * np.eye(4), 'svh')
        report = run_identity_suite(1, overrides={'svh': corrupted})
        assert not report.passed
        assert any(name.startswith('svh.pair') for name in report.failures)
        assert all(name.startswith('svh.') for name in report.failures)

    def test_override_on_other_fiber_ignored(self):
        """An override for a different fiber leaves the suite untouched."""
        corrupted = Metric(AlgebraDescriptor(2), 2 * np.eye(16), 'svh')
        assert run_identity_suite(1, overrides={'svh': corrupted}).passed

    def test_symplectic_pair_rows_complete(self):
        """All eleven symplectic one-pair products are checked and hold."""
        checks = [c for c in run_identity_suite(1).checks if c.name.startswith('symplectic.pair.table')]
        names = {c.name for c in checks}
        assert len(names) == 11
        for signs in ('(--,--)', '(-+,++)', '(--,+-)', '(--,++)', '(--,-+)', '(+-,++)',
                      '(+-,-+)', '(+-,+-)', '(-+,-+)', '(++,++)'):
            assert f'symplectic.pair.table{signs}' in names
        assert all(c.passed for c in checks)

    def test_basis_tables(self):
        """The basis-ket products of each metric match their tables exactly."""
        report = run_identity_suite(1)
        checks = {c.name: c for c in report.checks if c.name.endswith('.pair.basis_table')}
        assert set(checks) == {'svh.pair.basis_table', 'gauge.pair.basis_table',
                               'symplectic.pair.basis_table'}
        assert all(c.deviation < 1e-12 for c in checks.values())

    def test_basis_table_catches_flipped_gauge(self):
        """Reversing the sign of the gauge metric fails its basis table."""
        algebra = AlgebraDescriptor(1)
        flipped = Metric(algebra, -gauge_metric(algebra).g, 'gauge')
        report = run_identity_suite(1, overrides={'gauge': flipped})
        assert 'gauge.pair.basis_table' in report.failures
        assert all(name.startswith('gauge.') for name in report.failures)

    def test_two_pairs_tables_and_resolutions(self):
        """At n = 2 the SvH tables and the gauge and symplectic resolutions hold."""
        report = run_identity_suite(2)
        checks = {c.name: c for c in report.checks}
        for name in ('svh.n2.table(----,----)', 'svh.n2.table(*++++,----)', 'svh.n2.table(*----,++++)',
                     'gauge.n2.resolution(++++)', 'symplectic.n2.resolution(++++)',
                     'symplectic.n2.resolution(----)'):
            assert checks[name].passed, name

    def test_general_checks_reduce_to_one_pair(self):
        """At n = 1 the n-pair tables and resolutions agree with the one-pair results."""
        suite = IdentitySuite(1)
        suite.svh_tables(1)
        suite.paired_resolutions(1)
        assert len(suite.report.checks) == 6
        assert suite.report.passed, suite.report.failures

    def test_corrupted_two_pair_symplectic_fails(self):
        """A negated n = 2 symplectic metric breaks both symplectic resolutions."""
        algebra = AlgebraDescriptor(2)
        negated = Metric(algebra, -symplectic_metric(algebra).g, 'symplectic')
        report = run_identity_suite(2, overrides={'symplectic': negated})
        assert {'symplectic.n2.resolution(++++)', 'symplectic.n2.resolution(----)'} <= set(report.failures)
        assert all(name.startswith('symplectic.') for name in report.failures)


class TestIdentityReport:
    """Tests for IdentityReport bookkeeping."""

    def test_report_summary(self):
        """to_dict lists failures and the largest deviation."""
        report = IdentityReport(1, [IdentityCheck('a', 0.0, True), IdentityCheck('b', 0.5, False)])
        summary = report.to_dict()
        assert summary['passed'] is False
        assert summary['failures'] == ['b']
        assert summary['max_deviation'] == 0.5
        assert len(summary['checks']) == 2

    def test_empty_report(self):
        """An empty report passes with zero deviation."""
        report = IdentityReport(2)
        assert report.passed
        assert report.max_deviation == 0.0
