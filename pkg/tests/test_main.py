"""
=============================================================================
UNIT TESTS FOR THE COMMAND-LINE PIPELINE
=============================================================================

End-to-end runs of each subcommand through main(), with console-only
logging and reports written under a temporary directory.

HOW TO RUN:
    python -m pytest tests/test_main.py -v
"""

import pytest
import sys
import os
import json

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from main import build_parser, main
from models.algebra import AlgebraDescriptor
from models.metric import Metric
from utils.exporters import dumps


def run(tmp_path, *args, name='report.json'):
    """Run main() and return (exit code, output path)."""
    out = str(tmp_path / name)
    code = main(list(args) + ['--log-dir', '', '--out', out])
    return code, out


def load(path):
    with open(path, encoding='utf-8') as f:
        return json.load(f)


# =============================================================================
# TESTS FOR SUBCOMMANDS
# =============================================================================

class TestSubcommands:
    """Every subcommand passes with its shipped defaults."""

    def test_identities(self, tmp_path):
        """The n = 1 identity suite passes."""
        code, out = run(tmp_path, 'identities')
        assert code == 0
        report = load(out)
        assert report['passed'] is True
        assert report['subcommand'] == 'identities'

    def test_kernel(self, tmp_path):
        """The kernel matches the SvH family."""
        code, out = run(tmp_path, 'kernel')
        assert code == 0
        report = load(out)
        assert report['dimension'] == 2
        assert report['matches_svh_family'] is True
        assert report['gauge_extension']['extension'] is True

    def test_canonical(self, tmp_path):
        """Scaling keeps the hermiticity residual consistent and the signature fixed."""
        code, out = run(tmp_path, 'canonical')
        assert code == 0
        report = load(out)
        assert report['invariance']['consistent'] is True
        assert report['signature_before'] == report['signature_after']

    def test_spectrum(self, tmp_path):
        """The ring spectrum matches ωk."""
        code, out = run(tmp_path, 'spectrum', '--n-theta', '16')
        assert code == 0
        assert load(out)['deviation'] < 1e-10

    def test_evolve(self, tmp_path):
        """A one-form follows the inverse-transpose monodromy."""
        code, out = run(tmp_path, 'evolve', '--t', '2')
        assert code == 0
        report = load(out)
        assert report['zero_form_drift'] < 1e-12
        assert report['norm_final'] > report['norm_initial']

    def test_lyapunov(self, tmp_path):
        """The inverted oscillator gives a finite positive exponent."""
        code, out = run(tmp_path, 'lyapunov', '--t', '4')
        assert code == 0
        report = load(out)
        assert report['estimate'] > 0
        assert report['ensemble'] is None

    def test_hermiticity(self, tmp_path):
        """SvH is positive definite and not Hermitian for H̃_ferm, so the run passes."""
        code, out = run(tmp_path, 'hermiticity', '--samples', '5')
        assert code == 0
        report = load(out)
        assert report['positive_definite'] is True
        assert report['hermitian'] is False

    def test_csv_output(self, tmp_path):
        """--format csv writes the frame."""
        code, out = run(tmp_path, 'spectrum', '--n-theta', '8', '--format', 'csv', name='spectrum.csv')
        assert code == 0
        with open(out, encoding='utf-8') as f:
            assert f.readline().strip() == 'expected,eigenvalue'


# =============================================================================
# TESTS FOR ERRORS AND DETERMINISM
# =============================================================================

class TestErrors:
    """Exit codes for bad input and failing checks."""

    @pytest.mark.parametrize('args', [['kernel', '--n', '5'], ['kernel', '--n', '2', '--metric', 'A'],
                                      ['identities', '--n', '3']])
    def test_bad_configuration(self, tmp_path, args):
        """Invalid configurations exit with 2."""
        code, out = run(tmp_path, *args)
        assert code == 2
        assert not os.path.exists(out)

    def test_bad_expression(self, tmp_path):
        """An unparsable potential exits with 2."""
        code, _ = run(tmp_path, 'evolve', '--potential', 'q^1.5', '--t', '0.1')
        assert code == 2

    def test_unknown_subcommand(self):
        """argparse rejects unknown subcommands."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(['integrate'])

    def test_corrupted_metric_file(self, tmp_path):
        """A doubled SvH metric makes the identity suite fail."""
        metric = Metric(AlgebraDescriptor(1), 2 * np.eye(4), 'svh')
        path = tmp_path / 'metric.json'
        path.write_text(dumps(metric.to_json()), encoding='utf-8')
        code, out = run(tmp_path, 'identities', '--metric-file', str(path))
        assert code == 1
        assert load(out)['passed'] is False

    def test_unreadable_metric_file(self, tmp_path):
        """A missing metric file exits with 2."""
        code, _ = run(tmp_path, 'kernel', '--metric-file', str(tmp_path / 'absent.json'))
        assert code == 2


class TestDeterminism:
    """Repeated runs with the same configuration."""

    def test_byte_identical_reports(self, tmp_path):
        """Two kernel runs with one seed write identical files."""
        first = run(tmp_path, 'kernel', '--seed', '7', name='a.json')[1]
        second = run(tmp_path, 'kernel', '--seed', '7', name='b.json')[1]
        with open(first, 'rb') as a, open(second, 'rb') as b:
            assert a.read() == b.read()
