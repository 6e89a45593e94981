"""
=============================================================================
UNIT TESTS FOR INPUT VALIDATION
=============================================================================

HOW TO RUN:
    python -m pytest tests/test_validators.py -v
"""

import pytest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.algebra import AlgebraDescriptor
from models.metric import Metric
from models.run_config import RunConfig
from services.scalar_products import gauge_metric, symplectic_metric
from services.validators import InputValidator


@pytest.fixture
def validator():
    return InputValidator()


# =============================================================================
# TESTS FOR validate_hessian()
# =============================================================================

class TestValidateHessian:
    """Tests for InputValidator.validate_hessian."""

    def test_valid(self, validator):
        """A symmetric 2x2 matrix is a valid n = 1 Hessian."""
        is_valid, errors = validator.validate_hessian([[1.0, 0.5], [0.5, 2.0]], 1)
        assert is_valid
        assert errors == []

    def test_wrong_shape(self, validator):
        """A 2x2 matrix is not an n = 2 Hessian."""
        is_valid, errors = validator.validate_hessian(np.eye(2), 2)
        assert not is_valid
        assert 'must be 4x4' in errors[0]

    def test_non_finite(self, validator):
        """NaN entries are rejected."""
        is_valid, errors = validator.validate_hessian([[np.nan, 0.0], [0.0, 1.0]], 1)
        assert not is_valid
        assert 'non-finite' in errors[0]

    def test_asymmetric(self, validator):
        """An asymmetric matrix is rejected."""
        is_valid, errors = validator.validate_hessian([[1.0, 2.0], [0.0, 1.0]], 1)
        assert not is_valid
        assert 'not symmetric' in errors[0]

    def test_not_numeric(self, validator):
        """Text is not a Hessian."""
        is_valid, errors = validator.validate_hessian([['a', 'b'], ['c', 'd']], 1)
        assert not is_valid


# =============================================================================
# TESTS FOR validate_metric()
# =============================================================================

class TestValidateMetric:
    """Tests for InputValidator.validate_metric."""

    @pytest.mark.parametrize('builder', [gauge_metric, symplectic_metric])
    def test_named_metrics_valid(self, validator, builder):
        """The named products pass."""
        is_valid, errors = validator.validate_metric(builder(AlgebraDescriptor(1)))
        assert is_valid, errors

    def test_not_conjugate_symmetric(self, validator):
        """g ≠ gᴴ is rejected."""
        g = np.eye(4, dtype=complex)
        g[0, 3] = 1.0
        is_valid, errors = validator.validate_metric(Metric(AlgebraDescriptor(1), g))
        assert not is_valid
        assert 'conjugate-symmetric' in errors[0]

    def test_singular(self, validator):
        """A singular metric is rejected."""
        is_valid, errors = validator.validate_metric(Metric(AlgebraDescriptor(1), np.diag([1.0, 1.0, 1.0, 0.0])))
        assert not is_valid
        assert any('singular' in e for e in errors)


# =============================================================================
# TESTS FOR validate_run_config()
# =============================================================================

class TestValidateRunConfig:
    """Tests for InputValidator.validate_run_config."""

    @pytest.mark.parametrize('subcommand', ['identities', 'hermiticity', 'nogo-scan', 'kernel', 'evolve',
                                            'lyapunov', 'canonical', 'spectrum'])
    def test_defaults_valid(self, validator, subcommand):
        """The shipped defaults validate for every subcommand."""
        is_valid, errors = validator.validate_run_config(RunConfig.resolve(subcommand).to_dict())
        assert is_valid, errors

    def test_n_out_of_range(self, validator):
        """n = 5 is rejected."""
        config = RunConfig.resolve('kernel', {'n': 5}).to_dict()
        is_valid, errors = validator.validate_run_config(config)
        assert not is_valid
        assert any('n must be' in e for e in errors)

    def test_family_needs_one_pair(self, validator):
        """Families A, B and C exist for n = 1 only."""
        config = RunConfig.resolve('kernel', {'n': 2, 'metric': 'A'}).to_dict()
        is_valid, errors = validator.validate_run_config(config)
        assert not is_valid
        assert any('n = 1 only' in e for e in errors)

    def test_identities_n3(self, validator):
        """The identity suite stops at n = 2."""
        config = RunConfig.resolve('identities', {'n': 3}).to_dict()
        assert not validator.validate_run_config(config)[0]

    def test_bad_ranges(self, validator):
        """Negative t, zero dt, zero samples and a negative seed are all reported."""
        config = RunConfig.resolve('evolve', {'t': -1.0, 'dt': 0.0, 'samples': 0, 'seed': -3}).to_dict()
        is_valid, errors = validator.validate_run_config(config)
        assert not is_valid
        assert len(errors) == 4

    def test_unknown_metric_and_format(self, validator):
        """Unknown metric names and formats are reported."""
        config = RunConfig.resolve('kernel', {'metric': 'euclid', 'format': 'xml'}).to_dict()
        is_valid, errors = validator.validate_run_config(config)
        assert not is_valid
        assert len(errors) == 2
