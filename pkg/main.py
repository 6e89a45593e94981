"""
=============================================================================
MAIN PIPELINE ORCHESTRATOR
=============================================================================

This is the command-line entry point of the forms toolkit. It resolves the
run configuration, builds the models and metrics a subcommand needs, runs
the checks in the services package and writes a machine-readable report.

HOW TO RUN THIS:
----------------
From the command line:

    # Scalar-product tables and resolutions of the identity
    python main.py identities --n 1

    # Hermiticity of H̃_ferm under a metric for random Hessians
    python main.py hermiticity --metric gauge --samples 20

    # Sweep of the metric families (Hermitian vs positive definite)
    python main.py nogo-scan --out output/nogo.csv --format csv

    # Physical subspace of the fiber
    python main.py kernel --n 2 --seed 7

    # Carry a one-form along an inverted-oscillator orbit
    python main.py evolve --potential inverted --t 5 --fiber0 "c^q"

    # Largest Lyapunov exponent and norm growth
    python main.py lyapunov --potential inverted --t 20

    # Canonical scaling of the harmonic oscillator
    python main.py canonical --potential-params '{"m": 1, "omega": 2}' --alpha 1.4142135623730951

    # Ring Liouvillian spectrum
    python main.py spectrum --omega 1 --n-theta 32

EXIT CODES:
-----------
    0  every check passed
    1  a check failed (identity, dichotomy, tolerance)
    2  usage, parse or configuration error

CONFIGURATION:
--------------
Defaults live in config/run_config.json. A file passed with --config has the
same shape and overrides them; command-line flags override both.
"""

# =============================================================================
# IMPORTS
# =============================================================================

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.logging_config import log_error, log_run_end, log_run_start, setup_logging
from config.settings import LOG_LEVEL, OUTPUT_CONFIG, TOLERANCES
from models.algebra import AlgebraDescriptor
from models.errors import ConfigError, IntegrationError, KvnError, SpectrumError
from models.metric import Metric
from models.multivector import Multivector
from models.run_config import RunConfig
from services import canonical, dynamics, identity_suite, lie_derivative, nogo_scan, physical
from services.grassmann import monomial_from_label
from services.scalar_products import hermiticity_residual, metric_by_name, signature
from services.validators import SUBCOMMANDS, InputValidator
from utils.exporters import rows_frame, write_csv, write_json

logger = logging.getLogger(__name__)

Outcome = Tuple[Dict, Optional[pd.DataFrame]]


# =============================================================================
# MAIN PIPELINE CLASS
# =============================================================================

class FormsPipeline:
    """
    Runs one subcommand for a resolved RunConfig.

    Every run_* method returns (report, frame): a JSON-ready report holding
    a 'passed' flag, and an optional DataFrame used when the output format
    is CSV.

    EXAMPLE USAGE:
    --------------
    config = RunConfig.resolve('kernel', {'n': 2, 'seed': 7})
    report, _ = FormsPipeline(config).run()
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.validator = InputValidator()
        self.algebra = AlgebraDescriptor(config.n)
        self.rng_seed = config.seed

    # =========================================================================
    # SHARED BUILDERS
    # =========================================================================

    def metric(self) -> Metric:
        """The configured metric (file wins over name)."""
        if self.config.metric_file:
            metric = load_metric_file(self.config.metric_file)
        else:
            params = {k: (complex(*v) if isinstance(v, list) and len(v) == 2 else v)
                      for k, v in self.config.metric_params.items()}
            metric = metric_by_name(self.algebra, self.config.metric, params)
        is_valid, errors = self.validator.validate_metric(metric)
        if not is_valid:
            raise ConfigError('; '.join(errors))
        return metric

    def model(self):
        return dynamics.model_from_potential(self.config.potential, self.config.n,
                                        **self.config.potential_params)

    def phase_point(self) -> np.ndarray:
        size = 2 * self.config.n
        if self.config.phi0 is None:
            point = np.zeros(size)
            point[0] = 0.5
            return point
        point = np.asarray(self.config.phi0, dtype=float)
        if point.shape != (size,):
            raise ConfigError(f"phi0 must have {size} entries for n = {self.config.n}")
        return point

    def hessians(self) -> List[np.ndarray]:
        return lie_derivative.random_hessians(self.algebra, self.config.samples, self.rng_seed)

    # =========================================================================
    # SUBCOMMANDS
    # =========================================================================

    def run_identities(self) -> Outcome:
        overrides = {}
        if self.config.metric_file:
            override = load_metric_file(self.config.metric_file)
            overrides[override.family] = override
        report = identity_suite.IdentitySuite(self.config.n, overrides).run().to_dict()
        return report, rows_frame(report['checks'])

    def run_hermiticity(self) -> Outcome:
        metric = self.metric()
        model = self.model()
        samples = self.hessians() + [model.hessian(self.phase_point())]
        rows = []
        for index, hessian in enumerate(samples):
            ok, errors = self.validator.validate_hessian(hessian, self.config.n)
            if not ok:
                raise ConfigError('; '.join(errors))
            residual = hermiticity_residual(metric, lie_derivative.ferm_matrix(self.algebra, hessian))
            rows.append({'sample': index, 'source': 'model' if index == len(samples) - 1 else 'random',
                         'residual': residual})
        spectral = lie_derivative.spectral_norm_check(metric, samples[0])
        n_plus, n_minus, n_zero = signature(metric)
        hermitian = all(r['residual'] < TOLERANCES['hermiticity'] for r in rows[:-1])
        positive = n_minus == 0 and n_zero == 0
        report = {
            'metric': metric.describe(),
            'model': model.describe(),
            'signature': [n_plus, n_minus, n_zero],
            'residuals': rows,
            'max_residual': max(r['residual'] for r in rows),
            'hermitian': hermitian,
            'positive_definite': positive,
            'spectral': spectral,
            'passed': bool(spectral['passed'] and not (hermitian and positive)),
        }
        return report, rows_frame(rows)

    def run_nogo_scan(self) -> Outcome:
        report = nogo_scan.run_scan(self.config.seed, self.config.samples)
        return report, rows_frame(report['rows'])

    def run_kernel(self) -> Outcome:
        algebra = self.algebra
        hessians = lie_derivative.random_hessians(algebra, max(self.config.samples, 3), self.rng_seed)
        kernel = physical.ferm_kernel(algebra, hessians)
        family = physical.svh_physical_basis(algebra)
        family_matrix = physical.basis_matrix(family)
        angles = physical.principal_angles(kernel, family_matrix) if kernel.shape[1] == family_matrix.shape[1] else []
        same = physical.same_span(kernel, family_matrix)
        if kernel.shape[1] > algebra.n_pairs + 1:
            logger.warning(f"kernel dimension {kernel.shape[1]} exceeds n+1; degenerate Hessian draw?")

        metric = self.metric()
        closure = physical.closure_check(algebra, metric, hessians, kernel)
        svh_closure = physical.closure_check(algebra, metric_by_name(algebra, 'svh'), hessians, family_matrix)

        symplectic_family = physical.symplectic_physical_basis(algebra)
        checks = [physical.symplectic_physical_check(algebra, state, h)
                  for state in symplectic_family for h in hessians]
        gram = physical.gram_matrix(metric_by_name(algebra, 'symplectic'), symplectic_family)
        gram_eigenvalues = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        symplectic = {
            'last_two': max(c['last_two'] for c in checks),
            'mixed': max(c['mixed'] for c in checks),
            'full': max(c['full'] for c in checks),
            'gram_eigenvalues': gram_eigenvalues.tolist(),
        }
        tol = TOLERANCES['hermiticity']
        passed = (kernel.shape[1] == algebra.n_pairs + 1 and same
                  and svh_closure['self_adjoint'] < tol and svh_closure['commutator'] < tol
                  and symplectic['full'] < tol and bool(np.all(gram_eigenvalues > 0)))
        basis = [Multivector.from_vector(algebra, kernel[:, k]).to_json() for k in range(kernel.shape[1])]
        report = {
            'n': algebra.n_pairs,
            'dimension': int(kernel.shape[1]),
            'expected_dimension': algebra.n_pairs + 1,
            'principal_angles': [float(a) for a in angles],
            'matches_svh_family': bool(same),
            'basis': basis,
            'closure': closure,
            'svh_family_closure': svh_closure,
            'symplectic_family': symplectic,
            'gauge_extension': physical.gauge_extension_report(algebra, hessians),
            'passed': bool(passed),
        }
        frame = pd.DataFrame(np.abs(kernel), columns=[f"v{k}" for k in range(kernel.shape[1])])
        frame.insert(0, 'monomial', [algebra.monomial_label(m) for m in range(algebra.dim)])
        return report, frame

    def run_evolve(self) -> Outcome:
        algebra = self.algebra
        model = self.model()
        metric = self.metric()
        fiber0 = monomial_from_label(algebra, self.config.fiber0 or f"c^{algebra.labels()[0]}")
        trajectory = lie_derivative.evolve_fiber(model, metric, self.phase_point(), fiber0,
                                                 self.config.t, self.config.dt, sample_every=100)
        jacobi = trajectory.monodromy.monodromy
        ones = algebra.rank_masks(1)
        initial = trajectory.fibers[0][ones]
        final = trajectory.fibers[-1][ones]
        scale = max(1.0, float(np.max(np.abs(jacobi))))
        one_form = float(np.max(np.abs(final - np.linalg.inv(jacobi).T @ initial))) / scale
        report = {
            'model': model.describe(),
            'metric': metric.describe(),
            't': self.config.t,
            'final_fiber': trajectory.final_fiber.to_json(),
            'monodromy': jacobi.tolist(),
            'symplectic_defect': trajectory.monodromy.symplectic_defect(model.omega),
            'zero_form_drift': trajectory.zero_form_drift,
            'norm_initial': float(trajectory.norms[0]),
            'norm_final': float(trajectory.norms[-1]),
            'one_form_deviation': one_form,
        }
        checks = [one_form, trajectory.zero_form_drift, report['symplectic_defect'] / scale]
        if algebra.n_pairs == 1:
            cbar0 = lie_derivative.to_cbar_representation(fiber0).to_vector()[ones]
            cbar = lie_derivative.to_cbar_representation(trajectory.final_fiber).to_vector()[ones]
            report['cbar_deviation'] = float(np.max(np.abs(cbar - jacobi @ cbar0))) / scale
            checks.append(report['cbar_deviation'])
        report['passed'] = bool(max(checks) < TOLERANCES['integration'])
        return report, lie_derivative.fiber_frame(trajectory)

    def run_lyapunov(self) -> Outcome:
        model = self.model()
        cfg = self.config
        if cfg.samples > 1:
            ensemble = dynamics.lyapunov_ensemble(model, cfg.samples, cfg.seed, cfg.t, cfg.dt, cfg.renorm_interval)
            estimate = ensemble['mean']
        else:
            ensemble = None
            estimate = dynamics.lyapunov(model, self.phase_point(), cfg.t, cfg.dt, cfg.renorm_interval)

        # the same one-form fiber measured by the SvH and symplectic products
        horizon = min(cfg.t, 10.0)
        fiber0 = monomial_from_label(self.algebra, f"c^{self.algebra.labels()[0]}")
        norms = {}
        for name in ('svh', 'symplectic'):
            trajectory = lie_derivative.evolve_fiber(model, metric_by_name(self.algebra, name),
                                                     self.phase_point(), fiber0, horizon, cfg.dt,
                                                     sample_every=100)
            norms[name] = trajectory
        svh_norms = norms['svh'].norms
        times = norms['svh'].times
        late = times >= horizon / 5
        slope = float(np.polyfit(times[late], np.log(svh_norms[late]), 1)[0]) if np.sum(late) > 1 else float('nan')
        report = {
            'model': model.describe(),
            'T': cfg.t,
            'estimate': estimate,
            'ensemble': ensemble,
            'svh_log_norm_slope': slope,
            'symplectic_norm_drift': norms['symplectic'].norm_drift,
            'passed': bool(np.isfinite(estimate)
                           and norms['symplectic'].norm_drift < TOLERANCES['integration']
                           * max(1.0, abs(float(norms['symplectic'].norms[0])))),
        }
        frame = dynamics.jacobi_growth(model, self.phase_point(), cfg.t, cfg.dt)
        return report, frame

    def run_canonical(self) -> Outcome:
        if self.config.n != 1 and self.config.transform_file is None:
            raise ConfigError("the alpha scaling runs at n = 1; pass --transform-file for n > 1")
        model = self.model()
        metric = self.metric()
        if self.config.transform_file:
            with open(self.config.transform_file, 'r', encoding='utf-8') as f:
                transform = canonical.matrix_transform(json.load(f)['S'])
        else:
            alpha = self.config.alpha
            if alpha is None:
                alpha = canonical.isotropic_alpha(float(self.config.potential_params.get('m', 1.0)),
                                                  float(self.config.potential_params.get('omega', 1.0)))
            transform = canonical.scaling_transform(alpha, self.config.n)
        invariance = canonical.hermiticity_invariance(model, metric, transform, self.phase_point())
        frontier = canonical.harmonic_frontier()
        before, after = canonical.signature_pair(metric, transform)
        frontier_ok = all(row['hermitian'] == row['m2_omega2_is_one'] for row in frontier)
        report = {
            'transform': transform.describe(),
            'S': transform.S.tolist(),
            'invariance': invariance,
            'pushed_metric': canonical.pushforward_metric(metric, transform).to_json(),
            'signature_before': list(before),
            'signature_after': list(after),
            'frontier': frontier,
            'passed': bool(invariance['consistent'] and frontier_ok and before == after),
        }
        return report, rows_frame(frontier)

    def run_spectrum(self) -> Outcome:
        cfg = self.config
        values = lie_derivative.ring_liouvillian_spectrum(cfg.omega, cfg.n_theta)
        half = cfg.n_theta // 2
        if cfg.n_theta % 2 == 0:
            wavenumbers = list(range(-(half - 1), half)) + [0]
        else:
            wavenumbers = list(range(-half, half + 1))
        expected = np.sort(cfg.omega * np.array(wavenumbers, dtype=float))
        deviation = float(np.max(np.abs(values - expected)))
        metric = self.metric()
        model = self.model()
        spectral = lie_derivative.spectral_norm_check(metric, model.hessian(self.phase_point()))
        report = {
            'omega': cfg.omega,
            'n_theta': cfg.n_theta,
            'eigenvalues': values.tolist(),
            'deviation': deviation,
            'fiber_spectrum': spectral,
            'passed': bool(deviation < TOLERANCES['hermiticity'] and spectral['passed']),
        }
        return report, pd.DataFrame({'expected': expected, 'eigenvalue': values})

    # =========================================================================
    # DISPATCH AND EXPORT
    # =========================================================================

    def run(self) -> Outcome:
        handlers = {
            'identities': self.run_identities,
            'hermiticity': self.run_hermiticity,
            'nogo-scan': self.run_nogo_scan,
            'kernel': self.run_kernel,
            'evolve': self.run_evolve,
            'lyapunov': self.run_lyapunov,
            'canonical': self.run_canonical,
            'spectrum': self.run_spectrum,
        }
        report, frame = handlers[self.config.subcommand]()
        report['subcommand'] = self.config.subcommand
        report['seed'] = self.config.seed
        return report, frame

    def export(self, report: Dict, frame: Optional[pd.DataFrame]) -> str:
        cfg = self.config
        path = cfg.out or os.path.join(OUTPUT_CONFIG['out_dir'], f"{cfg.subcommand}.{cfg.format}")
        if cfg.format == 'csv' and frame is not None:
            return write_csv(frame, path)
        return write_json(report, path)


def load_metric_file(path: str) -> Metric:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read metric file {path}: {e}") from e
    return Metric.from_json(document)


# =============================================================================
# COMMAND-LINE INTERFACE
# =============================================================================

def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"invalid JSON: {e}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--n', type=int, help='Degrees of freedom')
    common.add_argument('--metric', help='svh, gauge, symplectic, A, B or C')
    common.add_argument('--metric-params', type=_json_arg, help='Metric family parameters as JSON')
    common.add_argument('--metric-file', help='Metric JSON file (overrides --metric)')
    common.add_argument('--potential', help='Builtin model name or Hamiltonian expression')
    common.add_argument('--potential-params', type=_json_arg, help='Builtin model parameters as JSON')
    common.add_argument('--t', type=float, help='Duration')
    common.add_argument('--dt', type=float, help='Largest integration step')
    common.add_argument('--samples', type=int, help='Random Hessians or Monte-Carlo orbits')
    common.add_argument('--seed', type=int, help='Seed of every random draw')
    common.add_argument('--out', help='Output file')
    common.add_argument('--format', choices=['json', 'csv'], help='Output format')
    common.add_argument('--config', help='JSON configuration file')
    common.add_argument('--log-level', default=LOG_LEVEL, help='DEBUG, INFO, WARNING or ERROR')
    common.add_argument('--log-dir', default=None, help="Log directory ('' for console only)")
    common.add_argument('--phi0', type=_json_arg, help='Initial phase point as a JSON list')
    common.add_argument('--fiber0', help="Initial fiber monomial, e.g. 'c^q'")
    common.add_argument('--renorm-interval', type=float, help='Lyapunov renormalization interval')
    common.add_argument('--alpha', type=float, help='Canonical scaling parameter')
    common.add_argument('--transform-file', help='JSON file holding {"S": [[...]]}')
    common.add_argument('--omega', type=float, help='Ring frequency')
    common.add_argument('--n-theta', type=int, help='Angles per ring')

    parser = argparse.ArgumentParser(
        description='Operator forms toolkit: scalar products, hermiticity and dynamics on the fiber',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


FLAG_KEYS = ('n', 'metric', 'metric_params', 'metric_file', 'potential', 'potential_params', 't', 'dt',
             'samples', 'seed', 'out', 'format', 'phi0', 'fiber0', 'renorm_interval', 'alpha',
             'transform_file', 'omega', 'n_theta')


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and return the exit code.

    argparse itself exits with code 2 on usage errors.
    """
    args = build_parser().parse_args(argv)
    run_logger = setup_logging('kvn_forms', args.log_level, args.log_dir)

    try:
        flags = {key: getattr(args, key) for key in FLAG_KEYS}
        config = RunConfig.resolve(args.subcommand, flags, args.config)
        is_valid, errors = InputValidator().validate_run_config(config.to_dict())
        if not is_valid:
            for error in errors:
                log_error(run_logger, error, 'invalid configuration')
            return 2

        log_run_start(run_logger, args.subcommand, config.to_dict())
        pipeline = FormsPipeline(config)
        report, frame = pipeline.run()
        path = pipeline.export(report, frame)
        log_run_end(run_logger, {'passed': report['passed'], 'output': path})
        return 0 if report['passed'] else 1

    except KeyboardInterrupt:
        run_logger.info("Operation cancelled by user")
        return 0
    except IntegrationError as e:
        log_error(run_logger, e, 'integration failed')
        return 1
    except SpectrumError as e:
        log_error(run_logger, e, 'spectrum check failed')
        return 1
    except (KvnError, ValueError, OSError, KeyError) as e:
        log_error(run_logger, e, f'{args.subcommand} failed')
        return 2


if __name__ == '__main__':
    sys.exit(main())
