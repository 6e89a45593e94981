"""
Exact identity suite for the fiber scalar products.

Reproduces the scalar-product tables of the parametric eigenstates, the
resolutions of the identity obtained by Berezin integration, the bra
entry-order rule and the anticommutator algebra. Every check reports the
maximum deviation from its closed form; any deviation above the exactness
tolerance fails the suite.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from config.settings import TOLERANCES
from models.algebra import AlgebraDescriptor
from models.errors import AlgebraError
from models.metric import Metric
from models.multivector import Multivector
from models.param_element import ParamElement
from services.grassmann import (
    anticommutator_defect,
    contraction_ops,
    eigen_ket,
    number_ops,
    param,
    vacuum_ket,
    wedge_ops,
)
from services.scalar_products import (
    adjoint,
    gauge_metric,
    hermiticity_residual,
    inner,
    param_inner,
    resolution_of_identity,
    svh_metric,
    symplectic_metric,
)

logger = logging.getLogger(__name__)

BUILDERS: Dict[str, Callable[[AlgebraDescriptor], Metric]] = {
    'svh': svh_metric,
    'gauge': gauge_metric,
    'symplectic': symplectic_metric,
}


@dataclass
class IdentityCheck:
    """One identity with its deviation."""

    name: str
    deviation: float
    passed: bool
    detail: str = ''

    def to_dict(self) -> Dict:
        return {'name': self.name, 'deviation': self.deviation, 'passed': self.passed,
                'detail': self.detail}


@dataclass
class IdentityReport:
    n_pairs: int
    checks: List[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def max_deviation(self) -> float:
        return max((check.deviation for check in self.checks), default=0.0)

    @property
    def failures(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def to_dict(self) -> Dict:
        return {
            'n': self.n_pairs,
            'passed': self.passed,
            'max_deviation': self.max_deviation,
            'failures': self.failures,
            'checks': [check.to_dict() for check in self.checks],
        }


class IdentitySuite:
    """
    Runs the identity checks for n = 1 or n = 2.

    n = 1 covers the single-variable, one-pair and basis tables and the
    resolutions of all three products. n = 2 covers the SvH tables, the
    resolutions of all three products, the entry-order rule and the
    operator algebra.

    A metric in `overrides` replaces the named metric of the same family on
    the same fiber, so a corrupted metric file shows up as failing checks.
    """

    def __init__(self, n_pairs: int = 1, overrides: Optional[Dict[str, Metric]] = None,
                 tol: Optional[float] = None):
        if n_pairs not in (1, 2):
            raise AlgebraError(f"identity suite supports n = 1 or 2, got {n_pairs}")
        self.n_pairs = n_pairs
        self.overrides = dict(overrides or {})
        self.tol = TOLERANCES['exact'] if tol is None else tol
        self.logger = logging.getLogger(__name__)
        self.report = IdentityReport(n_pairs)

    # =========================================================================
    # HELPERS
    # =========================================================================

    def _metric(self, family: str, algebra: AlgebraDescriptor) -> Metric:
        override = self.overrides.get(family)
        if override is not None and override.algebra.same_fiber(algebra):
            return override
        return BUILDERS[family](algebra)

    def _record(self, name: str, deviation: float, detail: str = '') -> None:
        passed = bool(deviation <= self.tol)
        self.report.checks.append(IdentityCheck(name, float(deviation), passed, detail))
        if passed:
            self.logger.debug(f"{name}: deviation {deviation:.3g}")
        else:
            self.logger.warning(f"{name} FAILED: deviation {deviation:.3g}")

    def _table(self, name: str, metric: Metric, phi: Multivector, psi: Multivector,
               expected: ParamElement) -> None:
        value = param_inner(metric, phi, psi)
        self._record(name, (value - expected).max_abs())

    def _resolution(self, name: str, metric: Metric, ket: Multivector, bra: Multivector,
                    measure: List[int], prefactor: complex) -> None:
        matrix = resolution_of_identity(metric, ket, bra, measure, prefactor)
        self._record(name, float(np.max(np.abs(matrix - np.eye(metric.algebra.dim)))))

    # =========================================================================
    # SINGLE VARIABLE
    # =========================================================================

    def single_variable_tables(self) -> None:
        algebra = AlgebraDescriptor.single_variable(n_params=2)
        a, b = param(algebra, 0), param(algebra, 1)
        a_star = param(algebra, 0, starred=True)
        ket = {s: eigen_ket(algebra, s, [a]) for s in '+-'}
        other = {s: eigen_ket(algebra, s, [b]) for s in '+-'}
        svh = self._metric('svh', algebra)
        gauge = self._metric('gauge', algebra)

        one_plus = 1 + a_star * b
        self._table('svh.single.table(+,+)', svh, ket['+'], other['+'], one_plus)
        self._table('svh.single.table(-,-)', svh, ket['-'], other['-'], one_plus)
        self._table('svh.single.table(+,-)', svh, ket['+'], other['-'], a_star - b)
        self._table('svh.single.table(-,+)', svh, ket['-'], other['+'], -(a_star - b))

        self._table('gauge.single.table(+,+)', gauge, ket['+'], other['+'], -(a_star - b))
        self._table('gauge.single.table(-,-)', gauge, ket['-'], other['-'], a_star - b)
        self._table('gauge.single.table(+,-)', gauge, ket['+'], other['-'], one_plus)
        self._table('gauge.single.table(-,+)', gauge, ket['-'], other['+'], one_plus)

    def single_variable_resolutions(self) -> None:
        algebra = AlgebraDescriptor.single_variable(n_params=1)
        a, a_star = param(algebra, 0), param(algebra, 0, starred=True)
        svh = self._metric('svh', algebra)
        gauge = self._metric('gauge', algebra)
        self._resolution('svh.single.resolution(+)', svh, eigen_ket(algebra, '+', [a]),
                         eigen_ket(algebra, '-', [a_star]), [0], -1)
        self._resolution('svh.single.resolution(-)', svh, eigen_ket(algebra, '-', [a]),
                         eigen_ket(algebra, '+', [a_star]), [0], -1)
        for sign in '+-':
            self._resolution(f'gauge.single.resolution({sign})', gauge, eigen_ket(algebra, sign, [a]),
                             eigen_ket(algebra, sign, [a_star]), [0], -1)

    # =========================================================================
    # ONE PAIR
    # =========================================================================

    def pair_tables(self) -> None:
        algebra = AlgebraDescriptor(1, n_params=4)
        t = [param(algebra, k) for k in range(4)]
        s = [param(algebra, k, starred=True) for k in range(4)]
        aq, ap, bq, bp = t
        aq_s, ap_s = s[0], s[1]

        def ket(signs, first, second):
            return eigen_ket(algebra, signs, [first, second])

        svh = self._metric('svh', algebra)
        self._table('svh.pair.table(--,--)', svh, ket('--', aq, ap), ket('--', bq, bp),
                    (aq_s * bq + ap_s * bp).exp())
        self._table('svh.pair.table(*++,--)', svh, ket('++', aq_s, ap_s), ket('--', bq, bp),
                    (aq - bq) * (ap - bp))
        self._table('svh.pair.table(*--,++)', svh, ket('--', aq_s, ap_s), ket('++', bq, bp),
                    -((aq - bq) * (ap - bp)))

        gauge = self._metric('gauge', algebra)
        minus, plus = ket('--', aq, ap), ket('++', aq, ap)
        rows = [
            ('gauge.pair.table(--,++)', minus, ket('++', bq, bp), 1j * (aq_s * bq + ap_s * bp).exp()),
            ('gauge.pair.table(--,-+)', minus, ket('-+', bq, bp), 1j * (aq_s - bq) * (ap_s * bp).exp()),
            ('gauge.pair.table(--,+-)', minus, ket('+-', bq, bp), 1j * (ap_s - bp) * (aq_s * bq).exp()),
            ('gauge.pair.table(--,--)', minus, ket('--', bq, bp), 1j * (aq_s - bq) * (ap_s - bp)),
            ('gauge.pair.table(++,-+)', plus, ket('-+', bq, bp), 1j * (ap_s - bp) * (aq_s * bq).exp()),
            ('gauge.pair.table(++,+-)', plus, ket('+-', bq, bp), 1j * (bq - aq_s) * (ap_s * bp).exp()),
            ('gauge.pair.table(++,++)', plus, ket('++', bq, bp), 1j * (aq_s - bq) * (ap_s - bp)),
            ('gauge.pair.table(++,--)', plus, ket('--', bq, bp), -1j * (aq_s * bq + ap_s * bp).exp()),
        ]
        for name, phi, psi, expected in rows:
            self._table(name, gauge, phi, psi, expected)

        symplectic = self._metric('symplectic', algebra)
        bq_s, bp_s = s[2], s[3]
        rows = [
            ('symplectic.pair.table(--,--)', minus, ket('--', bq, bp),
             -((-1j * aq_s * bp + 1j * ap_s * bq).exp())),
            ('symplectic.pair.table(-+,++)', ket('-+', aq, ap), ket('++', bq, bp),
             1j * (bp + 1j * aq_s) * (1j * bq * ap_s).exp()),
            ('symplectic.pair.table(--,+-)', minus, ket('+-', bq, bp),
             (bq - 1j * ap_s) * (1j * bp * aq_s).exp()),
            ('symplectic.pair.table(--,++)', minus, ket('++', bq, bp),
             (bq - 1j * ap_s) * (bp + 1j * aq_s)),
            ('symplectic.pair.table(--,-+)', minus, ket('-+', bq, bp),
             -((bp + 1j * aq_s) * (-1j * bq * ap_s).exp())),
            ('symplectic.pair.table(+-,++)', ket('+-', aq, ap), ket('++', bq, bp),
             -1j * (bq - 1j * ap_s) * (-1j * bp * aq_s).exp()),
            ('symplectic.pair.table(+-,-+)', ket('+-', aq, ap), ket('-+', bq, bp),
             -1j * (1j * aq_s * bp + 1j * ap_s * bq).exp()),
            ('symplectic.pair.table(+-,+-)', ket('+-', aq, ap), ket('+-', bq, bp),
             (ap_s + 1j * bq) * (bp - 1j * aq_s)),
            ('symplectic.pair.table(-+,-+)', ket('-+', aq, ap), ket('-+', bq, bp),
             (bq + 1j * ap_s) * (1j * bp - aq_s)),
            # same row with the bra and ket parameters exchanged
            ('symplectic.pair.table(--,--)swapped', ket('--', bq, bp), ket('--', aq, ap),
             -((-1j * bq_s * ap + 1j * bp_s * aq).exp())),
            ('symplectic.pair.table(++,++)', plus, ket('++', bq, bp),
             (1j * aq_s * bp - 1j * ap_s * bq).exp()),
        ]
        for name, phi, psi, expected in rows:
            self._table(name, symplectic, phi, psi, expected)

    def basis_tables(self) -> None:
        """
        Products of the four n = 1 basis kets, ordered |0+0+⟩, |0-0+⟩,
        |0+0-⟩, |0-0-⟩ (the monomials 1, c^q, c^p, c^q c^p).
        """
        algebra = AlgebraDescriptor(1)
        order = ('++', '-+', '+-', '--')
        states = [vacuum_ket(algebra, signs) for signs in order]
        gauge = np.zeros((4, 4), dtype=complex)
        gauge[3, 0], gauge[0, 3], gauge[1, 2], gauge[2, 1] = 1j, -1j, -1j, 1j
        symplectic = np.zeros((4, 4), dtype=complex)
        symplectic[0, 0], symplectic[1, 2], symplectic[2, 1], symplectic[3, 3] = 1, 1j, -1j, -1
        expected = {'svh': np.eye(4, dtype=complex), 'gauge': gauge, 'symplectic': symplectic}
        for family, table in expected.items():
            metric = self._metric(family, algebra)
            values = np.array([[inner(metric, phi, psi) for psi in states] for phi in states])
            self._record(f'{family}.pair.basis_table', float(np.max(np.abs(values - table))))

    def pair_resolutions(self) -> None:
        algebra = AlgebraDescriptor(1, n_params=2)
        aq, ap = param(algebra, 0), param(algebra, 1)
        aq_s, ap_s = param(algebra, 0, starred=True), param(algebra, 1, starred=True)
        svh = self._metric('svh', algebra)
        gauge = self._metric('gauge', algebra)
        symplectic = self._metric('symplectic', algebra)

        self._resolution('svh.pair.resolution(++)', svh, eigen_ket(algebra, '++', [aq, ap]),
                         eigen_ket(algebra, '--', [aq_s, ap_s]), [0, 1], 1)
        self._resolution('svh.pair.resolution(--)', svh, eigen_ket(algebra, '--', [aq, ap]),
                         eigen_ket(algebra, '++', [aq_s, ap_s]), [1, 0], 1)
        for signs in ('++', '--'):
            self._resolution(f'gauge.pair.resolution({signs})', gauge, eigen_ket(algebra, signs, [aq, ap]),
                             eigen_ket(algebra, signs, [aq_s, ap_s]), [0, 1], 1j)
        self._resolution('symplectic.pair.resolution(--)', symplectic,
                         eigen_ket(algebra, '--', [aq, ap]),
                         eigen_ket(algebra, '++', [1j * ap_s, -1j * aq_s]), [1, 0], 1)
        self._resolution('symplectic.pair.resolution(++)', symplectic,
                         eigen_ket(algebra, '++', [aq, ap]),
                         eigen_ket(algebra, '--', [-1j * ap_s, 1j * aq_s]), [1, 0], 1)

    # =========================================================================
    # ANY n
    # =========================================================================

    def svh_resolutions(self, n_pairs: int) -> None:
        """(-1)^N ∫dα_1..dα_N |α+⟩⟨α*-| and (-1)^N ∫dα_N..dα_1 |α-⟩⟨α*+|, N = 2n."""
        size = 2 * n_pairs
        algebra = AlgebraDescriptor(n_pairs, n_params=size)
        alphas = [param(algebra, k) for k in range(size)]
        stars = [param(algebra, k, starred=True) for k in range(size)]
        metric = self._metric('svh', algebra)
        prefactor = (-1) ** size
        self._resolution(f'svh.n{n_pairs}.resolution(+)', metric, eigen_ket(algebra, '+' * size, alphas),
                         eigen_ket(algebra, '-' * size, stars), list(range(size)), prefactor)
        self._resolution(f'svh.n{n_pairs}.resolution(-)', metric, eigen_ket(algebra, '-' * size, alphas),
                         eigen_ket(algebra, '+' * size, stars), list(reversed(range(size))), prefactor)

    def svh_tables(self, n_pairs: int) -> None:
        """
        SvH products of the all-'-' and all-'+' eigenstates with N = 2n
        slots: exp(Σα*β), Π(α - β) and (-1)^n Π(α - β), products in
        generator order.
        """
        size = 2 * n_pairs
        algebra = AlgebraDescriptor(n_pairs, n_params=2 * size)
        alphas = [param(algebra, k) for k in range(size)]
        alpha_stars = [param(algebra, k, starred=True) for k in range(size)]
        betas = [param(algebra, size + k) for k in range(size)]
        metric = self._metric('svh', algebra)

        exponent = alpha_stars[0] * betas[0]
        differences = alphas[0] - betas[0]
        for a in range(1, size):
            exponent = exponent + alpha_stars[a] * betas[a]
            differences = differences * (alphas[a] - betas[a])

        minus, plus = '-' * size, '+' * size
        self._table(f'svh.n{n_pairs}.table({minus},{minus})', metric, eigen_ket(algebra, minus, alphas),
                    eigen_ket(algebra, minus, betas), exponent.exp())
        self._table(f'svh.n{n_pairs}.table(*{plus},{minus})', metric, eigen_ket(algebra, plus, alpha_stars),
                    eigen_ket(algebra, minus, betas), differences)
        self._table(f'svh.n{n_pairs}.table(*{minus},{plus})', metric, eigen_ket(algebra, minus, alpha_stars),
                    eigen_ket(algebra, plus, betas), differences * (-1) ** n_pairs)

    def paired_resolutions(self, n_pairs: int) -> None:
        """
        Gauge and symplectic resolutions on the n = 2 fiber.

        The symplectic bra pairs q_i with p_i as in the one-pair case, and
        the measure integrates the p parameters before the q parameters.
        """
        size = 2 * n_pairs
        algebra = AlgebraDescriptor(n_pairs, n_params=size)
        alphas = [param(algebra, k) for k in range(size)]
        stars = [param(algebra, k, starred=True) for k in range(size)]
        plus, minus = '+' * size, '-' * size

        gauge = self._metric('gauge', algebra)
        self._resolution(f'gauge.n{n_pairs}.resolution({plus})', gauge, eigen_ket(algebra, plus, alphas),
                         eigen_ket(algebra, plus, stars), list(range(size)), 1j ** n_pairs)

        symplectic = self._metric('symplectic', algebra)
        q_slots, p_slots = list(range(n_pairs)), list(range(n_pairs, size))
        measure = p_slots + q_slots
        to_minus = [-1j * stars[p] for p in p_slots] + [1j * stars[q] for q in q_slots]
        to_plus = [1j * stars[p] for p in p_slots] + [-1j * stars[q] for q in q_slots]
        self._resolution(f'symplectic.n{n_pairs}.resolution({plus})', symplectic,
                         eigen_ket(algebra, plus, alphas), eigen_ket(algebra, minus, to_minus), measure, 1)
        self._resolution(f'symplectic.n{n_pairs}.resolution({minus})', symplectic,
                         eigen_ket(algebra, minus, alphas), eigen_ket(algebra, plus, to_plus), measure, 1)

    def entry_order(self, n_pairs: int) -> None:
        """
        The bra of ĉ^{q_1}ĉ^{p_1}|0⟩ closes with (ĉ^{p_1})‡(ĉ^{q_1})‡: the
        operator order inverts. SvH turns this into c̄̂_p c̄̂_q, gauge into
        ĉ^p ĉ^q, and the symplectic product into c̄̂_q c̄̂_p.
        """
        algebra = AlgebraDescriptor(n_pairs)
        wedges, contractions = wedge_ops(algebra), contraction_ops(algebra)
        q, p = algebra.q(0), algebra.p(0)
        expected = {
            'svh': contractions[p] @ contractions[q],
            'gauge': wedges[p] @ wedges[q],
        }
        if n_pairs == 1:
            expected['symplectic'] = contractions[q] @ contractions[p]
        vacuum = np.zeros(algebra.dim, dtype=complex)
        vacuum[0] = 1.0
        for family, target in expected.items():
            metric = self._metric(family, algebra)
            product_ = wedges[q] @ wedges[p]
            dagger = adjoint(metric, product_).matrix
            bra_row = (product_.matrix @ vacuum).conj() @ metric.g
            closing = (vacuum.conj() @ metric.g) @ dagger
            deviation = max(float(np.max(np.abs(bra_row - closing))),
                            float(np.max(np.abs(dagger - target.matrix))))
            self._record(f'{family}.n{n_pairs}.entry_order', deviation)

    def operator_algebra(self, n_pairs: int) -> None:
        algebra = AlgebraDescriptor(n_pairs)
        self._record(f'algebra.n{n_pairs}.anticommutators', anticommutator_defect(algebra))
        metric = self._metric('svh', algebra)
        worst = max(hermiticity_residual(metric, op) for op in number_ops(algebra))
        self._record(f'svh.n{n_pairs}.number_operators_hermitian', worst)

    # =========================================================================
    # RUN
    # =========================================================================

    def run(self) -> IdentityReport:
        self.report = IdentityReport(self.n_pairs)
        if self.n_pairs == 1:
            self.single_variable_tables()
            self.single_variable_resolutions()
            self.pair_tables()
            self.basis_tables()
            self.pair_resolutions()
        else:
            self.svh_tables(2)
            self.svh_resolutions(2)
            self.paired_resolutions(2)
        self.entry_order(self.n_pairs)
        self.operator_algebra(self.n_pairs)
        self.logger.info(f"identity suite n={self.n_pairs}: {len(self.report.checks)} checks, "
                         f"{len(self.report.failures)} failed, max deviation {self.report.max_deviation:.3g}")
        return self.report


def run_identity_suite(n_pairs: int = 1, overrides: Optional[Dict[str, Metric]] = None) -> IdentityReport:
    return IdentitySuite(n_pairs, overrides).run()
