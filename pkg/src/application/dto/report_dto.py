"""
DTOs de los reportes de verificación.

Se serializan a JSON con la forma
{"condition": "dc2", "max_residual": .., "argmax": {"t": .., "T": ..}, "pass": true}.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import math

import numpy as np


def _clean(value: Any) -> Any:
    """Convierte tipos numpy y no finitos a valores JSON."""
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    return value


@dataclass
class ConditionReport:
    """
    Resultado de una condición.

    Attributes:
        condition: Nombre (dc1, dc2, dcm1, dcm2, g_jump, martingale)
        max_residual: Máximo residuo absoluto (|z| máximo en pruebas MC)
        argmax: Punto donde se alcanza el máximo
        passed: True si max_residual ≤ tolerance
        tolerance: Tolerancia aplicada
        tolerance_kind: closed_form, grid o monte_carlo
    """
    condition: str
    max_residual: float
    argmax: Dict[str, float]
    passed: bool
    tolerance: float
    tolerance_kind: str = "closed_form"
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residuals(
        cls,
        condition: str,
        residuals: np.ndarray,
        points: List[Dict[str, float]],
        tolerance: float,
        tolerance_kind: str = "closed_form",
    ) -> 'ConditionReport':
        """Reduce residuos por punto a su máximo; el primer máximo gana en empates."""
        residuals = np.asarray(residuals, dtype=float)
        if residuals.size == 0:
            return cls(condition, 0.0, {}, True, tolerance, tolerance_kind, {'n_points': 0})
        residuals = np.where(np.isnan(residuals), np.inf, residuals)
        k = int(np.argmax(residuals))
        worst = float(residuals[k])
        return cls(
            condition=condition,
            max_residual=worst,
            argmax=dict(points[k]),
            passed=bool(worst <= tolerance),
            tolerance=tolerance,
            tolerance_kind=tolerance_kind,
            details={'n_points': int(residuals.size)},
        )

    def to_dict(self) -> Dict[str, Any]:
        return _clean({
            'condition': self.condition,
            'max_residual': self.max_residual,
            'argmax': self.argmax,
            'pass': self.passed,
            'tolerance': self.tolerance,
            'tolerance_kind': self.tolerance_kind,
            **({'details': self.details} if self.details else {}),
        })


@dataclass
class MartingaleReport:
    """
    Prueba Monte Carlo de E[(X⁰_t)^{-1} P(t∧τ, T)] = P(0,T).
    """
    maturity: float
    reference: float
    t_grid: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    z_scores: np.ndarray
    n_paths: int
    z_threshold: float = 3.0

    @property
    def passed(self) -> bool:
        return bool(np.all(np.abs(self.z_scores) <= self.z_threshold))

    def to_condition(self) -> ConditionReport:
        z = np.abs(self.z_scores)
        report = ConditionReport.from_residuals(
            'martingale', z, [{'t': float(t), 'T': self.maturity} for t in self.t_grid],
            self.z_threshold, 'monte_carlo',
        )
        report.details.update({'n_paths': self.n_paths, 'reference': self.reference})
        return report

    def to_dict(self) -> Dict[str, Any]:
        return _clean({
            'T': self.maturity,
            'reference': self.reference,
            't': self.t_grid,
            'mean': self.estimates,
            'std_error': self.std_errors,
            'z': self.z_scores,
            'n_paths': self.n_paths,
            'z_threshold': self.z_threshold,
            'pass': self.passed,
        })


@dataclass
class VerificationReport:
    """Conjunto de condiciones verificadas sobre un mismo modelo."""
    label: str
    conditions: List[ConditionReport] = field(default_factory=list)
    martingale: Optional[MartingaleReport] = None

    @property
    def passed(self) -> bool:
        checks = [c.passed for c in self.conditions]
        if self.martingale is not None:
            checks.append(self.martingale.passed)
        return all(checks)

    def condition(self, name: str) -> ConditionReport:
        for c in self.conditions:
            if c.condition == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'label': self.label,
            'pass': self.passed,
            'conditions': [c.to_dict() for c in self.conditions],
        }
        if self.martingale is not None:
            data['martingale'] = self.martingale.to_dict()
        return data

    def to_rows(self) -> List[Dict[str, Any]]:
        """Filas planas para exportación tabular."""
        rows = [c.to_dict() for c in self.conditions]
        if self.martingale is not None:
            rows.append(self.martingale.to_condition().to_dict())
        return [
            {
                'condition': r['condition'],
                'max_residual': r['max_residual'],
                't': r['argmax'].get('t'),
                'T': r['argmax'].get('T'),
                'tolerance': r['tolerance'],
                'tolerance_kind': r['tolerance_kind'],
                'pass': r['pass'],
            }
            for r in rows
        ]
