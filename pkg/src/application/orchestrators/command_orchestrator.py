"""
Orquestador de los subcomandos: escenario ya mapeado → servicio → tabla o reporte.
"""
from __future__ import annotations
from dataclasses import dataclass, field
import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.application.dto.report_dto import ConditionReport, MartingaleReport, VerificationReport
from src.application.dto.scenario_dto import (
    AffineRequest,
    CurveRequest,
    FilterRequest,
    MartingaleRequest,
    SimulateRequest,
    VerifyRequest,
)
from src.application.services.affine_engine_service import AffineEngineService
from src.application.services.default_simulation_service import (
    NO_ATOM,
    DefaultSimulationService,
    exponential_delays,
)
from src.application.services.merton_filter_service import MertonFilterService
from src.application.services.noarb_verifier_service import (
    AffinePathSampler,
    AffinePricingModel,
    DeterministicPathSampler,
    DeterministicPricingModel,
    MertonAtomDriftProvider,
    NoArbitrageVerifierService,
)
from src.application.services.term_structure_service import TermStructureService
from src.domain.entities.hazard import HazardAtom, HazardPath
from src.domain.exceptions.domain_exception import OutOfRangeException
from src.shared.constants import TIME_ATOL

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """
    Salida de un subcomando.

    Attributes:
        command: Nombre del subcomando
        table: Resultado tabular (None si el comando produce un reporte)
        report: Reporte de verificación
        summary: Cantidades escalares que se registran en el log
    """
    command: str
    table: Optional[pd.DataFrame] = None
    report: Optional[VerificationReport] = None
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.report is None or self.report.passed


class CommandOrchestrator:
    def __init__(
        self,
        term_structure: TermStructureService,
        affine_engine: AffineEngineService,
        filter_service: MertonFilterService,
        simulation: DefaultSimulationService,
        verifier: NoArbitrageVerifierService,
        default_paths: int = 100_000,
        coverage_level: float = 0.95,
    ):
        self.term_structure = term_structure
        self.affine_engine = affine_engine
        self.filter_service = filter_service
        self.simulation = simulation
        self.verifier = verifier
        self.default_paths = default_paths
        self.coverage_level = coverage_level

    def run(self, command: str, request: Any, seed: int = 0) -> CommandResult:
        handler = {
            'curve': self.run_curve,
            'affine': self.run_affine,
            'filter': self.run_filter,
            'simulate': self.run_simulate,
            'verify': self.run_verify,
        }[command]
        logger.info(f"🚀 Ejecutando '{command}' ({request.source or 'sin nombre'}), semilla={seed}")
        result = handler(request, seed)
        for key, value in result.summary.items():
            logger.info(f"   {key}: {value}")
        return result

    # ------------------------------------------------------------------
    # curve
    # ------------------------------------------------------------------
    def run_curve(self, req: CurveRequest, seed: int = 0) -> CommandResult:
        surface, t = req.surface, req.t
        maturities = sorted(float(T) for T in req.maturities)
        prices = self.term_structure.curve(surface, t, maturities)
        schedule = surface.schedule
        rows: List[Dict[str, Any]] = []
        for T, price in zip(maturities, prices):
            price = 0.0 if req.defaulted else float(price)
            atom = next(
                (e for e in schedule if abs(e.time - T) <= TIME_ATOL and e.time > t + TIME_ATOL
                 and e.is_announced_by(t)),
                None,
            )
            if atom is not None:
                # Límite por izquierda: el átomo en T todavía no se descuenta
                left = price * math.exp(surface.g_value(t, atom.time))
                rows.append({'T': T, 'price': left, 'is_atom': False})
            rows.append({'T': T, 'price': price, 'is_atom': atom is not None})
        return CommandResult('curve', table=pd.DataFrame(rows), summary={'t': t, 'maturities': len(maturities)})

    # ------------------------------------------------------------------
    # affine
    # ------------------------------------------------------------------
    def run_affine(self, req: AffineRequest, seed: int = 0) -> CommandResult:
        model, t, x0 = req.model, req.t, req.x0
        if not model.params.in_state_space(x0):
            raise OutOfRangeException(f"Estado inicial {list(x0)} fuera del cono")
        d = model.params.dim
        b_cols = [f"B_{k + 1}" for k in range(d)]
        rows: List[Dict[str, Any]] = []

        for T in sorted(float(T) for T in req.maturities):
            if T <= t + TIME_ATOL:
                if req.export == 'prices':
                    rows.append({'T': T, 'A': 0.0, **dict.fromkeys(b_cols, 0.0), 'price': 1.0,
                                 **({'closed_form': 1.0} if model.cir else {})})
                continue
            sol = self.affine_engine.riccati_solve(
                model.params, model.loadings, model.schedule, T, req.step, t_start=t,
            )
            if req.export == 'solution':
                for k, s in enumerate(sol.times):
                    rows.append({'T': T, 't': float(s), 'A': float(sol.A[k]),
                                 **{c: float(v) for c, v in zip(b_cols, sol.B[k])}})
                continue
            A, B = sol.at(t)
            row = {'T': T, 'A': A, **{c: float(v) for c, v in zip(b_cols, B)},
                   'price': self.affine_engine.affine_bond_price(sol, x0, t, params=model.params)}
            if model.cir is not None:
                u1 = float(model.schedule.times[0]) if len(model.schedule) else math.inf
                A_cf, B_cf = self.affine_engine.cir_closed_form(model.cir, t, T, u1)
                row['closed_form'] = math.exp(-A_cf - B_cf * float(x0[0]))
            rows.append(row)

        table = pd.DataFrame(rows)
        summary: Dict[str, Any] = {'export': req.export, 'dim': d}
        if 'closed_form' in table:
            summary['max |RK4 − cerrada|'] = float(np.max(np.abs(table['price'] - table['closed_form'])))
        return CommandResult('affine', table=table, summary=summary)

    # ------------------------------------------------------------------
    # filter
    # ------------------------------------------------------------------
    def run_filter(self, req: FilterRequest, seed: int = 0) -> CommandResult:
        run = self.filter_service.run_filter(req.setup, seed, req.horizon, req.dt, req.true_x)
        summary: Dict[str, Any] = {'X': run.true_x, "Y'": run.y_prime, 'xhat final': float(run.xhat[-1])}
        if req.coverage_runs:
            horizon = req.setup.U if req.horizon is None else req.horizon
            summary['cobertura'] = self.filter_service.coverage(
                req.setup, req.coverage_runs, horizon, seed, self.coverage_level, req.dt,
            )
        return CommandResult('filter', table=pd.DataFrame(run.to_columns()), summary=summary)

    # ------------------------------------------------------------------
    # simulate
    # ------------------------------------------------------------------
    def run_simulate(self, req: SimulateRequest, seed: int = 0) -> CommandResult:
        n_paths = req.n_paths or self.default_paths
        if req.hazard_path is not None:
            path = req.hazard_path
            tau, hit = self.simulation.sample_taus(path, n_paths, seed)
            table = self._tau_table(tau, hit)
            expected = -math.expm1(-float(path.cumulative(path.horizon)))
            summary = {'P(τ ≤ horizonte) MC': float(np.isfinite(tau).mean()), 'P(τ ≤ horizonte)': expected}
            return CommandResult('simulate', table=table, summary=summary)

        if req.announced is not None:
            rate, delay_mean, horizon = req.announced
            law = exponential_delays(delay_mean)
            tau, hit, n_atoms = self.simulation.simulate_announced(rate, law, horizon, n_paths, seed)
            table = self._tau_table(tau, hit)
            table['n_atoms'] = n_atoms
            summary = {'átomos por escenario': float(n_atoms.mean()), 'fracción en átomos': float((hit != NO_ATOM).mean())}
            return CommandResult('simulate', table=table, summary=summary)

        z = req.azema
        path = self.simulation.azema_path(z.f_curve, z.obs_times, z.noise, z.prior, seed, z.horizon, z.step)
        summary = {'X': path.x_true, 'saltos de Z': [float(j) for j in path.jumps],
                   'posterior p_low': path.posterior.p_low}
        return CommandResult('simulate', table=pd.DataFrame({'t': path.times, 'Z': path.Z}), summary=summary)

    @staticmethod
    def _tau_table(tau: np.ndarray, hit: np.ndarray) -> pd.DataFrame:
        return pd.DataFrame({
            'path_id': np.arange(tau.size),
            'tau': tau,
            'hit_atom': pd.array(np.where(hit == NO_ATOM, None, hit), dtype='Int64'),
        })

    # ------------------------------------------------------------------
    # verify
    # ------------------------------------------------------------------
    def run_verify(self, req: VerifyRequest, seed: int = 0) -> CommandResult:
        if req.kind == 'general':
            report = self._verify_general(req, seed)
        elif req.kind == 'merton':
            report = self._verify_merton(req)
        else:
            report = self._verify_affine(req, seed)
        status = "✅ sin arbitraje detectado" if report.passed else "❌ condición violada"
        logger.info(f"Verificación {report.label}: {status}")
        return CommandResult('verify', report=report, summary={'pass': report.passed})

    def _verify_general(self, req: VerifyRequest, seed: int) -> VerificationReport:
        spec, rate = req.spec, req.rate
        if req.f_diag is None:
            f_diag = lambda t: float(rate(t)) + float(spec.hazard(t))
        else:
            f_diag = lambda t: float(req.f_diag)
        report = self.verifier.verify_general_drift(req.coefficients, spec, rate, f_diag, req.grid, req.tol)
        if req.martingale is not None:
            path = HazardPath(
                lam=spec.hazard,
                atoms=tuple(HazardAtom(e.time, e.lam_prime) for e in spec.schedule),
                horizon=spec.horizon,
            )
            report.martingale = self._martingale(
                req.martingale, DeterministicPricingModel(path, rate), DeterministicPathSampler(path, rate), seed,
            )
        return report

    def _verify_merton(self, req: VerifyRequest) -> VerificationReport:
        r = float(req.rate(0.0))
        conditions: List[ConditionReport] = []
        for W in req.merton_states:
            provider = MertonAtomDriftProvider(W, req.merton_U, req.merton_K, r)
            sub = self.verifier.verify_merton_drift(provider, None, req.rate, req.grid, req.tol, label=f"merton W={W}")
            cond = sub.condition('dcm2')
            cond.argmax = {**cond.argmax, 'W': float(W)}
            conditions.append(cond)
        return VerificationReport(label='merton', conditions=conditions)

    def _verify_affine(self, req: VerifyRequest, seed: int) -> VerificationReport:
        model = req.affine
        report = self.verifier.verify_affine_drift(
            self.affine_engine, model.params, model.loadings, model.schedule,
            req.affine_states, req.grid, req.step,
        )
        if req.martingale is not None:
            m = req.martingale
            factory = AffinePricingModel.with_mispriced_atoms if m.mispriced else AffinePricingModel
            pricing = factory(self.affine_engine, model.params, model.loadings, model.schedule, req.step)
            x0 = m.x0 if m.x0 is not None else req.affine_states[0]
            sampler = AffinePathSampler(
                self.affine_engine, model.params, model.loadings, model.schedule, x0, self.affine_engine.euler_dt,
            )
            report.martingale = self._martingale(m, pricing, sampler, seed)
        return report

    def _martingale(self, m: MartingaleRequest, model, sampler, seed: int) -> MartingaleReport:
        n_paths = m.n_paths or self.default_paths
        return self.verifier.martingale_mc_test(model, sampler, m.t_grid, m.T, n_paths, seed)
