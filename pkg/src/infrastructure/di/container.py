from __future__ import annotations
from typing import Optional

# Config
from src.infrastructure.config.settings import AppConfig, get_config

# Servicios numéricos
from src.application.services.affine_engine_service import AffineEngineService
from src.application.services.default_simulation_service import DefaultSimulationService
from src.application.services.merton_filter_service import MertonFilterService
from src.application.services.noarb_verifier_service import NoArbitrageVerifierService
from src.application.services.term_structure_service import TermStructureService

# Escenarios y orquestación
from src.application.interfaces.i_result_exporter import IResultExporter
from src.application.orchestrators.command_orchestrator import CommandOrchestrator
from src.application.processors.scenario.scenario_file_reader import ScenarioFileReader
from src.application.processors.scenario.scenario_mapper_factory import ScenarioMapperFactory

# Infraestructura
from src.infrastructure.excel.excel_exporter import XlsxResultExporter
from src.infrastructure.excel.excel_styler import ExcelStyler
from src.infrastructure.export.csv_exporter import CsvResultExporter
from src.infrastructure.export.json_exporter import JsonResultExporter
from src.infrastructure.file_system.path_manager import PathManager


class ApplicationContainer:
    """
    Contenedor de dependencias: servicios como singletons construidos desde AppConfig.
    """

    def __init__(self, config: Optional[AppConfig] = None):
        self._config = config
        self._term_structure: Optional[TermStructureService] = None
        self._affine_engine: Optional[AffineEngineService] = None
        self._filter: Optional[MertonFilterService] = None
        self._simulation: Optional[DefaultSimulationService] = None
        self._verifier: Optional[NoArbitrageVerifierService] = None

    # ---------- Config ----------
    def config(self) -> AppConfig:
        if self._config is None:
            self._config = get_config()
        return self._config

    # ====== SERVICIOS ======
    def term_structure(self) -> TermStructureService:
        if self._term_structure is None:
            self._term_structure = TermStructureService()
        return self._term_structure

    def affine_engine(self) -> AffineEngineService:
        if self._affine_engine is None:
            conf = self.config()
            self._affine_engine = AffineEngineService(
                riccati_step=conf.numerics.riccati_step,
                euler_step=conf.monte_carlo.euler_step,
            )
        return self._affine_engine

    def filter_service(self) -> MertonFilterService:
        if self._filter is None:
            self._filter = MertonFilterService(dt=self.config().filter.dt)
        return self._filter

    def simulation(self) -> DefaultSimulationService:
        if self._simulation is None:
            mc = self.config().monte_carlo
            self._simulation = DefaultSimulationService(block_size=mc.block_size, workers=mc.workers)
        return self._simulation

    def verifier(self) -> NoArbitrageVerifierService:
        if self._verifier is None:
            conf = self.config()
            self._verifier = NoArbitrageVerifierService(
                quadrature_nodes=conf.numerics.quadrature_nodes,
                closed_form_tol=conf.numerics.closed_form_tol,
                grid_tol_factor=conf.numerics.grid_tol_factor,
                z_threshold=conf.monte_carlo.z_threshold,
                min_paths=conf.monte_carlo.min_paths,
                block_size=conf.monte_carlo.block_size,
                workers=conf.monte_carlo.workers,
            )
        return self._verifier

    # ====== ESCENARIOS ======
    def scenario_reader(self) -> ScenarioFileReader:
        return ScenarioFileReader()

    def mapper_factory(self) -> type[ScenarioMapperFactory]:
        return ScenarioMapperFactory

    # ====== SALIDA ======
    def path_manager(self) -> PathManager:
        return PathManager(self.config())

    def exporter(self, fmt: str) -> IResultExporter:
        if fmt == 'csv':
            return CsvResultExporter(float_digits=self.config().output.float_digits)
        if fmt == 'json':
            return JsonResultExporter()
        if fmt == 'xlsx':
            return XlsxResultExporter(ExcelStyler())
        raise ValueError(f"Formato de salida desconocido: {fmt}")

    # ====== ORQUESTADOR ======
    def orchestrator(self) -> CommandOrchestrator:
        conf = self.config()
        return CommandOrchestrator(
            term_structure=self.term_structure(),
            affine_engine=self.affine_engine(),
            filter_service=self.filter_service(),
            simulation=self.simulation(),
            verifier=self.verifier(),
            default_paths=conf.monte_carlo.n_paths,
            coverage_level=conf.filter.coverage_level,
        )
