"""
CLI de RiskyTimes.

Uso:
    # Curva P(t,T) con átomos
    python -m src.presentation.console.console_app curve --config scenarios/curve_one_atom.json

    # Precios afines (CIR) en JSON
    python -m src.presentation.console.console_app affine --config scenarios/affine_cir.json --format json

    # Filtro de Merton con noticia (requiere semilla)
    python -m src.presentation.console.console_app filter --config scenarios/filter_news.json --seed 7

    # Verificación de no arbitraje; código de salida 1 si alguna condición falla
    python -m src.presentation.console.console_app verify --config scenarios/verify_cir.json --seed 1

Códigos de salida: 0 éxito, 1 verificación fallida, 2 error de uso o de entrada.
"""
from __future__ import annotations
import argparse
import io
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.application.orchestrators.command_orchestrator import CommandResult
from src.domain.exceptions.domain_exception import DomainException
from src.domain.value_objects.run_status import CommandName, ExitCode, OutputFormat
from src.infrastructure.config.settings import AppConfig, get_config
from src.infrastructure.di.container import ApplicationContainer
from src.infrastructure.logging.log_config import setup_logging
from src.infrastructure.logging.logger_factory import get_run_logger

if sys.platform == 'win32':
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8', errors='replace')

logger = logging.getLogger(__name__)

COMMANDS = {
    'curve': 'Precios P(t,T) de una superficie forward con átomos',
    'affine': 'Solución de Riccati y precios del modelo afín',
    'filter': 'Corrida sintética del filtro de Merton con noticia',
    'simulate': 'Simulación de tiempos de default o de la supermartingala de Azéma',
    'verify': 'Condiciones de deriva y prueba de martingala',
}


class UsageError(Exception):
    """Argumentos de la CLI inconsistentes con el escenario."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(int(ExitCode.ERROR_ENTRADA), f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='riskytimes', description='Estructuras de plazo con tiempos riesgosos')
    parser.add_argument('--log-level', default=None, help='Nivel de log (por defecto el de config)')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_ArgumentParser)
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument('--config', '--input', dest='config', required=True,
                       help="Escenario JSON/YAML ('-' para stdin)")
        p.add_argument('--seed', type=int, default=None, help='Semilla (obligatoria en comandos estocásticos)')
        p.add_argument('--out', type=Path, default=None, help='Archivo de salida (stdout si se omite)')
        p.add_argument('--format', choices=['csv', 'json', 'xlsx'], default=None)
        p.add_argument('--paths', type=int, default=None, help='Trayectorias Monte Carlo por defecto')
        p.add_argument('--step', type=float, default=None, help='Paso de RK4 / Euler / filtro')
        p.add_argument('--tol', type=float, default=None, help='Tolerancia de forma cerrada')
    return parser


def apply_overrides(config: AppConfig, args: argparse.Namespace) -> AppConfig:
    """Los flags de la CLI tienen prioridad sobre YAML y variables de entorno."""
    for name, value in (('paths', args.paths), ('step', args.step), ('tol', args.tol)):
        if value is not None and value <= 0:
            raise UsageError(f"--{name} debe ser positivo: {value}")
    numerics: Dict[str, Any] = {}
    monte_carlo: Dict[str, Any] = {}
    filtro: Dict[str, Any] = {}
    if args.step is not None:
        numerics['riccati_step'] = args.step
        monte_carlo['euler_step'] = args.step
        filtro['dt'] = args.step
    if args.tol is not None:
        numerics['closed_form_tol'] = args.tol
    if args.paths is not None:
        monte_carlo['n_paths'] = args.paths
    return config.with_overrides(numerics=numerics, monte_carlo=monte_carlo, filter=filtro)


def _needs_seed(command: str, request: Any) -> bool:
    return CommandName.from_string(command).es_estocastico or getattr(request, 'martingale', None) is not None


def _read_scenario(container: ApplicationContainer, source: str) -> tuple[Dict[str, Any], str]:
    reader = container.scenario_reader()
    if source == '-':
        return reader.parse(sys.stdin.read(), '<stdin>'), '<stdin>'
    ruta = Path(source)
    return reader.read(ruta), ruta.name


def write_result(container: ApplicationContainer, result: CommandResult, fmt: str, out: Optional[Path]) -> None:
    exporter = container.exporter(fmt)
    destino = container.path_manager().output_path(result.command, fmt, out)
    if result.report is not None:
        texto = exporter.exportar_reporte({**result.report.to_dict(), 'rows': result.report.to_rows()}, destino)
    else:
        texto = exporter.exportar_tabla(result.table, destino)
    if texto is not None:
        sys.stdout.write(texto)
        sys.stdout.flush()


def run(argv: Optional[List[str]] = None, config: Optional[AppConfig] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = config or get_config()
    setup_logging(config, args.log_level)
    run_logger = get_run_logger(args.command)

    try:
        config = apply_overrides(config, args)
        container = ApplicationContainer(config)
        fmt = OutputFormat.from_string(args.format or config.output.default_format).value

        data, source_name = _read_scenario(container, args.config)
        request = container.mapper_factory().get_mapper(args.command).mapear(data, source_name)
        if _needs_seed(args.command, request) and args.seed is None:
            raise UsageError(f"El comando '{args.command}' requiere --seed")

        result = container.orchestrator().run(args.command, request, args.seed or 0)
        write_result(container, result, fmt, args.out)

    except (UsageError, DomainException, OSError, ValueError) as e:
        run_logger.error(f"❌ {e}")
        return int(ExitCode.ERROR_ENTRADA)
    except Exception:
        # Errores internos: se registran con traza y se propagan
        run_logger.exception("❌ Error inesperado")
        raise

    codigo = ExitCode.from_passed(result.passed)
    if codigo.es_exitoso:
        run_logger.info("✅ Comando finalizado")
    else:
        run_logger.warning("⚠️ Verificación fallida")
    return int(codigo)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
