# ABOUTME: Main entry point for relay-secrecy
# ABOUTME: Command-line interface for analytic curves, Monte Carlo runs, sweeps and the validation suite

import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional

import typer
from rich.console import Console
from rich.table import Table

# Add src to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.core.exceptions import RelaySecrecyError, exit_code_for
from src.core.models import ExperimentSpec, ResultRow, SweepAxis
from src.experiments.config_parser import apply_overrides, build_spec, load_config_file, parse_sweep
from src.experiments.runner import run_experiment
from src.experiments.validation import ValidationSuite
from src.infrastructure.results.csv_writer import ResultWriter, render_csv
from src.infrastructure.results.plots import SweepPlotter
from src.shared.config import config
from src.shared.logger import get_logger

app = typer.Typer(
    name="relay-secrecy",
    help="Secrecy rate and outage of relay selection over Rayleigh fading: closed forms, Monte Carlo and OPA",
    rich_markup_mode="rich"
)

logger = get_logger(__name__)
console = Console()

# Options shared by the experiment commands
CONFIG = typer.Option(None, "--config", "-c", help="TOML experiment file")
RELAYS = typer.Option(None, "--relays", "-n", help="Number of IID relays (replaces the config's network)")
GAMMA_E_DB = typer.Option(None, "--gamma-e-db", help="Eavesdropper average SNR in dB")
SNR_DB = typer.Option(None, "--snr-db", help="Main SNR sweep start:stop:step in dB, or one value")
STRATEGY = typer.Option(None, "--strategy", "-s", help="SDF, SAF or OPA-DF")
AF_MODEL = typer.Option(None, "--af-model", help="APPROX-PRODUCT or EXACT-APS")
BOOST_DB = typer.Option(None, "--first-hop-boost-db", help="EXACT-APS first-hop boost in dB")
TARGET_RATE = typer.Option(None, "--target-rate", help="Target secrecy rate for outage (nats)")
TRIALS = typer.Option(None, "--trials", "-t", help="Monte Carlo trials per point")
SEED = typer.Option(None, "--seed", help="Random seed")
OUT = typer.Option(None, "--out", "-o",
                   help="CSV output path (stdout when omitted); bare file names go under RESULTS_DIR")
NORMALIZE = typer.Option(False, "--normalize-awgn", help="Divide ASR by ln(1 + main SNR)")
WORKERS = typer.Option(None, "--workers", "-w", help="Monte Carlo worker threads")
THRESHOLD = typer.Option(None, "--decoding-threshold", help="S-DF first-hop decoding threshold")
GAMMA0_POLICY = typer.Option(None, "--gamma0-policy", help="OPA power: relay-average, total or fixed")
INDEPENDENT = typer.Option(False, "--independent-first-hop",
                           help="Give every AF relay its own first-hop draw")

@contextmanager
def handle_errors() -> Iterator[None]:
    """Report domain errors on stderr and exit with the mapped code"""
    try:
        yield
    except RelaySecrecyError as e:
        typer.echo(f"❌ {e}", err=True)
        logger.debug(f"{e.code}: {e.details}")
        raise typer.Exit(exit_code_for(e))

def load_spec(config_path: Optional[Path], relays: Optional[int], gamma_e_db: Optional[float],
              snr_db: Optional[str], strategy: Optional[str], af_model: Optional[str],
              boost_db: Optional[float], target_rate: Optional[float], trials: Optional[int],
              seed: Optional[int], normalize: bool, workers: Optional[int],
              threshold: Optional[float], gamma0_policy: Optional[str],
              independent: bool) -> ExperimentSpec:
    """Config file (if any) with command-line overrides applied, validated"""
    raw = load_config_file(config_path) if config_path else {}
    overrides = {
        'network.relays': relays,
        'channel.gamma_e_db': gamma_e_db,
        'sweep.*': parse_sweep(snr_db) if snr_db else None,
        'experiment.strategy': strategy,
        'af_model.variant': af_model,
        'af_model.first_hop_boost_db': boost_db,
        'experiment.target_rate': target_rate,
        'experiment.trials': trials,
        'experiment.seed': seed,
        'experiment.normalize_awgn': True if normalize else None,
        'experiment.workers': workers,
        'channel.decoding_threshold': threshold,
        'opa.gamma0_policy': gamma0_policy,
        'af_model.shared_first_hop': False if independent else None,
    }
    base_dir = config_path.parent if config_path else None
    return build_spec(apply_overrides(raw, overrides), base_dir)

def emit_rows(rows: List[ResultRow], out: Optional[Path]) -> Optional[Path]:
    """CSV to the given path, or to stdout"""
    if out is None:
        sys.stdout.write(render_csv(rows))
        return None
    return ResultWriter().write(rows, out)

def _fmt(value: Optional[float]) -> str:
    return "—" if value is None else f"{value:.6g}"

@app.command("analytic")
def analytic(
    config_path: Optional[Path] = CONFIG, relays: Optional[int] = RELAYS,
    gamma_e_db: Optional[float] = GAMMA_E_DB, snr_db: Optional[str] = SNR_DB,
    strategy: Optional[str] = STRATEGY, af_model: Optional[str] = AF_MODEL,
    boost_db: Optional[float] = BOOST_DB, target_rate: Optional[float] = TARGET_RATE,
    trials: Optional[int] = TRIALS, seed: Optional[int] = SEED, out: Optional[Path] = OUT,
    normalize: bool = NORMALIZE, workers: Optional[int] = WORKERS,
    threshold: Optional[float] = THRESHOLD, gamma0_policy: Optional[str] = GAMMA0_POLICY,
    independent: bool = INDEPENDENT,
):
    """Closed-form ASR and outage over the sweep (no simulation)"""
    with handle_errors():
        spec = load_spec(config_path, relays, gamma_e_db, snr_db, strategy, af_model, boost_db,
                         target_rate, trials, seed, normalize, workers, threshold, gamma0_policy,
                         independent)
        emit_rows(run_experiment(spec, include_mc=False), out)

@app.command("simulate")
def simulate(
    config_path: Optional[Path] = CONFIG, relays: Optional[int] = RELAYS,
    gamma_e_db: Optional[float] = GAMMA_E_DB, snr_db: Optional[str] = SNR_DB,
    strategy: Optional[str] = STRATEGY, af_model: Optional[str] = AF_MODEL,
    boost_db: Optional[float] = BOOST_DB, target_rate: Optional[float] = TARGET_RATE,
    trials: Optional[int] = TRIALS, seed: Optional[int] = SEED, out: Optional[Path] = OUT,
    normalize: bool = NORMALIZE, workers: Optional[int] = WORKERS,
    threshold: Optional[float] = THRESHOLD, gamma0_policy: Optional[str] = GAMMA0_POLICY,
    independent: bool = INDEPENDENT,
):
    """Monte Carlo and analytic values at one SNR point, as a table"""
    with handle_errors():
        spec = load_spec(config_path, relays, gamma_e_db, snr_db, strategy, af_model, boost_db,
                         target_rate, trials, seed, normalize, workers, threshold, gamma0_policy,
                         independent)
        if spec.sweep.start != spec.sweep.stop:
            logger.warning(f"simulate runs one point; using {spec.sweep.start:g} dB")
            spec.sweep = SweepAxis(spec.sweep.start, spec.sweep.start, 1.0)
        rows = run_experiment(spec)

        table = Table(title=f"{spec.strategy.value}, {spec.relay_count} relays, "
                            f"main {spec.sweep.start:g} dB, eve {spec.gamma_e_db:g} dB")
        table.add_column("Curve")
        table.add_column("Metric")
        table.add_column("Analytic", justify="right")
        table.add_column("MC mean", justify="right")
        table.add_column("MC σ", justify="right")
        table.add_column("Trials", justify="right")
        for row in rows:
            table.add_row(row.strategy, row.metric, _fmt(row.analytic_value), _fmt(row.mc_mean),
                          _fmt(row.mc_std_error), f"{row.trials:,}")
        console.print(table)
        if out is not None:
            emit_rows(rows, out)

@app.command("sweep")
def sweep(
    config_path: Optional[Path] = CONFIG, relays: Optional[int] = RELAYS,
    gamma_e_db: Optional[float] = GAMMA_E_DB, snr_db: Optional[str] = SNR_DB,
    strategy: Optional[str] = STRATEGY, af_model: Optional[str] = AF_MODEL,
    boost_db: Optional[float] = BOOST_DB, target_rate: Optional[float] = TARGET_RATE,
    trials: Optional[int] = TRIALS, seed: Optional[int] = SEED, out: Optional[Path] = OUT,
    normalize: bool = NORMALIZE, workers: Optional[int] = WORKERS,
    threshold: Optional[float] = THRESHOLD, gamma0_policy: Optional[str] = GAMMA0_POLICY,
    independent: bool = INDEPENDENT,
    plot: bool = typer.Option(False, "--plot", help="Also render PNG charts next to the CSV"),
):
    """Full sweep: analytic and Monte Carlo columns, CSV plus a plotting script stub"""
    with handle_errors():
        spec = load_spec(config_path, relays, gamma_e_db, snr_db, strategy, af_model, boost_db,
                         target_rate, trials, seed, normalize, workers, threshold, gamma0_policy,
                         independent)
        rows = run_experiment(spec)
        csv_path = emit_rows(rows, out)
        if csv_path is None:
            return
        writer = ResultWriter()
        script = writer.write_plot_script(csv_path)
        typer.echo(f"✅ {len(rows)} rows → {csv_path} (plot with: python {script})", err=True)
        if plot:
            for chart in SweepPlotter(csv_path).plot_all():
                typer.echo(f"📈 {chart}", err=True)

@app.command("validate")
def validate(
    trials: Optional[int] = TRIALS, seed: Optional[int] = SEED,
    workers: Optional[int] = WORKERS,
    check: Optional[List[str]] = typer.Option(None, "--check", help="Run only the named checks"),
):
    """Run the acceptance suite; exits non-zero if any check fails"""
    with handle_errors():
        suite = ValidationSuite(
            trials=trials or config.default_trials,
            seed=config.default_seed if seed is None else seed,
            workers=workers,
        )
        report = suite.run(only=check)

        table = Table(title=f"Validation ({suite.trials:,} trials, seed {suite.seed})")
        table.add_column("Check")
        table.add_column("Status")
        table.add_column("Value", justify="right")
        table.add_column("Limit", justify="right")
        table.add_column("Detail")
        for result in report.checks:
            status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
            table.add_row(result.name, status, f"{result.value:.3g}", f"{result.limit:.3g}",
                          result.detail)
        console.print(table)
        report.raise_for_failures()

if __name__ == "__main__":
    app()
