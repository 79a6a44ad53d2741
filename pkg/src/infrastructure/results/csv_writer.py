# ABOUTME: Stable CSV emission for sweep results
# ABOUTME: Fixed column order, 17 significant digits, LF line endings, plus a plotting script stub

from pathlib import Path
from typing import List, Optional

import pandas as pd

from ...core.models import ResultRow
from ...shared.config import config
from ...shared.logger import get_logger

logger = get_logger(__name__)

CSV_COLUMNS = ['snr_db', 'strategy', 'metric', 'analytic', 'mc_mean', 'mc_stderr', 'trials', 'seed']
FLOAT_COLUMNS = ['snr_db', 'analytic', 'mc_mean', 'mc_stderr']

PLOT_SCRIPT_TEMPLATE = '''\
# Plot sweep results from {csv_name}
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

csv_file = Path(__file__).with_name("{csv_name}")
df = pd.read_csv(csv_file)

for metric, group in df.groupby("metric"):
    plt.figure(figsize=(8, 5))
    for strategy, curve in group.groupby("strategy"):
        if curve["analytic"].notna().any():
            plt.plot(curve["snr_db"], curve["analytic"], linewidth=2, label=f"{{strategy}} analytic")
        if curve["mc_mean"].notna().any():
            plt.errorbar(curve["snr_db"], curve["mc_mean"], yerr=3 * curve["mc_stderr"],
                         fmt="o", capsize=3, label=f"{{strategy}} Monte Carlo")
    plt.xlabel("Main-channel average SNR (dB)")
    plt.ylabel("Average secrecy rate (nats)" if metric == "asr" else "Secrecy outage probability")
    if metric == "outage":
        plt.yscale("log")
    plt.grid(True, alpha=0.3)
    plt.legend()
    plt.tight_layout()
    output = csv_file.with_name(f"{{csv_file.stem}}_{{metric}}.png")
    plt.savefig(output, dpi=150)
    plt.close()
    print(f"saved {{output}}", file=sys.stderr)
'''

def rows_to_frame(rows: List[ResultRow]) -> pd.DataFrame:
    """Result rows as a DataFrame in CSV column order"""
    records = [{
        'snr_db': row.snr_db,
        'strategy': row.strategy,
        'metric': row.metric,
        'analytic': row.analytic_value,
        'mc_mean': row.mc_mean,
        'mc_stderr': row.mc_std_error,
        'trials': row.trials,
        'seed': row.seed,
    } for row in rows]
    return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)

def _format_float(value) -> str:
    return "" if value is None or pd.isna(value) else format(float(value), ".17g")

def render_csv(rows: List[ResultRow]) -> str:
    """CSV text; floats carry 17 significant digits and missing analytic or MC columns are empty"""
    frame = rows_to_frame(rows)
    for column in FLOAT_COLUMNS:
        frame[column] = frame[column].map(_format_float)
    return frame.to_csv(index=False, lineterminator="\n")

class ResultWriter:
    """Writes sweep CSVs and their plotting stubs"""

    def __init__(self, results_dir: Optional[Path] = None):
        self.results_dir = Path(results_dir or config.results_dir)

    def resolve(self, path: Path) -> Path:
        """Relative paths land in the results directory"""
        path = Path(path)
        return path if path.is_absolute() or path.parent != Path('.') else self.results_dir / path

    def write(self, rows: List[ResultRow], path: Path) -> Path:
        """Write rows as CSV"""
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8', newline='') as handle:
            handle.write(render_csv(rows))
        logger.info(f"Wrote {len(rows)} rows to {target}")
        return target

    def write_plot_script(self, csv_path: Path) -> Path:
        """Write a matplotlib script next to the CSV that draws its curves"""
        csv_path = Path(csv_path)
        script = csv_path.with_name(f"plot_{csv_path.stem}.py")
        script.write_text(PLOT_SCRIPT_TEMPLATE.format(csv_name=csv_path.name), encoding='utf-8')
        logger.debug(f"Plot script stub: {script}")
        return script
