# ABOUTME: Static charts for sweep results
# ABOUTME: Draws analytic curves with Monte Carlo error bars from a results CSV

from pathlib import Path
from typing import List

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

from ...core.exceptions import ValidationError
from ...shared.logger import get_logger
from .csv_writer import CSV_COLUMNS

logger = get_logger(__name__)

METRIC_LABELS = {
    'asr': "Average secrecy rate (nats)",
    'outage': "Secrecy outage probability",
}

class SweepPlotter:
    """
    Creates one PNG per metric from a sweep CSV.
    Analytic values are lines; Monte Carlo means carry ±3σ error bars.
    """

    def __init__(self, csv_file: Path):
        self.csv_file = Path(csv_file)
        self.df = pd.read_csv(self.csv_file)
        missing = [column for column in CSV_COLUMNS if column not in self.df.columns]
        if missing:
            raise ValidationError(f"results CSV lacks columns {', '.join(missing)}",
                                  field="csv", value=str(self.csv_file))
        logger.debug(f"Loaded {len(self.df)} result rows from {self.csv_file}")

    def plot_metric(self, metric: str, output_file: Path) -> bool:
        """Draw one metric; False when the CSV has no rows for it"""
        group = self.df[self.df['metric'] == metric]
        if group.empty:
            return False

        plt.figure(figsize=(8, 5))
        for strategy, curve in group.groupby('strategy'):
            curve = curve.sort_values('snr_db')
            if curve['analytic'].notna().any():
                plt.plot(curve['snr_db'], curve['analytic'], linewidth=2,
                         label=f"{strategy} analytic")
            if curve['mc_mean'].notna().any():
                plt.errorbar(curve['snr_db'], curve['mc_mean'], yerr=3 * curve['mc_stderr'],
                             fmt='o', capsize=3, label=f"{strategy} Monte Carlo")

        plt.xlabel("Main-channel average SNR (dB)", fontsize=12)
        plt.ylabel(METRIC_LABELS.get(metric, metric), fontsize=12)
        if metric == 'outage' and (group[['analytic', 'mc_mean']] > 0).any().any():
            plt.yscale('log')
        plt.grid(True, alpha=0.3)
        plt.legend()
        plt.tight_layout()
        plt.savefig(output_file, dpi=150, bbox_inches='tight')
        plt.close()
        logger.info(f"Chart saved to {output_file}")
        return True

    def plot_all(self) -> List[Path]:
        """Charts for every metric present, written next to the CSV"""
        written = []
        for metric in sorted(self.df['metric'].unique()):
            output = self.csv_file.with_name(f"{self.csv_file.stem}_{metric}.png")
            if self.plot_metric(metric, output):
                written.append(output)
        return written
