# ABOUTME: Sweep execution for relay-secrecy experiments
# ABOUTME: Pairs analytic values with Monte Carlo estimates for every SNR point and metric

import math
from typing import List, Optional, Tuple

from ..analytics.services.closed_form import (
    asr_af_closed, asr_df_closed, asr_quadrature_oracle, outage_probability,
)
from ..channel.fading import network_for_snr
from ..core.exceptions import (
    ExperimentError, PoleClusteringError, RelayCountError, RelaySecrecyError,
)
from ..core.models import (
    AfVariant, EstimateWithCI, ExperimentSpec, Metric, NetworkConfig, ResultRow, Strategy,
)
from ..shared.logger import get_logger
from ..simulation.montecarlo import estimate_from_rates, outage_from_rates, simulate_rates
from ..simulation.opa import paired_rates, resolve_gamma0

logger = get_logger(__name__)

class ExperimentRunner:
    """Runs one single-curve experiment spec over its SNR sweep"""

    def __init__(self, spec: ExperimentSpec, include_mc: bool = True,
                 include_analytic: bool = True, label: Optional[str] = None):
        self.spec = spec
        self.include_mc = include_mc
        self.include_analytic = include_analytic
        self.label = label or spec.strategy.value

    def run(self) -> List[ResultRow]:
        """Rows for every sweep point, in sweep order then metric order"""
        rows: List[ResultRow] = []
        for snr_db in self.spec.sweep.points():
            logger.sweep_point(self.label, snr_db, self.spec.relay_count)
            try:
                rows.extend(self.run_point(snr_db))
            except RelaySecrecyError as e:
                raise ExperimentError(f"Sweep point failed: {e.message}",
                                      strategy=self.label, snr_db=snr_db,
                                      details={'cause': e.code}) from e
        return rows

    def run_point(self, snr_db: float) -> List[ResultRow]:
        """Rows for one main-channel SNR"""
        spec = self.spec
        network = network_for_snr(snr_db, spec.gamma_e_db, spec.relays)
        scale = self._normalization(snr_db)
        metrics = spec.outputs.expand()

        asr_mc, outage_mc = self._simulate(network) if self.include_mc else (None, None)

        rows = []
        for metric in metrics:
            if metric is Metric.ASR:
                analytic = self._analytic_asr(network) if self.include_analytic else None
                estimate = asr_mc
                factor = scale
            else:
                analytic = self._analytic_outage(network) if self.include_analytic else None
                estimate = outage_mc
                factor = 1.0
            rows.append(ResultRow(
                snr_db=snr_db,
                strategy=self.label,
                metric=metric.value,
                analytic_value=None if analytic is None else analytic * factor,
                mc_mean=None if estimate is None else estimate.mean * factor,
                mc_std_error=None if estimate is None else estimate.std_error * factor,
                trials=spec.trials,
                seed=spec.seed,
            ))
        return rows

    def _normalization(self, snr_db: float) -> float:
        """ASR scale 1/ln(1 + γ̄) when reporting relative to the AWGN capacity"""
        if not self.spec.normalize_awgn:
            return 1.0
        return 1.0 / math.log1p(10.0 ** (snr_db / 10.0))

    def _simulate(self, network: NetworkConfig) -> Tuple[EstimateWithCI, EstimateWithCI]:
        """One simulation per point; ASR and outage share the same rate samples"""
        spec = self.spec
        if spec.strategy is Strategy.OPA_DF:
            gamma0 = resolve_gamma0(network, spec.gamma0_policy, spec.gamma0)
            rates = paired_rates(network, spec.trials, spec.seed, gamma0, spec.workers)[:, 0]
        else:
            rates = simulate_rates(network, spec.strategy, spec.trials, spec.seed,
                                   af_model=spec.af_model, workers=spec.workers,
                                   decoding_threshold=spec.decoding_threshold)
        asr = estimate_from_rates(rates, spec.seed)
        outage = outage_from_rates(rates, spec.target_rate, spec.seed)
        logger.mc_estimate(f"ASR {spec.strategy.value}", asr.mean, asr.std_error, spec.trials)
        return asr, outage

    def _analytic_available(self) -> bool:
        spec = self.spec
        if spec.strategy is Strategy.OPA_DF:
            return False
        if spec.strategy is Strategy.SDF:
            # closed forms assume every relay decodes
            return spec.decoding_threshold == 0.0
        # the closed form models the product first hop
        return spec.af_model.variant is AfVariant.APPROX_PRODUCT

    def _analytic_asr(self, network: NetworkConfig) -> Optional[float]:
        if not self._analytic_available():
            return None
        spec = self.spec
        shared = spec.af_model.shared_first_hop
        if spec.strategy is Strategy.SAF and not shared:
            return asr_quadrature_oracle(network, Strategy.SAF, shared_first_hop=False)
        try:
            if spec.strategy is Strategy.SDF:
                return asr_df_closed(network)
            return asr_af_closed(network)
        except (RelayCountError, PoleClusteringError) as e:
            logger.warning(f"Closed form unavailable for {network.size} relays ({e.code}); "
                           f"using the quadrature oracle")
            return asr_quadrature_oracle(network, spec.strategy, shared_first_hop=shared)

    def _analytic_outage(self, network: NetworkConfig) -> Optional[float]:
        if not self._analytic_available():
            return None
        spec = self.spec
        return outage_probability(network, spec.strategy, spec.target_rate,
                                  shared_first_hop=spec.af_model.shared_first_hop)

def run_experiment(spec: ExperimentSpec, include_mc: bool = True,
                   include_analytic: bool = True) -> List[ResultRow]:
    """Run a full sweep for every curve, curve by curve"""
    rows: List[ResultRow] = []
    for label, curve_spec in spec.curve_specs():
        rows.extend(ExperimentRunner(curve_spec, include_mc, include_analytic, label).run())
    return rows
