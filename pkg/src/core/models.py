# ABOUTME: Core domain models for relay-secrecy
# ABOUTME: Data structures for relay networks, fading draws, expansions, estimates and experiments

import math
from dataclasses import dataclass, field, replace
from typing import Optional, List, Tuple, Union
from enum import Enum

import numpy as np

from .exceptions import ValidationError

ArrayLike = Union[float, np.ndarray]

class Strategy(Enum):
    """Relaying strategy"""
    SDF = "SDF"
    SAF = "SAF"
    OPA_DF = "OPA-DF"

class AfVariant(Enum):
    """Relay SNR model used when simulating S-AF"""
    APPROX_PRODUCT = "APPROX-PRODUCT"
    EXACT_APS = "EXACT-APS"

class Metric(Enum):
    """Metrics emitted by an experiment"""
    ASR = "asr"
    OUTAGE = "outage"
    BOTH = "both"

    def expand(self) -> List['Metric']:
        """Concrete metrics covered by this selection"""
        if self is Metric.BOTH:
            return [Metric.ASR, Metric.OUTAGE]
        return [self]

class Gamma0Policy(Enum):
    """How the OPA total power is chosen"""
    RELAY_AVERAGE = "relay-average"
    TOTAL = "total"
    FIXED = "fixed"

def _require_positive_finite(name: str, value: float):
    """Raise ValidationError unless value is a strictly positive finite number"""
    if not (isinstance(value, (int, float, np.floating, np.integer))
            and math.isfinite(value) and value > 0):
        raise ValidationError("must be strictly positive and finite", field=name, value=value)

@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for adaptive quadrature"""
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        _require_positive_finite("abs_tol", self.abs_tol)
        _require_positive_finite("rel_tol", self.rel_tol)
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ValidationError("must be a positive integer", field="max_subdivisions",
                                  value=self.max_subdivisions)

@dataclass(frozen=True)
class RelayLinkParams:
    """Rate parameters of one relay's second-hop links"""
    lambda_m: float
    lambda_e: float
    gamma_avg: float

    def __post_init__(self):
        _require_positive_finite("lambda_m", self.lambda_m)
        _require_positive_finite("lambda_e", self.lambda_e)
        _require_positive_finite("gamma_avg", self.gamma_avg)

    @property
    def alpha(self) -> float:
        """Pole offset λ_e/λ_m of the DF survival function"""
        return self.lambda_e / self.lambda_m

@dataclass(frozen=True)
class NetworkConfig:
    """Ordered set of relays between source and destination"""
    relays: Tuple[RelayLinkParams, ...]

    def __post_init__(self):
        object.__setattr__(self, 'relays', tuple(self.relays))
        if len(self.relays) < 1:
            raise ValidationError("network needs at least one relay", field="relays", value=0)

    @classmethod
    def iid(cls, relays: int, lambda_m: float, lambda_e: float,
            gamma_avg: Optional[float] = None) -> 'NetworkConfig':
        """Create a network of identical relays"""
        if relays < 1:
            raise ValidationError("network needs at least one relay", field="relays", value=relays)
        if gamma_avg is None:
            gamma_avg = 1.0 / lambda_m
        link = RelayLinkParams(lambda_m=lambda_m, lambda_e=lambda_e, gamma_avg=gamma_avg)
        return cls(relays=tuple([link] * relays))

    @property
    def size(self) -> int:
        """Number of relays N"""
        return len(self.relays)

    @property
    def is_iid(self) -> bool:
        """True iff all relays have identical parameters"""
        return all(relay == self.relays[0] for relay in self.relays)

    @property
    def lambda_m(self) -> np.ndarray:
        return np.array([relay.lambda_m for relay in self.relays])

    @property
    def lambda_e(self) -> np.ndarray:
        return np.array([relay.lambda_e for relay in self.relays])

    @property
    def gamma_avg(self) -> np.ndarray:
        return np.array([relay.gamma_avg for relay in self.relays])

@dataclass
class ChannelRealization:
    """Instantaneous SNRs of one or more fading draws; the last axis indexes relays"""
    gamma_sr: np.ndarray
    gamma_rd: np.ndarray
    gamma_re: np.ndarray

    def __post_init__(self):
        self.gamma_sr = np.asarray(self.gamma_sr, dtype=float)
        self.gamma_rd = np.asarray(self.gamma_rd, dtype=float)
        self.gamma_re = np.asarray(self.gamma_re, dtype=float)
        if not (self.gamma_sr.shape == self.gamma_rd.shape == self.gamma_re.shape):
            raise ValidationError("SNR arrays must share one shape", field="gamma_sr",
                                  value=(self.gamma_sr.shape, self.gamma_rd.shape, self.gamma_re.shape))
        if self.gamma_sr.ndim < 1 or self.gamma_sr.shape[-1] < 1:
            raise ValidationError("realization needs at least one relay", field="gamma_sr")
        if (np.any(self.gamma_sr < 0) or np.any(self.gamma_rd < 0) or np.any(self.gamma_re < 0)):
            raise ValidationError("SNRs must be non-negative", field="gamma")

    @property
    def size(self) -> int:
        """Number of relays N"""
        return self.gamma_sr.shape[-1]

@dataclass
class ComplexRealization:
    """Complex second-hop gains; the last axis indexes relays"""
    h_rd: np.ndarray
    h_re: np.ndarray

    def __post_init__(self):
        self.h_rd = np.asarray(self.h_rd, dtype=complex)
        self.h_re = np.asarray(self.h_re, dtype=complex)
        if self.h_rd.shape != self.h_re.shape:
            raise ValidationError("gain arrays must share one shape", field="h_rd",
                                  value=(self.h_rd.shape, self.h_re.shape))

@dataclass(frozen=True)
class PartialFractionTerm:
    """One term ς e^{−β(z−1)}/(z+α)^mult of the survival-function expansion"""
    sigma: float
    beta: float
    alpha: float
    mult: int = 1

    def __post_init__(self):
        _require_positive_finite("beta", self.beta)
        _require_positive_finite("alpha", self.alpha)
        if self.mult < 1:
            raise ValidationError("pole multiplicity must be at least 1", field="mult", value=self.mult)

    def evaluate(self, z: ArrayLike) -> ArrayLike:
        """Value of the term at z"""
        z = np.asarray(z, dtype=float)
        return self.sigma * np.exp(-self.beta * (z - 1.0)) / (z + self.alpha) ** self.mult

@dataclass
class Expansion:
    """Partial-fraction expansion of 1 − F_max(z) for z ≥ 1"""
    terms: List[PartialFractionTerm] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def max_multiplicity(self) -> int:
        return max((term.mult for term in self.terms), default=0)

    def evaluate(self, z: ArrayLike) -> ArrayLike:
        """Sum of all terms at z"""
        z = np.asarray(z, dtype=float)
        total = np.zeros_like(z)
        for term in self.terms:
            total = total + term.evaluate(z)
        return total if total.ndim else float(total)

@dataclass(frozen=True)
class AfModel:
    """Amplify-and-forward simulation model"""
    variant: AfVariant = AfVariant.APPROX_PRODUCT
    first_hop_boost_db: float = 0.0
    shared_first_hop: bool = True

    def __post_init__(self):
        if not isinstance(self.variant, AfVariant):
            raise ValidationError("unknown AF variant", field="variant", value=self.variant)
        if not math.isfinite(self.first_hop_boost_db):
            raise ValidationError("must be finite", field="first_hop_boost_db",
                                  value=self.first_hop_boost_db)

    @property
    def boost_factor(self) -> float:
        """Linear first-hop boost"""
        return 10.0 ** (self.first_hop_boost_db / 10.0)

@dataclass
class SelectionOutcome:
    """Result of opportunistic relay selection for one or more draws"""
    relay_index: np.ndarray
    z_value: np.ndarray
    rate: np.ndarray

@dataclass(frozen=True)
class EstimateWithCI:
    """Monte Carlo estimate with its standard error"""
    mean: float
    std_error: float
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("at least one trial is required", field="trials", value=self.trials)
        if self.std_error < 0:
            raise ValidationError("standard error must be non-negative", field="std_error",
                                  value=self.std_error)

    def contains(self, value: float, multiplier: float = 3.0, slack: float = 0.0) -> bool:
        """True if value lies within the confidence interval"""
        return abs(value - self.mean) <= multiplier * self.std_error + slack

@dataclass
class OpaProblem:
    """Power allocation problem for one realization"""
    h_m: np.ndarray
    h_e: np.ndarray
    gamma0: float

    def __post_init__(self):
        self.h_m = np.asarray(self.h_m, dtype=complex).ravel()
        self.h_e = np.asarray(self.h_e, dtype=complex).ravel()
        if self.h_m.size < 1 or self.h_m.shape != self.h_e.shape:
            raise ValidationError("h_m and h_e must be equal-length non-empty vectors", field="h_m")
        _require_positive_finite("gamma0", self.gamma0)

    @property
    def size(self) -> int:
        return self.h_m.size

    def objective(self, w: np.ndarray) -> float:
        """(1 + w^H R_m w)/(1 + w^H R_e w) for a weight vector"""
        w = np.asarray(w, dtype=complex)
        main = abs(np.vdot(self.h_m, w)) ** 2
        eve = abs(np.vdot(self.h_e, w)) ** 2
        return float((1.0 + main) / (1.0 + eve))

@dataclass
class OpaSolution:
    """Optimal beamforming weights and the resulting secrecy rate"""
    w: np.ndarray
    rate: float
    objective: float

@dataclass(frozen=True)
class OpaComparison:
    """Paired OPA-DF vs S-DF estimates over the same realizations"""
    opa: EstimateWithCI
    selection: EstimateWithCI
    gap: EstimateWithCI
    dominance_fraction: float

@dataclass(frozen=True)
class SweepAxis:
    """Main-channel average SNR grid in dB"""
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValidationError("step must be positive", field="sweep.step", value=self.step)
        if self.start > self.stop:
            raise ValidationError("start must not exceed stop", field="sweep.start", value=self.start)

    def points(self) -> List[float]:
        """Grid points from start to stop inclusive"""
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 12) for i in range(count)]

@dataclass(frozen=True)
class RelayOffset:
    """Per-relay dB offsets from the swept main SNR and the eavesdropper SNR"""
    main_offset_db: float = 0.0
    eve_offset_db: float = 0.0

@dataclass(frozen=True)
class CurveSpec:
    """One curve of a multi-curve experiment; relays=None keeps the experiment's network"""
    strategy: Strategy
    relays: Optional[Tuple[RelayOffset, ...]] = None

@dataclass
class ExperimentSpec:
    """Validated experiment description"""
    relays: List[RelayOffset]
    strategy: Strategy = Strategy.SDF
    af_model: AfModel = field(default_factory=AfModel)
    sweep: SweepAxis = field(default_factory=lambda: SweepAxis(0.0, 20.0, 5.0))
    gamma_e_db: float = 10.0
    target_rate: float = 0.5
    trials: int = 1000000
    seed: int = 2024
    outputs: Metric = Metric.BOTH
    normalize_awgn: bool = False
    workers: Optional[int] = None
    decoding_threshold: float = 0.0
    gamma0_policy: Gamma0Policy = Gamma0Policy.RELAY_AVERAGE
    gamma0: Optional[float] = None
    curves: List[CurveSpec] = field(default_factory=list)

    @property
    def relay_count(self) -> int:
        return len(self.relays)

    def curve_specs(self) -> List[Tuple[str, "ExperimentSpec"]]:
        """(label, single-curve spec) per curve; the spec itself, labeled by strategy, when none are listed"""
        if not self.curves:
            return [(self.strategy.value, self)]
        specs = []
        for curve in self.curves:
            relays = list(curve.relays) if curve.relays is not None else self.relays
            spec = replace(self, strategy=curve.strategy, relays=relays, curves=[])
            specs.append((f"{curve.strategy.value} N={len(relays)}", spec))
        return specs

@dataclass
class ResultRow:
    """One CSV row: a (sweep point, metric) pair"""
    snr_db: float
    strategy: str
    metric: str
    analytic_value: Optional[float]
    mc_mean: Optional[float]
    mc_std_error: Optional[float]
    trials: int
    seed: int
