# ABOUTME: Centralized configuration management for relay-secrecy
# ABOUTME: Handles environment variables, numerical tolerances, and default values

import os
from typing import Optional
from dotenv import load_dotenv
from pathlib import Path

from ..core.models import QuadratureSpec

# Load environment variables
load_dotenv()

class Config:
    """Centralized configuration management"""
    
    def __init__(self):
        self.load_config()
    
    def load_config(self):
        """Load all configuration from environment variables"""
        # Monte Carlo
        self.default_trials = int(os.getenv('RELAY_SECRECY_TRIALS', '1000000'))
        self.default_seed = int(os.getenv('RELAY_SECRECY_SEED', '2024'))
        self.default_workers = int(os.getenv('RELAY_SECRECY_WORKERS', str(os.cpu_count() or 1)))
        self.block_size = int(os.getenv('RELAY_SECRECY_BLOCK_SIZE', '65536'))
        self.ci_multiplier = float(os.getenv('CI_MULTIPLIER', '3.0'))
        
        # Quadrature
        self.quad_abs_tol = float(os.getenv('QUAD_ABS_TOL', '1e-12'))
        self.quad_rel_tol = float(os.getenv('QUAD_REL_TOL', '1e-10'))
        self.quad_max_subdivisions = int(os.getenv('QUAD_MAX_SUBDIVISIONS', '200'))
        
        # Partial fractions
        self.pole_merge_tol = float(os.getenv('POLE_MERGE_TOL', '1e-9'))
        self.pole_separation_tol = float(os.getenv('POLE_SEPARATION_TOL', '1e-6'))
        self.max_closed_form_relays = int(os.getenv('MAX_CLOSED_FORM_RELAYS', '20'))
        # closed forms give way to quadrature when eps·Σ|terms|/|sum| exceeds this
        self.cancellation_limit = float(os.getenv('CANCELLATION_LIMIT', '1e-10'))
        
        # Paths
        self.results_dir = Path(os.getenv('RESULTS_DIR', 'results'))
        self.logs_dir = Path(os.getenv('LOGS_DIR', 'logs'))
        
        # Logging
        self.log_level = os.getenv('LOG_LEVEL', 'INFO')
        self.log_to_file = os.getenv('LOG_TO_FILE', 'true').lower() == 'true'
    
    def default_quadrature(self) -> QuadratureSpec:
        """Get the default quadrature tolerances"""
        return QuadratureSpec(
            abs_tol=self.quad_abs_tol,
            rel_tol=self.quad_rel_tol,
            max_subdivisions=self.quad_max_subdivisions,
        )
    
    def resolve_workers(self, workers: Optional[int] = None) -> int:
        """Resolve worker count, falling back to the configured default"""
        if workers is None:
            workers = self.default_workers
        return max(1, int(workers))
    
    @property
    def debug(self) -> bool:
        """Check if debug mode is enabled"""
        return os.getenv('DEBUG', 'false').lower() == 'true'

# Global config instance
config = Config()
