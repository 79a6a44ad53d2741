# ABOUTME: Centralized logging configuration for relay-secrecy
# ABOUTME: Provides structured logging with console (stderr) and optional file output

import logging
import sys
from pathlib import Path
from typing import Optional, Any
from datetime import datetime
import os

class SecrecyLogger:
    """Module logger with helpers for sweep, quadrature, Monte Carlo and check events"""
    
    def __init__(self, name: str, log_level: str = "INFO", log_dir: Optional[Path] = None):
        self.name = name
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, log_level.upper()))
        
        # getLogger returns a shared instance; attach handlers once
        if not self.logger.handlers:
            self._setup_handlers(log_dir)
    
    def _setup_handlers(self, log_dir: Optional[Path]):
        """Console on stderr; one file per logger per day when log_dir is set"""
        # stdout is reserved for CSV
        console_handler = logging.StreamHandler(sys.stderr)
        
        console_format = logging.Formatter(
            '%(asctime)s | %(levelname)8s | %(name)s | %(message)s',
            datefmt='%H:%M:%S'
        )
        console_handler.setFormatter(console_format)
        self.logger.addHandler(console_handler)
        
        if log_dir is None:
            return
        
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"{self.name}_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        
        file_format = logging.Formatter(
            '%(asctime)s | %(levelname)8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(file_format)
        self.logger.addHandler(file_handler)
    
    # printf-style args are formatted lazily by logging
    def info(self, message: str, *args):
        self.logger.info(message, *args)

    def debug(self, message: str, *args):
        self.logger.debug(message, *args)

    def warning(self, message: str, *args):
        self.logger.warning(message, *args)

    def error(self, message: str, *args):
        self.logger.error(message, *args)

    def sweep_point(self, strategy: str, snr_db: float, relays: int):
        """Log the start of a sweep point"""
        self.info(f"Sweep {strategy} @ {snr_db:+.2f} dB ({relays} relays)")
    
    def quadrature_result(self, label: str, value: float, abs_error: float, evaluations: int):
        """Log a converged quadrature"""
        self.debug("Quadrature %s = %.12g (abserr %.2e, %d evals)", label, value, abs_error, evaluations)
    
    def expansion_built(self, relays: int, terms: int):
        """Log a partial-fraction expansion"""
        self.debug(f"Expansion: {relays} relays → {terms} terms")
    
    def mc_estimate(self, label: str, mean: float, std_error: float, trials: int):
        """Log a Monte Carlo estimate"""
        self.info(f"MC {label}: {mean:.6g} ± {std_error:.2g} ({trials:,} trials)")
    
    def check_result(self, name: str, passed: bool, margin: Any):
        """Log a validation check"""
        status = "PASS" if passed else "FAIL"
        message = f"Check {status}: {name} (margin {margin})"
        if passed:
            self.info(message)
        else:
            self.warning(message)

def get_logger(name: str, level: str = None) -> SecrecyLogger:
    """Get logger instance for a module"""
    if level is None:
        level = os.getenv('LOG_LEVEL', 'INFO')
    log_dir = None
    if os.getenv('LOG_TO_FILE', 'true').lower() == 'true':
        log_dir = Path(os.getenv('LOGS_DIR', 'logs'))
    return SecrecyLogger(name, level, log_dir)
