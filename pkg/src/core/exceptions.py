# ABOUTME: Custom exceptions for relay-secrecy
# ABOUTME: Domain-specific error handling with error codes, context, and CLI exit codes

from typing import Optional, Dict, Any, List

class RelaySecrecyError(Exception):
    """Base exception for relay-secrecy"""
    
    def __init__(self, message: str, code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.code = code or self.__class__.__name__
        self.details = details or {}

class DomainError(RelaySecrecyError, ValueError):
    """Argument outside the domain of a function"""
    
    def __init__(self, message: str, argument: Optional[str] = None, 
                 value: Optional[Any] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.argument = argument
        self.value = value

class QuadratureError(RelaySecrecyError):
    """Adaptive quadrature did not converge"""
    
    def __init__(self, message: str, label: Optional[str] = None, 
                 abs_error: Optional[float] = None, 
                 max_subdivisions: Optional[int] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.label = label
        self.abs_error = abs_error
        self.max_subdivisions = max_subdivisions

class ExpansionError(RelaySecrecyError):
    """Partial-fraction expansion failed"""
    pass

class PoleClusteringError(ExpansionError):
    """Two distinct poles are too close for a stable expansion"""
    
    def __init__(self, message: str, alpha_i: Optional[float] = None, 
                 alpha_j: Optional[float] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.alpha_i = alpha_i
        self.alpha_j = alpha_j

class RelayCountError(ExpansionError):
    """Too many relays for closed-form evaluation"""
    
    def __init__(self, message: str, relays: Optional[int] = None, 
                 limit: Optional[int] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.relays = relays
        self.limit = limit

class ValidationError(RelaySecrecyError):
    """Data validation failed"""
    
    def __init__(self, message: str, field: Optional[str] = None, 
                 value: Optional[Any] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.field = field
        self.value = value
    
    def __str__(self) -> str:
        if self.field:
            return f"{self.field}: {self.message}"
        return self.message

class ConfigurationError(RelaySecrecyError):
    """Configuration error, carrying every validation problem found"""
    
    def __init__(self, message: str, setting: Optional[str] = None, 
                 errors: Optional[List[ValidationError]] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.setting = setting
        self.errors = errors or []
    
    def __str__(self) -> str:
        if not self.errors:
            return self.message
        lines = [self.message] + [f"  - {error}" for error in self.errors]
        return "\n".join(lines)

class ExperimentError(RelaySecrecyError):
    """A sweep point failed"""
    
    def __init__(self, message: str, strategy: Optional[str] = None, 
                 snr_db: Optional[float] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.strategy = strategy
        self.snr_db = snr_db

class CheckFailedError(RelaySecrecyError):
    """One or more validation checks failed"""
    
    def __init__(self, message: str, failed: Optional[List[str]] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.failed = failed or []

# Exit codes for the command-line interface
EXIT_OK = 0
EXIT_VALIDATION_FAILURE = 1
EXIT_CONFIG_ERROR = 2

ERROR_EXIT_MAPPING = {
    ConfigurationError: EXIT_CONFIG_ERROR,
    ValidationError: EXIT_CONFIG_ERROR,
    CheckFailedError: EXIT_VALIDATION_FAILURE,
}

def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code"""
    for error_class, code in ERROR_EXIT_MAPPING.items():
        if isinstance(error, error_class):
            return code
    return EXIT_VALIDATION_FAILURE
