# harvestkit/exceptions.py
from .settings import get_error_response


class HarvestKitError(Exception):
    def __init__(self, message, code=None):
        self.message = message
        self.code = code or 'harvestkit_error'
        super().__init__(message)


def _defaults(name, message, code, fallback_message, fallback_code):
    # 從設置中獲取錯誤訊息
    error_config = get_error_response(name)
    return (
        message or error_config.get('message', fallback_message),
        code or error_config.get('code', fallback_code),
    )


class DomainError(HarvestKitError):
    def __init__(self, message=None, code=None):
        message, code = _defaults(
            'DOMAIN', message, code,
            'Parameter outside the physical domain', 'domain_error',
        )
        super().__init__(message=message, code=code)


class ConvergenceError(HarvestKitError):
    """
    數值積分未達到容差

    屬性:
        result: 失敗前的最佳估計 (IntegralResult 或 MatrixElements)
    """

    def __init__(self, message=None, code=None, result=None):
        message, code = _defaults(
            'CONVERGENCE', message, code,
            'Quadrature did not reach the requested tolerance', 'convergence_error',
        )
        self.result = result
        super().__init__(message=message, code=code)


class PerturbativityError(HarvestKitError):
    def __init__(self, message=None, code=None, total=None):
        message, code = _defaults(
            'PERTURBATIVITY', message, code,
            'Excitation probability too large for second-order theory',
            'perturbativity_error',
        )
        self.total = total
        super().__init__(message=message, code=code)


class IdenticalDetectorError(HarvestKitError):
    def __init__(self, message=None, code=None):
        message, code = _defaults(
            'IDENTICAL_DETECTOR', message, code,
            'Detectors are not identical (L_AA != L_BB)', 'identical_detector_error',
        )
        super().__init__(message=message, code=code)


class InfeasibleError(HarvestKitError):
    """
    優化約束排除了所有 N > 0 的點

    屬性:
        best_inseparability: 可行域內找到的最小 I_min
    """

    def __init__(self, message=None, code=None, best_inseparability=None):
        message, code = _defaults(
            'INFEASIBLE', message, code,
            'No feasible point harvests entanglement', 'infeasible',
        )
        self.best_inseparability = best_inseparability
        super().__init__(message=message, code=code)


class ConfigError(HarvestKitError):
    def __init__(self, message=None, code=None):
        message, code = _defaults(
            'CONFIG', message, code, 'Invalid run configuration', 'config_error',
        )
        super().__init__(message=message, code=code)


class ValidationError(HarvestKitError):
    def __init__(self, message=None, code=None, failures=None):
        message, code = _defaults(
            'VALIDATION', message, code,
            'Oracle validation failed', 'validation_failed',
        )
        self.failures = failures or []
        super().__init__(message=message, code=code)
