"""
Domain Errors
Every failure the toolkit can surface, with the exit code used by the CLI
and the HTTP status used by the API resources.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 4
    http_status = 400

    def __init__(self, message: str = '', **details):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.details = details

    def to_dict(self) -> dict:
        payload = {
            'error': self.__class__.__name__,
            'message': self.message,
        }
        if self.details:
            payload['details'] = self.details
        return payload


# ============================================
# Bad arguments (exit 4)
# ============================================

class BadParams(ToolkitError):
    """Parameters outside the documented domain of an operation"""


class OutOfRange(BadParams):
    """Edge endpoint outside 0..n-1"""


class SelfLoop(BadParams):
    """Edge from a node to itself"""


class EmptyGraph(BadParams):
    """Operation needs at least one node"""


class Disconnected(BadParams):
    """Some pair of nodes of the queried set is unreachable"""


class DoesNotFit(BadParams):
    """Cheating instance cannot be assembled inside the requested target"""


class LocalityMismatch(BadParams):
    """Victim claims a locality larger than the cover radius"""


# ============================================
# Budgets (exit 3)
# ============================================

class BudgetExceeded(ToolkitError):
    """Exact solver ran out of node expansions; carries the best bracket"""

    exit_code = 3
    http_status = 413

    def __init__(self, message: str = '', lo: int = 0, hi: int = 0, **details):
        super().__init__(message, lo=lo, hi=hi, **details)
        self.lo = lo
        self.hi = hi


class TooLarge(ToolkitError):
    """Isomorphism search exceeded its node or step budget"""

    exit_code = 3
    http_status = 413


class SizeLimit(ToolkitError):
    """Generator refused to build a graph above the configured node limit"""

    exit_code = 3
    http_status = 413


# ============================================
# Validation failures (exit 2)
# ============================================

class ValidationFailure(ToolkitError):
    """A post-condition check failed; carries the verifier report"""

    exit_code = 2
    http_status = 422

    def __init__(self, message: str = '', report=None, **details):
        if report is not None:
            details['report'] = report.to_dict() if hasattr(report, 'to_dict') else report
        super().__init__(message, **details)
        self.report = report


class GuaranteeViolated(ValidationFailure):
    """Clustering or pipeline output broke a promised guarantee"""


class InvalidDecomposition(ValidationFailure):
    """Network decomposition is not valid on the required graph"""


class CertificateFailed(ValidationFailure):
    """A gadget or cover certificate did not verify"""


class NotHalted(ValidationFailure):
    """Some node of a simulation never produced an output"""


__all__ = [
    'ToolkitError', 'BadParams', 'OutOfRange', 'SelfLoop', 'EmptyGraph',
    'Disconnected', 'DoesNotFit', 'LocalityMismatch', 'BudgetExceeded',
    'TooLarge', 'SizeLimit', 'ValidationFailure', 'GuaranteeViolated',
    'InvalidDecomposition', 'CertificateFailed', 'NotHalted',
]
