"""
Parameter Validators
Validates command and request parameters before any graph is built.
Shared by the CLI and the HTTP resources.
"""
from abc import ABC

from config import Config
from app.exceptions import BadParams


def _as_int(data: dict, field: str, errors: dict, default=None):
    value = data.get(field, default)
    if value is None:
        errors[field] = f"{field} is required"
        return None
    try:
        if isinstance(value, bool) or float(value) != int(float(value)):
            raise ValueError
        return int(float(value))
    except (TypeError, ValueError):
        errors[field] = f"{field} must be an integer, got {value!r}"
        return None


class ParamValidator(ABC):
    """Validator for toolkit parameters"""

    MODES = ('det', 'rand')
    FAMILIES = ('rjoin', 'kb')
    VICTIMS = ('const1', 'pipeline3', 'honest', 'exact')
    MAX_ALPHA = 64

    @staticmethod
    def require(result: tuple) -> dict:
        """Unpack a validation result or raise BadParams with its errors"""
        is_valid, validated_data, errors = result
        if not is_valid:
            raise BadParams('Invalid parameters', **errors)
        return validated_data

    @staticmethod
    def validate_pipeline(data: dict) -> tuple:
        """
        Validate coloring / decomposition parameters

        Returns:
            tuple: (is_valid: bool, validated_data: dict, errors: dict)
        """
        errors = {}

        # 1. VALIDATE ALPHA
        alpha = _as_int(data, 'alpha', errors, default=2)
        if alpha is not None and not 1 <= alpha <= ParamValidator.MAX_ALPHA:
            errors['alpha'] = f"alpha must be between 1 and {ParamValidator.MAX_ALPHA}, got {alpha}"

        # 2. VALIDATE MODE
        mode = data.get('mode', 'det')
        if mode not in ParamValidator.MODES:
            errors['mode'] = f"mode must be one of {', '.join(ParamValidator.MODES)}"

        # 3. VALIDATE SEED
        seed = _as_int(data, 'seed', errors, default=Config.DEFAULT_SEED)
        if seed is not None and seed < 0:
            errors['seed'] = 'seed must be non-negative'

        if errors:
            return (False, {}, errors)
        return (True, {'alpha': alpha, 'mode': mode, 'seed': seed}, {})

    @staticmethod
    def validate_graph_payload(data: dict) -> tuple:
        """Validate an inline graph {'n': int, 'edges': [[u, v], ...]}"""
        errors = {}
        n = _as_int(data, 'n', errors)
        edges = data.get('edges', [])
        if not isinstance(edges, list) or any(not isinstance(e, (list, tuple)) or len(e) != 2 for e in edges):
            errors['edges'] = 'edges must be a list of [u, v] pairs'
        if n is not None and n < 0:
            errors['n'] = 'n must be non-negative'
        if errors:
            return (False, {}, errors)
        return (True, {'n': n, 'edges': [(int(u), int(v)) for u, v in edges]}, {})

    @staticmethod
    def validate_rjoin(data: dict, for_cover: bool = False) -> tuple:
        """chi >= 2, r >= 2 (3 for covers), k >= 1 (2 for covers)"""
        errors = {}
        chi = _as_int(data, 'chi', errors)
        r = _as_int(data, 'r', errors)
        k = _as_int(data, 'k', errors)
        min_r, min_k = (3, 2) if for_cover else (2, 1)
        if chi is not None and chi < 2:
            errors['chi'] = 'chi must be at least 2'
        if r is not None and r < min_r:
            errors['r'] = f"r must be at least {min_r}"
        if k is not None and k < min_k:
            errors['k'] = f"k must be at least {min_k}"
        if errors:
            return (False, {}, errors)
        return (True, {'chi': chi, 'r': r, 'k': k}, {})

    @staticmethod
    def validate_kb(data: dict, for_cover: bool = False) -> tuple:
        """w, hh >= 2; covers need odd w, hh >= 7"""
        errors = {}
        validated_data = {}
        for field in ('w', 'hh'):
            value = _as_int(data, field, errors)
            if value is None:
                continue
            if for_cover and (value % 2 == 0 or value < 7):
                errors[field] = f"{field} must be odd and at least 7 for a cover, got {value}"
            elif value < 2:
                errors[field] = f"{field} must be at least 2, got {value}"
            validated_data[field] = value
        if errors:
            return (False, {}, errors)
        return (True, validated_data, {})

    @staticmethod
    def validate_family(family: str, data: dict, for_cover: bool = False) -> tuple:
        if family == 'rjoin':
            return ParamValidator.validate_rjoin(data, for_cover)
        if family == 'kb':
            return ParamValidator.validate_kb(data, for_cover)
        return (False, {}, {'family': f"family must be one of {', '.join(ParamValidator.FAMILIES)}"})

    @staticmethod
    def validate_attack(data: dict) -> tuple:
        """copies >= 1, trials >= 1, a known victim"""
        errors = {}
        copies = _as_int(data, 'copies', errors, default=1)
        trials = _as_int(data, 'trials', errors, default=100)
        victim = data.get('victim')
        if copies is not None and copies < 1:
            errors['copies'] = 'copies must be at least 1'
        if trials is not None and trials < 1:
            errors['trials'] = 'trials must be at least 1'
        if victim not in ParamValidator.VICTIMS:
            errors['victim'] = f"victim must be one of {', '.join(ParamValidator.VICTIMS)}"
        if errors:
            return (False, {}, errors)
        return (True, {'copies': copies, 'trials': trials, 'victim': victim}, {})

    @staticmethod
    def validate_eps(value) -> tuple:
        try:
            eps = float(value)
        except (TypeError, ValueError):
            return (False, {}, {'eps': f"eps must be a number, got {value!r}"})
        if not 0.0 < eps <= 1.0:
            return (False, {}, {'eps': f"eps must lie in (0, 1], got {eps}"})
        return (True, {'eps': eps}, {})

    @staticmethod
    def validate_sizes(text: str) -> tuple:
        """Comma-separated grid side lengths, each >= 2"""
        try:
            sizes = [int(s) for s in str(text).split(',') if s.strip()]
        except ValueError:
            return (False, {}, {'sizes': f"sizes must be comma-separated integers, got {text!r}"})
        if not sizes or any(s < 2 for s in sizes):
            return (False, {}, {'sizes': 'every size must be at least 2'})
        return (True, {'sizes': sizes}, {})


__all__ = ['ParamValidator']
