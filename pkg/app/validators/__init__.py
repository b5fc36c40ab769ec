"""
Validators package for toolkit parameters
"""
from app.validators.param_validators import ParamValidator

__all__ = ['ParamValidator']
