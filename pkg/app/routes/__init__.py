from .api_routes import AnalyzeResource, ColorResource, CoverResource, DecomposeResource
from .main_routes import main_bp

__all__ = ['AnalyzeResource', 'ColorResource', 'CoverResource', 'DecomposeResource', 'main_bp']
