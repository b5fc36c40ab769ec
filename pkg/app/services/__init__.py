from .graph_service import GraphService
from .analysis_service import AnalysisService
from .simulation_service import SimulationService
from .clustering_service import ClusteringService
from .decomposition_service import DecompositionService
from .coloring_service import ColoringService
from .gadget_service import GadgetService
from .adversary_service import AdversaryService

__all__ = [
    'GraphService', 'AnalysisService', 'SimulationService', 'ClusteringService',
    'DecompositionService', 'ColoringService', 'GadgetService', 'AdversaryService',
]
