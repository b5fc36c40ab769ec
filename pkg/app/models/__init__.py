from app.models.graph import Graph, UNREACHABLE
from app.models.ledger import RoundLedger
from app.models.clustering import Clustering, NetworkDecomposition
from app.models.coloring import (
    PaletteColor, HIDDEN, HIDDEN_INDEX, ChromaticCertificate, HidingRecord, PipelineResult,
)
from app.models.cover import SubgraphCover, CheatingInstance, ElementCertificate
from app.models.reports import ValidationReport, AttackReport
from app.models.run_config import RunConfig
