"""
API Resources
flask-restful resources over the coloring, decomposition, analysis and
gadget services. Graphs travel inline as {"n": int, "edges": [[u, v], ...]}.
Toolkit errors propagate to the app-level JSON error handler.
"""
import logging
import math

from flask import request
from flask_restful import Resource

from app.exceptions import BadParams
from app.models.clustering import NetworkDecomposition
from app.services.adversary_service import AdversaryService
from app.services.analysis_service import AnalysisService
from app.services.coloring_service import ColoringService
from app.services.decomposition_service import DecompositionService
from app.services.gadget_service import GadgetService
from app.services.graph_service import GraphService
from app.validators.param_validators import ParamValidator

logger = logging.getLogger(__name__)


def _graph_from_body(data: dict):
    payload = ParamValidator.require(ParamValidator.validate_graph_payload(data))
    return GraphService.build_graph(payload['n'], payload['edges'])


def _body() -> dict:
    data = request.get_json(silent=True)
    if not data:
        raise BadParams('Request body is required')
    return data


# POST /api/color
class ColorResource(Resource):
    def post(self):
        data = _body()
        g = _graph_from_body(data)
        params = ParamValidator.require(ParamValidator.validate_pipeline(data))
        result = ColoringService.full_pipeline(g, params['alpha'], mode=params['mode'], seed=params['seed'])
        logger.info(f"API color n={g.n}: {result.colors_used} colors")
        payload = result.to_dict()
        payload['within_bound'] = result.within_bound
        return payload, 200


# POST /api/decompose
class DecomposeResource(Resource):
    def post(self):
        data = _body()
        g = _graph_from_body(data)
        params = ParamValidator.require(ParamValidator.validate_pipeline(data))
        decomposition = DecompositionService.network_decomposition(
            g, params['alpha'], base=params['mode'], seed=params['seed'])
        serialized = decomposition.to_dict()
        report = AnalysisService.verify_decomposition(
            g, NetworkDecomposition.from_dict(g.n, serialized), params['alpha'], decomposition.max_diameter)
        return {'decomposition': serialized, 'report': report.to_dict()}, (200 if report.passed else 422)


# POST /api/analyze
class AnalyzeResource(Resource):
    def post(self):
        data = _body()
        g = _graph_from_body(data)
        facts = {'stats': AnalysisService.graph_stats(g)}

        if data.get('chromatic'):
            facts['chromatic'] = AnalysisService.exact_chromatic_number(g).to_dict()

        radius = data.get('local_chromatic')
        if radius is not None:
            if isinstance(radius, bool) or not isinstance(radius, int) or radius < 0:
                raise BadParams('local_chromatic must be a non-negative integer radius')
            value, center = AnalysisService.local_chromatic_number(g, radius)
            facts['local_chromatic'] = {'r': radius, 'value': value, 'argmax': int(center)}

        if data.get('girth'):
            value = AnalysisService.girth(g)
            facts['girth'] = None if value == math.inf else value
        return facts, 200


# GET /api/covers/<family>?chi=&r=&k=  |  ?w=&hh=
class CoverResource(Resource):
    def get(self, family):
        params = ParamValidator.require(
            ParamValidator.validate_family(family, request.args.to_dict(), for_cover=True))
        cover = GadgetService.build_cover(family, params)
        report = GadgetService.verify_cover(cover.host, cover, AdversaryService.target_chi(family, params))
        report.metrics.pop('certificates', None)
        return {
            'cover': cover.to_dict(),
            'n': cover.host.n,
            'm': cover.host.m,
            'report': report.to_dict(),
        }, (200 if report.passed else 422)
