"""
Service-level routes: liveness and the index of /api endpoints
"""
from flask import Blueprint, current_app

main_bp = Blueprint('main', __name__)

_HIDDEN_METHODS = {'HEAD', 'OPTIONS'}


def _api_rules():
    for rule in current_app.url_map.iter_rules():
        if not rule.rule.startswith('/api/'):
            continue
        methods = sorted(set(rule.methods or ()) - _HIDDEN_METHODS)
        if methods:
            yield {'endpoint': rule.rule, 'methods': methods}


@main_bp.route('/')
def index():
    """Lists the /api routes registered on the app, sorted by path"""
    return {
        'service': 'graphcolor',
        'status': 'OK',
        'endpoints': sorted(_api_rules(), key=lambda e: e['endpoint']),
    }, 200


@main_bp.route('/health')
def health_check():
    config = current_app.config
    return {
        'status': 'healthy',
        'solver_budget': config.get('SOLVER_BUDGET'),
        'max_gadget_nodes': config.get('MAX_GADGET_NODES'),
    }, 200
