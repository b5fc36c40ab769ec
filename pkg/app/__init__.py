import logging
import sys

from dotenv import load_dotenv

load_dotenv()

from flask import Flask, jsonify
from flask_cors import CORS
from flask_restful import Api

from config import Config
from app.exceptions import ToolkitError
from app.utils.serialization import json_default

logger = logging.getLogger(__name__)


class ToolkitApi(Api):
    """Renders toolkit errors raised inside Resources with their own status"""

    def handle_error(self, e):
        if isinstance(e, ToolkitError):
            logger.warning(f"{e.__class__.__name__}: {e.message}")
            return self.make_response(e.to_dict(), e.http_status)
        return super().handle_error(e)


def create_app(config_class=Config):
    app = Flask(__name__)
    app.config.from_object(config_class)
    app.config['RESTFUL_JSON'] = {'sort_keys': True, 'default': json_default}

    logging.basicConfig(
        level=str(app.config.get('LOG_LEVEL', 'INFO')).upper(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )

    origins = [o.strip() for o in app.config.get('CORS_ORIGINS', '*').split(',') if o.strip()]
    CORS(app, resources={r"/api/*": {"origins": origins, "methods": ["GET", "POST"]}})

    # /api resources
    api = ToolkitApi(app)

    from app.routes.api_routes import AnalyzeResource, ColorResource, CoverResource, DecomposeResource
    api.add_resource(ColorResource, "/api/color")
    api.add_resource(DecomposeResource, "/api/decompose")
    api.add_resource(AnalyzeResource, "/api/analyze")
    api.add_resource(CoverResource, "/api/covers/<string:family>")

    # / and /health
    from app.routes.main_routes import main_bp
    app.register_blueprint(main_bp)

    @app.errorhandler(ToolkitError)
    def handle_toolkit_error(error):
        logger.warning(f"{error.__class__.__name__}: {error.message}")
        return jsonify(error.to_dict()), error.http_status

    @app.errorhandler(404)
    def not_found(error):
        return jsonify({'error': 'NotFound', 'message': 'Resource not found'}), 404

    @app.errorhandler(500)
    def internal_error(error):
        logger.error(f"Unhandled error: {error}")
        return jsonify({'error': 'InternalError', 'message': 'Internal server error'}), 500

    # flask graphcolor ...
    from app.cli import graphcolor
    app.cli.add_command(graphcolor)

    return app
