"""
WSGI entry point: `python run.py` for development, `gunicorn run:app` in production
"""
import logging
import os

from dotenv import load_dotenv

# the project .env wins over a stale shell environment
load_dotenv(os.path.join(os.path.dirname(os.path.abspath(__file__)), '.env'), override=True)

from app import create_app

app = create_app()
logging.getLogger(__name__).info(
    f"graphcolor API ready: solver budget {app.config['SOLVER_BUDGET']}, "
    f"gadget node cap {app.config['MAX_GADGET_NODES']}, default seed {app.config['DEFAULT_SEED']}"
)

if __name__ == '__main__':
    app.run(port=int(os.getenv('PORT', 5000)))
