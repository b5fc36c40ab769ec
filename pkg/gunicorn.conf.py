# gunicorn settings for the graphcolor HTTP API.
# Exact chromatic numbers and cover certification hold a worker for the
# whole request, so workers track the core count and timeouts are long.

import os
import multiprocessing

bind = os.getenv('GUNICORN_BIND', '0.0.0.0:5000')
backlog = 256

workers = int(os.getenv('GUNICORN_WORKERS', multiprocessing.cpu_count()))
worker_class = 'sync'
timeout = int(os.getenv('GUNICORN_TIMEOUT', 300))
graceful_timeout = int(os.getenv('GUNICORN_GRACEFUL_TIMEOUT', 60))
# recycle workers so long-lived APSP caches do not accumulate
max_requests = int(os.getenv('GUNICORN_MAX_REQUESTS', 500))
max_requests_jitter = 50

proc_name = 'graphcolor-api'

errorlog = '-'
accesslog = '-'
loglevel = os.getenv('GUNICORN_LOG_LEVEL', os.getenv('LOG_LEVEL', 'info')).lower()
# %(D)s is the request time in microseconds; solver calls dominate it
access_log_format = '%(h)s "%(r)s" %(s)s %(b)s %(D)sus'

preload_app = True
