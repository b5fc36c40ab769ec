import os


class Config:
    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

    # Randomness - every command derives its sub-seeds from this master seed
    DEFAULT_SEED = int(os.getenv('DEFAULT_SEED', 20240601))

    # Exact chromatic solver: backtracking expansions plus CP-SAT conflicts
    SOLVER_BUDGET = int(os.getenv('SOLVER_BUDGET', 10_000_000))
    # Expansions tried by backtracking before a k-coloring question goes to CP-SAT
    SOLVER_BACKTRACK_SLICE = int(os.getenv('SOLVER_BACKTRACK_SLICE', 50_000))
    SOLVER_TIME_LIMIT = float(os.getenv('SOLVER_TIME_LIMIT', 300))

    # Isomorphism search
    ISO_BUDGET = int(os.getenv('ISO_BUDGET', 10_000_000))
    ISO_MAX_NODES = int(os.getenv('ISO_MAX_NODES', 400))

    # Clustering
    RETRY_LIMIT = int(os.getenv('RETRY_LIMIT', 3))
    DEFAULT_BETA = float(os.getenv('DEFAULT_BETA', 0.2))

    # Generators
    MAX_GADGET_NODES = int(os.getenv('MAX_GADGET_NODES', 1_000_000))

    # Largest graph for which the all-pairs distance cache is built
    APSP_CACHE_LIMIT = int(os.getenv('APSP_CACHE_LIMIT', 4096))

    # JSON-lines simulation trace, disabled when unset
    TRACE_PATH = os.getenv('TRACE_PATH')

    # HTTP surface
    CORS_ORIGINS = os.getenv('CORS_ORIGINS', '*')
    JSON_SORT_KEYS = True


class TestConfig(Config):
    TESTING = True
    SOLVER_BUDGET = 2_000_000
