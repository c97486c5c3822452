# core/config.py
import os


class Settings:
    app_name = "IPBoost API"
    version = "1.0.0"

    # Logging
    log_level = os.getenv("IPBOOST_LOG_LEVEL", "INFO").upper()

    # Solver defaults
    default_rho = float(os.getenv("IPBOOST_RHO", "0.05"))
    stall_limit = int(os.getenv("IPBOOST_STALL_LIMIT", "5000"))
    time_limit = float(os.getenv("IPBOOST_TIME_LIMIT", "300"))  # seconds
    subsample_cap = int(os.getenv("IPBOOST_SUBSAMPLE_CAP", "30000"))
    seeds = int(os.getenv("IPBOOST_SEEDS", "10"))
    max_columns = int(os.getenv("IPBOOST_MAX_COLUMNS", "500"))
    pricing_tolerance = float(os.getenv("IPBOOST_PRICING_TOL", "1e-6"))
    workers = int(os.getenv("IPBOOST_WORKERS", "1"))
    log_every = int(os.getenv("IPBOOST_LOG_EVERY", "100"))  # nodes

    # Experiment data served over HTTP must live under this directory
    data_dir = os.getenv("IPBOOST_DATA_DIR", "datasets")

    # Result store
    redis_url = os.getenv("REDIS_URL")
    report_ttl = 604800  # 7 days


settings = Settings()
