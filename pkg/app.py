# app.py
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from core.config import settings
from routes import ensembles, experiments, predict
from store.reports import ReportStore

logging.basicConfig(level=settings.log_level)
log = logging.getLogger("IPBoostAPI")


@asynccontextmanager
async def lifespan(app: FastAPI):
    log.info(f"Starting {settings.app_name}")

    app.state.reports = await ReportStore.connect()
    log.info(f"Report store ready ({app.state.reports.backend_name})")

    yield

    log.info("Shutting down")
    await app.state.reports.close()


app = FastAPI(title=settings.app_name, version=settings.version, lifespan=lifespan)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(experiments.router, prefix="/api/v1", tags=["experiments"])
app.include_router(predict.router, prefix="/api/v1", tags=["predict"])
app.include_router(ensembles.router, prefix="/api/v1", tags=["models"])


def _store_backend() -> str:
    reports = getattr(app.state, "reports", None)
    return reports.backend_name if reports is not None else "none"


@app.get("/")
def root():
    return {
        "status": "online",
        "version": settings.version,
        "service": settings.app_name,
        "store": _store_backend(),
    }


@app.get("/health")
def health():
    backend = _store_backend()
    return {
        "status": "healthy" if backend != "none" else "degraded",
        "store": backend,
    }
