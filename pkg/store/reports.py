# store/reports.py
import logging
import uuid
from typing import List, Optional

import redis.asyncio as aioredis

from core.config import settings
from models.schemas import EnsembleDocument, ExperimentResponse
from store.memory import InMemoryStore

log = logging.getLogger("store.reports")

INDEX_KEY = "reports:index"
INDEX_LENGTH = 100


class ReportStore:
    """Experiment reports and model documents as JSON under report:/model: keys."""

    def __init__(self, backend, ttl: int = settings.report_ttl):
        self.backend = backend
        self.ttl = ttl

    @classmethod
    async def connect(cls, url: Optional[str] = None) -> "ReportStore":
        """
        Redis-backed store when the URL (default REDIS_URL) answers a ping,
        in-memory otherwise. Never raises.
        """
        url = url or settings.redis_url
        if not url:
            log.warning("REDIS_URL not set. Keeping reports in memory.")
            return cls(InMemoryStore())

        try:
            client = aioredis.from_url(
                url,
                decode_responses=True,
                socket_timeout=5,
                socket_connect_timeout=5,
            )
            await client.ping()
        except Exception as e:
            log.error(f"Redis connection failed: {e}")
            return cls(InMemoryStore())

        log.info("Redis connected successfully")
        return cls(client)

    async def close(self):
        try:
            await self.backend.close()
        except Exception as e:
            log.warning(f"Closing report store: {e}")

    @property
    def backend_name(self) -> str:
        return "memory" if isinstance(self.backend, InMemoryStore) else "redis"

    async def save_report(self, report: ExperimentResponse) -> str:
        await self.backend.set(f"report:{report.run_id}", report.model_dump_json(), ex=self.ttl)
        await self.backend.lpush(INDEX_KEY, report.run_id)
        await self.backend.ltrim(INDEX_KEY, 0, INDEX_LENGTH - 1)
        log.info(f"stored report {report.run_id} ({len(report.rows)} rows)")
        return report.run_id

    async def load_report(self, run_id: str) -> Optional[ExperimentResponse]:
        raw = await self.backend.get(f"report:{run_id}")
        if raw is None:
            return None
        return ExperimentResponse.model_validate_json(raw)

    async def recent_runs(self, limit: int = 20) -> List[str]:
        return list(await self.backend.lrange(INDEX_KEY, 0, limit - 1))

    async def save_model(self, doc: EnsembleDocument, model_id: Optional[str] = None) -> str:
        model_id = model_id or uuid.uuid4().hex
        await self.backend.set(f"model:{model_id}", doc.model_dump_json(), ex=self.ttl)
        log.info(f"stored model {model_id} ({len(doc.stumps)} stumps)")
        return model_id

    async def load_model(self, model_id: str) -> Optional[EnsembleDocument]:
        raw = await self.backend.get(f"model:{model_id}")
        if raw is None:
            return None
        return EnsembleDocument.model_validate_json(raw)
