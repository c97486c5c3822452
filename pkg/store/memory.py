# store/memory.py
import logging
from typing import Dict, List, Optional

log = logging.getLogger(__name__)


class InMemoryStore:
    """Process-local stand-in for the Redis calls the report store makes. TTLs are ignored."""

    def __init__(self):
        self.data: Dict[str, str] = {}
        self.lists: Dict[str, List[str]] = {}
        log.info("Using in-memory report store")

    async def get(self, key: str) -> Optional[str]:
        return self.data.get(key)

    async def set(self, key: str, value: str, ex: Optional[int] = None) -> bool:
        self.data[key] = value
        return True

    async def delete(self, key: str) -> int:
        removed = int(self.data.pop(key, None) is not None)
        removed += int(self.lists.pop(key, None) is not None)
        return removed

    async def ping(self) -> bool:
        return True

    async def close(self):
        self.data.clear()
        self.lists.clear()

    async def lpush(self, key: str, *values: str) -> int:
        lst = self.lists.setdefault(key, [])
        for value in values:
            lst.insert(0, value)
        return len(lst)

    async def ltrim(self, key: str, start: int, end: int) -> bool:
        if key in self.lists:
            stop = None if end == -1 else end + 1
            self.lists[key] = self.lists[key][start:stop]
        return True

    async def lrange(self, key: str, start: int, end: int) -> List[str]:
        lst = self.lists.get(key, [])
        stop = None if end == -1 else end + 1
        return lst[start:stop]
