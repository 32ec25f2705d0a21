"""SearchTool interface shared by the researcher agent and plan-time research.

Live web clients and the offline fixture corpus are interchangeable
implementations; everything upstream sees only this interface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol


@dataclass(frozen=True)
class SearchHit:
    source_id: str
    title: str
    text: str


class SearchTool(Protocol):
    name: str

    def search(self, query: str, limit: int) -> list[SearchHit]: ...


class FixtureSearchTool:
    """Offline corpus: a directory of JSON documents {id, title, text}.

    Matching is a case-insensitive token overlap between the query and
    title+text, results ordered by (match count desc, id) for determinism.
    """

    def __init__(self, corpus_dir: str | Path, name: str = "fixture"):
        self.name = name
        self._docs: list[dict] = []
        for path in sorted(Path(corpus_dir).glob("*.json")):
            doc = json.loads(path.read_text(encoding="utf-8"))
            self._docs.append(doc)

    def search(self, query: str, limit: int) -> list[SearchHit]:
        terms = {t for t in query.lower().split() if t}
        scored = []
        for doc in self._docs:
            haystack = f"{doc['title']} {doc['text']}".lower()
            score = sum(1 for t in terms if t in haystack)
            if score > 0:
                scored.append((-score, doc["id"], doc))
        scored.sort()
        return [
            SearchHit(source_id=d["id"], title=d["title"], text=d["text"])
            for _, _, d in scored[:limit]
        ]


class FailingSearchTool:
    """Test double: always raises, for error-absorption contracts."""

    def __init__(self, name: str = "broken"):
        self.name = name

    def search(self, query: str, limit: int) -> list[SearchHit]:
        raise RuntimeError(f"search tool {self.name} is down")
