"""Annotation service: serves pending segment pairs and accepts labels.

Humans see two transcripts side by side with the rule base and the query.
The left/right display order of the underlying pair is randomized per
pair_id (seeded, stable across reloads) to prevent position bias; the
mapping stays server-side and submitted choices are translated back before
they reach the preference store. Labels append to the same store the
trainer reads. First label wins: repeats get a conflict status.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Response
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from ..manifest import utc_now
from ..preference import (
    SIGMA1,
    SIGMA2,
    TIE,
    DuplicateLabel,
    PreferenceRecord,
    UnknownPair,
    append_records,
    load_records,
)
from ..seeds import derive_seed

STATIC_DIR = Path(__file__).parent / "static"


class PendingPairView(BaseModel):
    pair_id: str
    program: str
    query: str
    left: str
    right: str
    labeled: int
    pending: int


class LabelRequest(BaseModel):
    choice: str  # "left", "right", or "tie"


class LabelResponse(BaseModel):
    pair_id: str
    mu: tuple[float, float]
    source: str


class ProgressResponse(BaseModel):
    labeled: int
    pending: int


class PairQueue:
    """In-memory view of the queue file plus the append-only label store."""

    def __init__(self, queue_path: str | Path, store_path: str | Path, display_seed: int = 0):
        self.store_path = Path(store_path)
        self.display_seed = display_seed
        self.lock = threading.Lock()
        self.pairs: list[dict] = []
        with open(queue_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self.pairs.append(json.loads(line))
        self.by_id = {p["pair_id"]: p for p in self.pairs}
        self.labeled: set[str] = set()
        if self.store_path.exists():
            for record in load_records(self.store_path):
                if record.pair_id in self.by_id:
                    self.labeled.add(record.pair_id)

    def sigma1_shown_left(self, pair_id: str) -> bool:
        return derive_seed(self.display_seed, pair_id) % 2 == 0

    def next_pending(self) -> Optional[dict]:
        for pair in self.pairs:
            if pair["pair_id"] not in self.labeled:
                return pair
        return None

    def progress(self) -> tuple[int, int]:
        done = len(self.labeled)
        return done, len(self.pairs) - done

    def submit(self, pair_id: str, choice: str) -> PreferenceRecord:
        """Translate a left/right/tie choice and persist it atomically.

        Write-ahead ordering: the record is appended to the store first and
        the pair is marked labeled only afterwards.
        """
        with self.lock:
            if pair_id not in self.by_id:
                raise UnknownPair(pair_id)
            if pair_id in self.labeled:
                raise DuplicateLabel(pair_id)
            if choice == "tie":
                translated = TIE
            elif choice in ("left", "right"):
                left_is_sigma1 = self.sigma1_shown_left(pair_id)
                picked_left = choice == "left"
                translated = SIGMA1 if picked_left == left_is_sigma1 else SIGMA2
            else:
                raise ValueError(f"choice must be left, right, or tie, not {choice!r}")
            if translated == SIGMA1:
                mu = (1.0, 0.0)
            elif translated == SIGMA2:
                mu = (0.0, 1.0)
            else:
                mu = (0.5, 0.5)
            record = PreferenceRecord(
                pair_id=pair_id, mu=mu, source="human", timestamp=utc_now()
            )
            append_records(self.store_path, [record])
            self.labeled.add(pair_id)
            return record


def create_app(queue_path: str | Path, store_path: str | Path, display_seed: int = 0) -> FastAPI:
    app = FastAPI(title="logicrl annotation service")
    queue = PairQueue(queue_path, store_path, display_seed)
    app.state.queue = queue

    @app.get("/api/pairs/next", response_model=PendingPairView, responses={204: {}})
    def next_pair():
        pair = queue.next_pending()
        if pair is None:
            return Response(status_code=204)
        done, pending = queue.progress()
        sigma1_left = queue.sigma1_shown_left(pair["pair_id"])
        left = pair["sigma1"] if sigma1_left else pair["sigma2"]
        right = pair["sigma2"] if sigma1_left else pair["sigma1"]
        return PendingPairView(
            pair_id=pair["pair_id"],
            program=pair["program_text"],
            query=pair["query_text"],
            left=left.get("raw_text", ""),
            right=right.get("raw_text", ""),
            labeled=done,
            pending=pending,
        )

    @app.post("/api/pairs/{pair_id}/label", response_model=LabelResponse)
    def label_pair(pair_id: str, request: LabelRequest):
        try:
            record = queue.submit(pair_id, request.choice)
        except UnknownPair:
            return JSONResponse({"detail": f"unknown pair {pair_id}"}, status_code=404)
        except DuplicateLabel:
            return JSONResponse({"detail": f"pair {pair_id} already labeled"}, status_code=409)
        except ValueError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=422)
        return LabelResponse(pair_id=record.pair_id, mu=record.mu, source=record.source)

    @app.get("/api/progress", response_model=ProgressResponse)
    def progress():
        done, pending = queue.progress()
        return ProgressResponse(labeled=done, pending=pending)

    @app.get("/")
    def index():
        index_path = STATIC_DIR / "index.html"
        if index_path.exists():
            return FileResponse(index_path)
        return JSONResponse({"detail": "UI bundle not built; API is live"}, status_code=200)

    @app.get("/static/{filename}")
    def static_file(filename: str):
        target = (STATIC_DIR / filename).resolve()
        if target.parent != STATIC_DIR.resolve() or not target.exists():
            return JSONResponse({"detail": "not found"}, status_code=404)
        return FileResponse(target)

    return app
