"""HTTP task service: the local stand-in for a crowdsourcing platform.

Workers poll GET /task for the strategy's current top pair, POST /answer
with yes or no, and watch GET /status. Each issued task integrates exactly
once; unanswered tasks return to the queue after a TTL.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import (
    LIVE,
    Engine,
    ExperimentConfig,
    live_engine,
    replay_engine,
    synthetic_engine,
)
from .files import read_manifest

QUESTION = "Do these two records refer to the same real-world entity?"
CONSOLE_DIR = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"


class AnswerBody(BaseModel):
    task_id: str
    answer: str
    worker_id: str


class TaskBroker:
    """Engine wrapper owning task ids, the outstanding cap, and the TTL."""

    def __init__(
        self,
        engine: Engine,
        *,
        max_outstanding: int = 8,
        task_ttl_secs: float = 300.0,
        payload_base_url: Optional[str] = None,
    ):
        self.engine = engine
        self.max_outstanding = max_outstanding
        self.task_ttl_secs = task_ttl_secs
        self.payload_base_url = payload_base_url
        self._open: dict = {}  # task_id -> (pair, issued_at)
        self._lock = threading.Lock()

    @property
    def live(self) -> bool:
        return self.engine.crowd is None

    def _payload(self, record) -> dict:
        if self.payload_base_url:
            return {
                "record": record,
                "kind": "image",
                "value": f"{self.payload_base_url}{record}",
            }
        return {"record": record, "kind": "text", "value": str(record)}

    def _reclaim(self, now: float) -> None:
        expired = [
            task_id
            for task_id, (_, issued) in self._open.items()
            if now - issued > self.task_ttl_secs
        ]
        for task_id in expired:
            pair, _ = self._open.pop(task_id)
            self.engine.return_lease(pair)

    def next_task(self) -> Optional[dict]:
        with self._lock:
            now = time.monotonic()
            self._reclaim(now)
            if len(self._open) >= self.max_outstanding:
                return None
            pair = self.engine.lease_next()
            if pair is None:
                return None
            task_id = uuid.uuid4().hex
            self._open[task_id] = (pair, now)
            a, b = pair
            return {
                "task_id": task_id,
                "pair": [a, b],
                "records": [self._payload(a), self._payload(b)],
                "question": QUESTION,
            }

    def submit(self, task_id: str, answer: bool) -> Optional[int]:
        """Integrates one answer; None means the task is unknown or closed."""
        with self._lock:
            self._reclaim(time.monotonic())
            entry = self._open.pop(task_id, None)
            if entry is None:
                return None
            pair, _ = entry
            self.engine.integrate_leased(pair, answer)
            return self.engine.cost

    def status(self) -> dict:
        with self._lock:
            snapshot = self.engine.status()
            snapshot["open_tasks"] = len(self._open)
            return snapshot


def engine_for(config: ExperimentConfig) -> Engine:
    if config.source == LIVE:
        return live_engine(config)
    if config.source == "replay":
        return replay_engine(config, 0)
    return synthetic_engine(config, 0)


def build_app(
    source: Union[ExperimentConfig, Engine],
    *,
    max_outstanding: int = 8,
    task_ttl_secs: float = 300.0,
    console_dir: Optional[Path] = None,
) -> FastAPI:
    if isinstance(source, Engine):
        engine = source
        base_url = None
    else:
        engine = engine_for(source)
        base_url = None
        if source.manifest is not None:
            base_url = read_manifest(source.manifest).payload_base_url

    broker = TaskBroker(
        engine,
        max_outstanding=max_outstanding,
        task_ttl_secs=task_ttl_secs,
        payload_base_url=base_url,
    )
    app = FastAPI(title="crowdpath task service")
    app.state.broker = broker

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/task")
    def get_task():
        if not broker.live:
            raise HTTPException(
                status_code=409, detail="engine is not running a live crowd"
            )
        task = broker.next_task()
        if task is None:
            return Response(status_code=204)
        return task

    @app.post("/answer")
    def post_answer(body: AnswerBody):
        if body.answer not in ("yes", "no"):
            raise HTTPException(status_code=400, detail="answer must be yes or no")
        cost = broker.submit(body.task_id, body.answer == "yes")
        if cost is None:
            raise HTTPException(status_code=410, detail="task unknown or closed")
        return {"task_id": body.task_id, "cost": cost}

    @app.get("/status")
    def get_status():
        return broker.status()

    static = console_dir if console_dir is not None else CONSOLE_DIR
    if static.is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="console")
    return app
