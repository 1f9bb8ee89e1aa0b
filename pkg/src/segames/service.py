"""FastAPI service wrapping the game server core.

REST endpoints cover health, lobby inspection, content listing, and batch
self-explanation scoring.  Actual play happens on the WebSocket endpoint
``/play``: each WebSocket text message carries exactly one wire frame in
both directions.
"""

from __future__ import annotations

import asyncio
from contextlib import asynccontextmanager
from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from pydantic import BaseModel, Field

from .clock import AsyncioScheduler
from .config import AppSettings, load_settings
from .content import ContentBundle, default_content_dir, load_content, prior_text
from .eventlog import EventLog
from .server import DuplicatePlayer, GameServer


class HealthResponse(BaseModel):
    status: str
    zone: str
    rooms: int


class RoomInfo(BaseModel):
    id: str
    game_type: str
    players: List[str]
    started: bool
    finished: bool
    min_players: int
    max_players: int


class TextSummary(BaseModel):
    id: str
    title: str
    sentence_count: int
    target_indices: List[int]


class EvaluateRequest(BaseModel):
    se: str
    text_id: str
    target_index: int = Field(ge=0)


class EvaluateResponse(BaseModel):
    score: int
    too_short: bool
    too_similar: bool
    irrelevant: bool
    features: Dict[str, float]


def create_app(content_dir: Optional[str] = None, config_path: Optional[str] = None,
               log_dir: str = "./logs", settings: Optional[AppSettings] = None,
               content: Optional[ContentBundle] = None) -> FastAPI:
    settings = settings or load_settings(config_path)
    content = content or load_content(content_dir or default_content_dir())

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        loop = asyncio.get_running_loop()
        app.state.server = GameServer(content, settings, AsyncioScheduler(loop),
                                      EventLog(log_dir))
        try:
            yield
        finally:
            app.state.server.log.close()

    app = FastAPI(title="segames", version="0.1.0", lifespan=lifespan)
    app.state.settings = settings
    app.state.content = content
    app.state.log_dir = log_dir
    app.state.server = None

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        server: GameServer = app.state.server
        return HealthResponse(status="ok", zone=server.zone.name, rooms=len(server.zone.rooms))

    @app.get("/rooms", response_model=List[RoomInfo])
    def rooms() -> List[RoomInfo]:
        server: GameServer = app.state.server
        return [RoomInfo(id=r.id, game_type=r.game_type.value, players=list(r.players),
                         started=r.started, finished=r.finished,
                         min_players=r.min_players, max_players=r.max_players)
                for r in server.zone.rooms]

    @app.get("/content/texts", response_model=List[TextSummary])
    def texts() -> List[TextSummary]:
        return [TextSummary(id=t.id, title=t.title, sentence_count=len(t.sentences),
                            target_indices=list(t.target_indices))
                for t in content.texts.values()]

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest) -> EvaluateResponse:
        server: GameServer = app.state.server
        text = content.texts.get(req.text_id)
        if text is None:
            raise HTTPException(404, f"unknown text {req.text_id!r}")
        if not 0 <= req.target_index < len(text.sentences):
            raise HTTPException(422, "target_index out of range")
        result = server.evaluator.evaluate(req.se, text.sentences[req.target_index],
                                           prior_text(text, req.target_index))
        return EvaluateResponse(score=result.score, too_short=result.too_short,
                                too_similar=result.too_similar, irrelevant=result.irrelevant,
                                features=result.features)

    @app.websocket("/play")
    async def play(ws: WebSocket, player: str = Query(min_length=1)) -> None:
        server: GameServer = app.state.server
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue()
        try:
            server.connect(player, queue.put_nowait)
        except DuplicatePlayer:
            await ws.send_text("#!ERROR|DuplicatePlayer|player id already connected")
            await ws.close()
            return

        async def writer() -> None:
            while True:
                await ws.send_text(await queue.get())

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                frame = await ws.receive_text()
                server.handle_frame(player, frame)
        except WebSocketDisconnect:
            pass
        finally:
            writer_task.cancel()
            server.disconnect(player)

    return app
