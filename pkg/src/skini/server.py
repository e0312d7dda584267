"""Live performance server.

Serves the audience client over HTTP, talks to it over a WebSocket with JSON
text frames, and runs the performance loop on the process clock.  Every state
mutation (selections, scheduler starts, the optional in-process simulated
audience) funnels through ``LivePerformance.pump``, which runs on the event
loop; connections only read immutable snapshots and their own FIFO queues,
so each client sees a strictly ordered message stream.

Wire protocol (all messages carry a ``type`` field):

    server -> client   hello{participantId}
                       matrix{revision, groups:[{name,kind,patterns:[ids]}]}
                       ack{patternId, delaySeconds, position, pending}
                       reject{patternId, reason, pending}
                       played{patternId, participantId}
                       feed{text}
                       pong{}
                       error{message}
    client -> server   select{patternId}
                       ping{}
"""

from __future__ import annotations

import asyncio
import contextlib
import threading
import time
from pathlib import Path
from typing import Dict, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import UnknownPattern
from .runtime import Admitted, Performance
from .score import Score
from .simulator import AudienceSim, SimulatorConfig

LOBBY = "lobby"
RUNNING = "running"
FINISHED = "finished"


class WallClock:
    def __init__(self):
        self._t0 = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._t0


class ManualClock:
    """Test clock; advance it explicitly, then ping to pump the loop."""

    def __init__(self):
        self._now = 0.0
        self._lock = threading.Lock()

    def now(self) -> float:
        with self._lock:
            return self._now

    def advance(self, dt: float):
        with self._lock:
            self._now += dt


class ClientSession:
    def __init__(self, participant_id: str):
        self.participant_id = participant_id
        self.queue: asyncio.Queue = asyncio.Queue()
        self.last_revision = -1
        self.socket_generation = 0

    def send(self, message: dict):
        if message.get("type") == "matrix":
            self.last_revision = message["revision"]
        self.queue.put_nowait(message)


class LivePerformance:
    """The single serialized writer around a running Performance."""

    def __init__(self, score: Score, clock=None,
                 sim_config: Optional[SimulatorConfig] = None):
        self.score = score
        self.clock = clock or WallClock()
        self.perf = Performance(score)
        self.lock = threading.RLock()
        self.sessions: Dict[str, ClientSession] = {}
        self.phase = LOBBY
        self.sim = None
        if sim_config is not None and sim_config.audience_size > 0:
            self.sim = AudienceSim(self.perf, sim_config, id_prefix="bot")
        self._minted = 0

    # --- lifecycle -------------------------------------------------------------
    def start(self):
        with self.lock:
            if self.phase is LOBBY or self.phase == LOBBY:
                self.perf.startup()
                self.phase = RUNNING
            self._flush()

    def mint_participant(self) -> str:
        with self.lock:
            self._minted += 1
            return f"p{self._minted}"

    def attach(self, participant_id: str) -> ClientSession:
        with self.lock:
            self.perf.register_participant(participant_id)
            session = ClientSession(participant_id)
            old = self.sessions.get(participant_id)
            if old is not None:
                session.socket_generation = old.socket_generation + 1
            self.sessions[participant_id] = session
            return session

    def detach(self, session: ClientSession):
        with self.lock:
            if self.sessions.get(session.participant_id) is session:
                del self.sessions[session.participant_id]

    # --- the loop ----------------------------------------------------------------
    def pump(self):
        """Advance playback to 'now', let the bot audience act, broadcast."""
        with self.lock:
            if self.phase != RUNNING and self.phase != FINISHED:
                return
            now = self.clock.now()
            if now > self.perf.clock.now:
                self.perf.advance_to(now)
            if self.sim is not None and not self.perf.finished:
                due = self.sim.next_action_time()
                if due is not None and due <= now:
                    self.sim.step(self.perf.snapshot(), now)
            if self.perf.finished and self.phase != FINISHED:
                self.phase = FINISHED
                self._broadcast({"type": "feed", "text": "performance finished"})
            self._flush()

    def select(self, session: ClientSession, pattern_id: str) -> None:
        """Admit or reject; the reply always precedes any caused broadcast."""
        with self.lock:
            self.pump()
            participant = self.perf.register_participant(session.participant_id)
            try:
                outcome = self.perf.select(session.participant_id, pattern_id)
            except UnknownPattern:
                session.send({
                    "type": "error",
                    "message": f"unknown pattern {pattern_id!r}",
                })
                return
            if isinstance(outcome, Admitted):
                session.send({
                    "type": "ack",
                    "patternId": pattern_id,
                    "delaySeconds": round(outcome.delay_estimate, 3),
                    "position": outcome.queue_position,
                    "pending": participant.pending,
                })
            else:
                session.send({
                    "type": "reject",
                    "patternId": pattern_id,
                    "reason": outcome.reason,
                    "pending": participant.pending,
                })
                # a rejection usually means the client's snapshot is stale
                session.send(self.matrix_message())
            self._flush()

    # --- messages ------------------------------------------------------------------
    def matrix_message(self) -> dict:
        snapshot = self.perf.snapshot()
        return {
            "type": "matrix",
            "revision": self.perf.matrix.revision,
            "groups": [
                {
                    "name": view.group,
                    "kind": view.kind,
                    "patterns": list(view.patterns),
                }
                for view in snapshot
            ],
        }

    def meta(self) -> dict:
        doc = self.score.doc
        return {
            "title": doc.title,
            "tempoBpm": doc.tempo_bpm,
            "quantize": doc.quantize,
            "beatsPerMeasure": doc.beats_per_measure,
            "instruments": list(doc.instruments),
            "groups": [
                {
                    "name": g.name,
                    "kind": g.kind,
                    "patterns": list(g.pattern_ids),
                }
                for g in doc.groups
            ],
            "phase": self.phase,
        }

    def _broadcast(self, message: dict):
        for session in self.sessions.values():
            session.send(message)

    def _flush(self):
        if self.perf.pop_deltas():
            self._broadcast(self.matrix_message())
        for played in self.perf.pop_notifications():
            owner = self.sessions.get(played.participant_id)
            if owner is not None:
                owner.send({
                    "type": "played",
                    "patternId": played.pattern_id,
                    "participantId": played.participant_id,
                })
            self._broadcast({
                "type": "feed",
                "text": f"{played.participant_id} played {played.pattern_id}",
            })


def build_app(score: Score, clock=None,
              sim_config: Optional[SimulatorConfig] = None,
              client_dir: Optional[str] = None,
              realtime: Optional[bool] = None) -> FastAPI:
    live = LivePerformance(score, clock=clock, sim_config=sim_config)
    if realtime is None:
        realtime = clock is None or isinstance(clock, WallClock)

    @contextlib.asynccontextmanager
    async def lifespan(app):
        live.start()
        task = None
        if realtime:
            async def tick():
                while True:
                    await asyncio.sleep(0.025)
                    live.pump()

            task = asyncio.create_task(tick())
        yield
        if task is not None:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="skini", lifespan=lifespan)
    app.state.live = live

    @app.get("/meta")
    def meta():
        return JSONResponse(live.meta())

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        pid = ws.query_params.get("participant") or live.mint_participant()
        session = live.attach(pid)
        session.send({"type": "hello", "participantId": pid})
        session.send(live.matrix_message())

        async def sender():
            generation = session.socket_generation
            while True:
                message = await session.queue.get()
                if session.socket_generation != generation:
                    break
                await ws.send_json(message)

        send_task = asyncio.create_task(sender())
        try:
            while True:
                try:
                    data = await ws.receive_json()
                except (ValueError, KeyError):
                    session.send({"type": "error", "message": "malformed frame"})
                    continue
                if live.sessions.get(pid) is not session:
                    # replaced by a reconnect; last writer wins
                    await ws.close(code=4000, reason="session replaced")
                    break
                kind = data.get("type") if isinstance(data, dict) else None
                if kind == "ping":
                    live.pump()
                    session.send({"type": "pong"})
                elif kind == "select":
                    pattern_id = data.get("patternId")
                    if not isinstance(pattern_id, str):
                        session.send({
                            "type": "error",
                            "message": "select needs a patternId",
                        })
                        continue
                    live.select(session, pattern_id)
                else:
                    session.send({
                        "type": "error",
                        "message": f"unknown message type {kind!r}",
                    })
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await send_task
            live.detach(session)

    if client_dir:
        app.mount(
            "/", StaticFiles(directory=client_dir, html=True), name="client"
        )
    else:
        static = Path(__file__).parent / "static" / "index.html"

        @app.get("/")
        def index():
            return FileResponse(static)

    return app


def serve(score: Score, host="127.0.0.1", port=8080,
          sim_config: Optional[SimulatorConfig] = None,
          client_dir: Optional[str] = None):
    """Run the server until interrupted (blocking)."""
    import uvicorn

    app = build_app(score, sim_config=sim_config, client_dir=client_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
