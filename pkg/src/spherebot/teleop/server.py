"""Real-time teleoperation service.

REST + websocket front end over :class:`SimSession`.  Each session runs
one asyncio loop task that paces the simulation against the wall clock,
drains queued commands between slices and fans telemetry snapshots out to
connected clients at the configured rate.  Sessions with no clients are
reaped after a grace period.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import time
import uuid

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware

from ..errors import ParameterError
from ..model import RobotParams
from . import protocol
from .protocol import BoundsError, SchemaError
from .session import SessionConfig, SimSession

REAP_AFTER_SECONDS = 60.0
# Upper bound on catch-up work per loop iteration so command handling and
# telemetry stay responsive when stepping falls behind the wall clock.
MAX_SLICES_PER_ITERATION = 40


class SessionRuntime:
    """One session plus its loop task and client fan-out queues."""

    def __init__(self, session: SimSession):
        self.session = session
        self.commands: asyncio.Queue = asyncio.Queue()
        self.clients: dict[int, asyncio.Queue] = {}
        self._client_ids = itertools.count()
        self.last_client_seen = time.monotonic()
        self.task: asyncio.Task | None = None
        self.closed = False

    def add_client(self) -> tuple[int, asyncio.Queue]:
        cid = next(self._client_ids)
        queue: asyncio.Queue = asyncio.Queue(maxsize=256)
        self.clients[cid] = queue
        self.last_client_seen = time.monotonic()
        return cid, queue

    def drop_client(self, cid: int) -> None:
        self.clients.pop(cid, None)
        self.last_client_seen = time.monotonic()

    def broadcast(self, message: dict) -> None:
        for queue in self.clients.values():
            if queue.full():
                try:
                    queue.get_nowait()
                except asyncio.QueueEmpty:
                    pass
            queue.put_nowait(message)

    async def run(self) -> None:
        """Pace the simulation and publish telemetry until reaped."""
        session = self.session
        slice_dt = session.config.slice_seconds
        factor = session.config.real_time_factor
        telemetry_period = 1.0 / session.config.telemetry_hz
        active_wall = 0.0
        last = time.monotonic()
        next_telemetry = last
        while not self.closed:
            now = time.monotonic()
            if not session.paused:
                active_wall += now - last
            last = now

            # Drain commands between slices: atomic wrt stepping.
            while not self.commands.empty():
                command, reply = self.commands.get_nowait()
                try:
                    applied = session.apply_command(command)
                    reply.set_result(protocol.ack_message(command, applied))
                except BoundsError as exc:
                    reply.set_result(protocol.error_message("bounds", str(exc)))
                except ParameterError as exc:
                    reply.set_result(protocol.error_message("params", str(exc)))

            steps = 0
            while (
                not session.paused
                and session.fault is None
                and session.sim_time < active_wall * factor - slice_dt
                and steps < MAX_SLICES_PER_ITERATION
            ):
                session.step_slice()
                steps += 1
            if session.fault is not None:
                self.broadcast(
                    protocol.error_message("numerical", session.fault)
                )
                session.fault = None  # reported; session stays paused

            if now >= next_telemetry:
                self.broadcast(session.telemetry())
                next_telemetry = max(next_telemetry + telemetry_period, now)

            if (
                not self.clients
                and time.monotonic() - self.last_client_seen > REAP_AFTER_SECONDS
            ):
                self.closed = True
                break
            await asyncio.sleep(min(slice_dt, telemetry_period) / 2.0)


def create_app() -> FastAPI:
    app = FastAPI(title="spherebot teleop")
    # the browser console is served as a static bundle from any origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    runtimes: dict[str, SessionRuntime] = {}

    def _get_runtime(session_id: str) -> SessionRuntime:
        runtime = runtimes.get(session_id)
        if runtime is None or runtime.closed:
            raise HTTPException(status_code=404, detail="unknown session")
        return runtime

    @app.post("/session")
    async def create_session(body: dict | None = None):
        body = body or {}
        try:
            params = (
                RobotParams.from_dict(body["params"])
                if "params" in body
                else None
            )
        except ParameterError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        config = SessionConfig()
        for key in ("telemetry_hz", "real_time_factor", "rtol", "atol"):
            if key in body:
                try:
                    setattr(config, key, float(body[key]))
                except (TypeError, ValueError) as exc:
                    raise HTTPException(
                        status_code=422, detail=f"bad {key}"
                    ) from exc
        session_id = uuid.uuid4().hex[:12]
        session = SimSession(session_id, params, config)
        runtime = SessionRuntime(session)
        runtime.task = asyncio.create_task(runtime.run())
        runtimes[session_id] = runtime
        return {"session_id": session_id, "params": session.params.to_dict()}

    @app.get("/session/{session_id}/config")
    async def get_config(session_id: str):
        return _get_runtime(session_id).session.config_payload()

    @app.websocket("/ws/session/{session_id}")
    async def session_socket(websocket: WebSocket, session_id: str):
        runtime = runtimes.get(session_id)
        if runtime is None or runtime.closed:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        cid, queue = runtime.add_client()

        async def sender():
            while True:
                message = await queue.get()
                await websocket.send_text(json.dumps(message))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await websocket.receive_text()
                try:
                    command = protocol.parse_command(json.loads(raw))
                except json.JSONDecodeError:
                    await websocket.send_text(json.dumps(
                        protocol.error_message("schema", "invalid JSON")
                    ))
                    continue
                except SchemaError as exc:
                    await websocket.send_text(json.dumps(
                        protocol.error_message("schema", str(exc))
                    ))
                    continue
                except BoundsError as exc:
                    await websocket.send_text(json.dumps(
                        protocol.error_message("bounds", str(exc))
                    ))
                    continue
                reply = asyncio.get_running_loop().create_future()
                runtime.commands.put_nowait((command, reply))
                await websocket.send_text(json.dumps(await reply))
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            runtime.drop_client(cid)

    return app
