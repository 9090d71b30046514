"""Live session service: one simulation kernel streamed over a WebSocket.

The kernel runs on its own thread, paced to wall clock at the simulation
step. It never skips ticks: if stepping falls behind real time the stream
slows down instead. State messages are decimated to the requested rate.
The first connected client owns operator input; later clients observe.
"""
import asyncio
import itertools
import json
import threading
import time
import uuid

from .core import ConfigError, SimulationFault, Tick
from .session import build_session
from .telemetry import SCHEMA_VERSION, TelemetrySeries, record_append

INPUT_TYPES = ("master_input", "set_mode", "set_channel", "start", "stop")


def _state_payload(record: dict) -> dict:
    """Trimmed per-tick snapshot for the UI."""
    return {
        "tick": record["tick"],
        "time": record["time"],
        "arms": [
            {k: arm[k] for k in ("name", "x_m", "v_m", "x_s", "v_s",
                                 "f_h", "f_e", "f_m_cmd", "f_s_cmd",
                                 "mode", "channel_ages", "energy", "budget")}
            for arm in record["arms"]],
        "objects": record.get("objects", []),
        "fingers": record.get("fingers", []),
    }


class _Client:
    _ids = itertools.count(1)

    def __init__(self, loop: asyncio.AbstractEventLoop):
        self.id = next(self._ids)
        self.loop = loop
        self.queue: asyncio.Queue = asyncio.Queue()

    def post(self, message: dict):
        """Thread-safe enqueue from the kernel thread."""
        self.loop.call_soon_threadsafe(self.queue.put_nowait, message)


class LiveSession:
    """Kernel thread + client registry for one served scenario."""

    def __init__(self, raw_config: dict, rate_hz: float = 60.0,
                 telemetry_path: str = None, realtime: bool = True):
        self.session = build_session(raw_config)
        self.sim = self.session.sim
        self.series = TelemetrySeries(header=self.session.header())
        self.session.validate()
        self.session_id = uuid.uuid4().hex[:12]
        self.decimation = max(1, round(1.0 / (self.sim.dt * rate_hz)))
        self.telemetry_path = telemetry_path
        self.realtime = realtime
        self.lock = threading.RLock()
        self.clients: list[_Client] = []
        self.owner_id = None
        self.tick = 0
        self.running = threading.Event()
        self.running.set()
        self.finished = threading.Event()
        self._seq = itertools.count()
        self._frame = itertools.count()  # gapless, state messages only
        self._thread = None

    # -- lifecycle -------------------------------------------------------

    def start(self):
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def shutdown(self):
        self.finished.set()
        self.running.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
        self.flush()

    def flush(self):
        if self.telemetry_path:
            with self.lock:
                self.series.inputs = list(self.session.input_log)
                self.series.save(self.telemetry_path)

    def _run(self):
        dt = self.sim.dt
        next_deadline = time.monotonic()
        while self.tick < self.sim.n_ticks and not self.finished.is_set():
            self.running.wait()
            if self.finished.is_set():
                break
            if self.realtime:
                next_deadline += dt
                delay = next_deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
                else:
                    # overrun: slow the stream, never skip a tick
                    next_deadline = time.monotonic()
            with self.lock:
                try:
                    record = self.session.step(Tick(self.tick, dt))
                except SimulationFault as fault:
                    self.series.fault = {"module": fault.module,
                                         "tick": fault.tick, "message": str(fault)}
                    self._broadcast({"type": "fault",
                                     "payload": self.series.fault})
                    break
                record_append(self.series, record)
                self.tick += 1
            if record["tick"] % self.decimation == 0:
                payload = _state_payload(record)
                payload["frame"] = next(self._frame)
                self._broadcast({"type": "state", "payload": payload})
        self.finished.set()
        self.flush()

    # -- messaging -------------------------------------------------------

    def _stamp(self, message: dict) -> dict:
        message["session_id"] = self.session_id
        message["seq"] = next(self._seq)
        return message

    def _broadcast(self, message: dict):
        message = self._stamp(message)
        with self.lock:
            clients = list(self.clients)
        for client in clients:
            client.post(message)

    def register(self, client: _Client) -> dict:
        with self.lock:
            self.clients.append(client)
            if self.owner_id is None:
                self.owner_id = client.id
            return self._stamp({
                "type": "info",
                "payload": {"schema_version": SCHEMA_VERSION,
                            "dt": self.sim.dt,
                            "dof": self.sim.dof,
                            "n_ticks": self.sim.n_ticks,
                            "decimation": self.decimation,
                            "owner": self.owner_id == client.id,
                            "config": self.session.config}})

    def unregister(self, client: _Client):
        with self.lock:
            if client in self.clients:
                self.clients.remove(client)
            # hold-last: a vanished owner's last target keeps acting;
            # input ownership passes to the next client, if any
            if self.owner_id == client.id:
                self.owner_id = self.clients[0].id if self.clients else None

    def handle(self, client: _Client, message) -> dict | None:
        """Apply one inbound client message; returns a fault reply or None."""
        if not isinstance(message, dict) or "type" not in message:
            return self._stamp({"type": "fault",
                                "payload": {"reason": "malformed message"}})
        mtype = message["type"]
        if mtype not in INPUT_TYPES:
            return self._stamp({"type": "fault",
                                "payload": {"reason": f"unknown message type {mtype!r}"}})
        with self.lock:
            if client.id != self.owner_id:
                return self._stamp({"type": "fault",
                                    "payload": {"reason": "read-only client"}})
            if mtype == "start":
                self.running.set()
                return None
            if mtype == "stop":
                self.running.clear()
            elif self.finished.is_set():
                return self._stamp({"type": "fault",
                                    "payload": {"reason": "session finished"}})
            else:
                try:
                    self.session.inject_input({
                        "tick": self.tick,  # quantized to the next unstepped tick
                        "type": mtype,
                        "payload": message.get("payload", {})})
                except (ConfigError, KeyError, TypeError, ValueError) as exc:
                    return self._stamp({"type": "fault",
                                        "payload": {"reason": str(exc)}})
        if mtype == "stop":
            self.flush()
        return None


def create_app(raw_config: dict, rate_hz: float = 60.0,
               telemetry_path: str = None, realtime: bool = True):
    from contextlib import asynccontextmanager

    from fastapi import FastAPI, WebSocket, WebSocketDisconnect

    live = LiveSession(raw_config, rate_hz=rate_hz,
                       telemetry_path=telemetry_path, realtime=realtime)

    @asynccontextmanager
    async def lifespan(app):
        live.start()
        yield
        live.shutdown()

    app = FastAPI(lifespan=lifespan)
    app.state.live = live

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        client = _Client(asyncio.get_running_loop())
        await websocket.send_json(live.register(client))

        async def pump_out():
            while True:
                await websocket.send_json(await client.queue.get())

        sender = asyncio.create_task(pump_out())
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    message = json.loads(text)
                except json.JSONDecodeError:
                    message = None
                reply = live.handle(client, message)
                if reply is not None:
                    await websocket.send_json(reply)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            live.unregister(client)

    return app


def serve(raw_config: dict, port: int = 8000, rate_hz: float = 60.0,
          telemetry_path: str = None):
    import uvicorn

    app = create_app(raw_config, rate_hz=rate_hz, telemetry_path=telemetry_path)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
