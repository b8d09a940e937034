"""Wire protocol bridging live typing sessions to external clients.

Messages are JSON records, one per line over a local TCP stream (or one per
text frame over the optional WebSocket listener, which browsers need).
Every client message is answered with a state snapshot or a typed error;
snapshots are full-state with strictly increasing sequence numbers, so a
client that applies them in order reconstructs the session exactly.

The engine itself is transport-free: `ProtocolEngine.handle` maps one
request record to a list of response records, and the session event logs it
produces are byte-identical to driving the session module directly.
"""

from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .corpus import Lexicon, PhraseSet
from .decoder import page as page_slice
from .decoder import CandidateList
from .geometry import (
    CalibrationProfile,
    Keyboard,
    Posture,
    keyboard_from_dict,
    keyboard_to_dict,
)
from .gestures import (
    Foot,
    GestureEvent,
    GestureKind,
    GestureStateMachine,
    SensorFrame,
    StrategyConfig,
)
from .metrics import compute_metrics
from .session import Mode, ModeError, Session, SessionConfig, state_to_dict, write_event_log

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

CLIENT_TYPES = {
    "Hello", "Calibrate", "Frame", "EmulatedGesture", "CheatSheet",
    "PhraseAdvance", "CandidatePage", "Metrics",
}


@dataclass
class ServiceDefaults:
    keyboard: Keyboard
    lexicon: Lexicon
    phrases: PhraseSet
    page_size: int = 5
    decode_mode: str = "exact"


@dataclass
class _LiveSession:
    session: Session
    machine: GestureStateMachine | None = None
    calibration: CalibrationProfile | None = None
    seq: int = 0
    last_seen_ms: int = 0

    def next_seq(self) -> int:
        self.seq += 1
        return self.seq


class ProtocolEngine:
    """Session registry plus the request/response mapping."""

    def __init__(self, defaults: ServiceDefaults, log_dir: str | Path | None = None):
        self.defaults = defaults
        self.log_dir = Path(log_dir) if log_dir else None
        self.sessions: dict[str, _LiveSession] = {}
        self._counter = 0

    # -- message helpers -------------------------------------------------

    @staticmethod
    def _msg(type_: str, session_id: str | None, payload: dict, seq: int | None = None) -> dict:
        out = {"v": PROTOCOL_VERSION, "type": type_, "payload": payload}
        if session_id is not None:
            out["session"] = session_id
        if seq is not None:
            out["seq"] = seq
        return out

    def _error(self, session_id: str | None, code: str, message: str) -> list[dict]:
        return [self._msg("Error", session_id, {"code": code, "message": message})]

    def _snapshot(self, session_id: str, live: _LiveSession) -> dict:
        s = live.session.state
        size = live.session.config.page_size
        candidates = CandidateList(entries=s.candidates, page_size=size)
        current_page = [[w, sc] for w, sc in page_slice(candidates, s.page)]
        cheat_remaining = 0
        if s.cheat_visible_until_ms is not None:
            cheat_remaining = max(0, s.cheat_visible_until_ms - live.last_seen_ms)
        try:
            running = compute_metrics(live.session.log).to_dict() if not live.session.finished else None
        except ValueError:
            running = None
        payload = {
            "state": state_to_dict(s),
            "presented": None if live.session.finished else live.session.presented,
            "phrase_count": len(live.session.config.phrases),
            "finished": live.session.finished,
            "page_words": current_page,
            "n_pages": candidates.n_pages,
            "selection_zone": s.selection_zone(size),
            "cheat_remaining_ms": cheat_remaining,
            "running_metrics": running,
        }
        return self._msg("StateSnapshot", session_id, payload, seq=live.next_seq())

    def _metrics_message(self, session_id: str, live: _LiveSession) -> dict:
        session = live.session
        records = list(session.log)
        if not session.finished:
            records.append(
                {"t": live.last_seen_ms, "kind": "phrase_end",
                 "payload": {"transcribed": session.state.transcribed}, "digest": ""}
            )
        try:
            report = compute_metrics(records).to_dict()
        except ValueError:
            report = None
        return self._msg("Metrics", session_id, {"report": report}, seq=live.next_seq())

    # -- dispatch ---------------------------------------------------------

    def handle(self, msg: dict) -> list[dict]:
        if not isinstance(msg, dict) or "type" not in msg:
            return self._error(None, "malformed", "message must be an object with a type")
        mtype = msg.get("type")
        if mtype not in CLIENT_TYPES:
            return self._error(msg.get("session"), "unknown_type", f"unknown type {mtype!r}")
        payload = msg.get("payload") or {}
        if not isinstance(payload, dict):
            return self._error(msg.get("session"), "malformed", "payload must be an object")

        if mtype == "Hello":
            return self._handle_hello(msg, payload)

        session_id = msg.get("session")
        live = self.sessions.get(session_id)
        if live is None:
            return self._error(session_id, "unknown_session", f"no session {session_id!r}")
        if msg.get("v") != PROTOCOL_VERSION:
            return self._error(session_id, "bad_version", "unsupported protocol version")

        handler = {
            "Calibrate": self._handle_calibrate,
            "Frame": self._handle_frame,
            "EmulatedGesture": self._handle_gesture,
            "CheatSheet": self._handle_cheat_sheet,
            "PhraseAdvance": self._handle_phrase_advance,
            "CandidatePage": self._handle_candidate_page,
            "Metrics": lambda sid, lv, p: [self._metrics_message(sid, lv)],
        }[mtype]
        try:
            return handler(session_id, live, payload)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModeError):
                return self._error(session_id, "mode_violation", str(exc))
            return self._error(session_id, "bad_payload", str(exc))

    def _handle_hello(self, msg: dict, payload: dict) -> list[dict]:
        if msg.get("v") != PROTOCOL_VERSION:
            return self._error(None, "bad_version",
                               f"protocol version {msg.get('v')!r} not supported")
        try:
            mode = Mode(payload.get("mode", "visual"))
            strategy = StrategyConfig.named(payload.get("strategy", "upstand"))
            posture = Posture(payload.get("posture", self.defaults.keyboard.posture.value))
            keyboard = (
                keyboard_from_dict(payload["keyboard"])
                if "keyboard" in payload
                else self.defaults.keyboard
            )
            phrases = (
                PhraseSet(tuple(payload["phrases"]))
                if "phrases" in payload
                else self.defaults.phrases
            )
            config = SessionConfig(
                mode=mode,
                strategy=strategy,
                posture=posture,
                keyboard=keyboard,
                phrases=phrases,
                lexicon=self.defaults.lexicon,
                page_size=int(payload.get("page_size", self.defaults.page_size)),
                decode_mode=payload.get("decode", self.defaults.decode_mode),
            )
        except (KeyError, TypeError, ValueError) as exc:
            return self._error(None, "bad_payload", str(exc))
        self._counter += 1
        session_id = f"s{self._counter}"
        live = _LiveSession(session=Session(config, session_id=session_id))
        self.sessions[session_id] = live
        hello = self._msg(
            "Hello",
            session_id,
            {
                "session_id": session_id,
                "keyboard": keyboard_to_dict(keyboard),
                "phrases": list(phrases.phrases),
                "mode": mode.value,
                "strategy": strategy.strategy.value,
                "page_size": config.page_size,
                "cheat_sheet_duration_ms": config.cheat_sheet_duration_ms,
            },
        )
        return [hello, self._snapshot(session_id, live)]

    def _handle_calibrate(self, session_id: str, live: _LiveSession, payload: dict) -> list[dict]:
        cal = CalibrationProfile(
            posture=live.session.config.posture,
            far_left_deg=float(payload["far_left_deg"]),
            rest_deg=float(payload["rest_deg"]),
            far_right_deg=float(payload["far_right_deg"]),
        )
        live.calibration = cal
        live.machine = GestureStateMachine(live.session.config.strategy, cal)
        return [self._snapshot(session_id, live)]

    def _handle_frame(self, session_id: str, live: _LiveSession, payload: dict) -> list[dict]:
        if live.machine is None:
            return self._error(session_id, "not_calibrated",
                               "send Calibrate before streaming frames")
        frame = SensorFrame(
            timestamp_ms=int(payload["timestamp"]),
            foot=Foot(payload["foot"]),
            yaw_deg=float(payload["yaw_deg"]),
            forward_disp_m=float(payload.get("forward_disp_m", 0.0)),
            forefoot_contact=bool(payload.get("ff", False)),
            rearfoot_contact=bool(payload.get("rf", False)),
        )
        live.last_seen_ms = max(live.last_seen_ms, frame.timestamp_ms)
        for event in live.machine.process_frame(frame):
            live.session.apply_event(event)
        return [self._snapshot(session_id, live)]

    def _handle_gesture(self, session_id: str, live: _LiveSession, payload: dict) -> list[dict]:
        kind = GestureKind(payload["kind"])
        event = GestureEvent(
            kind=kind,
            foot=Foot(payload.get("foot", "right")),
            timestamp_ms=int(payload["timestamp"]),
            position=(
                float(payload["position"]) if kind == GestureKind.CURSOR_MOVE else None
            ),
        )
        live.last_seen_ms = max(live.last_seen_ms, event.timestamp_ms)
        live.session.apply_event(event)
        return [self._snapshot(session_id, live)]

    def _handle_cheat_sheet(self, session_id: str, live: _LiveSession, payload: dict) -> list[dict]:
        now = int(payload["timestamp"])
        live.last_seen_ms = max(live.last_seen_ms, now)
        try:
            live.session.request_cheat_sheet(now)
        except ModeError as exc:
            return self._error(session_id, "mode_violation", str(exc))
        return [self._snapshot(session_id, live)]

    def _handle_phrase_advance(self, session_id: str, live: _LiveSession, payload: dict) -> list[dict]:
        now = int(payload.get("timestamp", live.last_seen_ms))
        live.last_seen_ms = max(live.last_seen_ms, now)
        more = live.session.advance_phrase(now)
        out = [self._snapshot(session_id, live)]
        if not more:
            out.append(self._metrics_message(session_id, live))
            self._write_log(session_id, live)
        return out

    def _handle_candidate_page(self, session_id: str, live: _LiveSession, payload: dict) -> list[dict]:
        index = int(payload.get("page", live.session.state.page))
        size = live.session.config.page_size
        candidates = CandidateList(entries=live.session.state.candidates, page_size=size)
        entries = [[w, s] for w, s in page_slice(candidates, index)]
        return [
            self._msg("CandidatePage", session_id,
                      {"page": index, "words": entries, "n_pages": candidates.n_pages},
                      seq=live.next_seq())
        ]

    # -- lifecycle --------------------------------------------------------

    def _write_log(self, session_id: str, live: _LiveSession) -> None:
        if self.log_dir is None:
            return
        self.log_dir.mkdir(parents=True, exist_ok=True)
        write_event_log(live.session.log, self.log_dir / f"{session_id}.jsonl")

    def close_connection_sessions(self, session_ids: list[str]) -> None:
        """Transport hook: persist logs for sessions whose client went away."""
        for session_id in session_ids:
            live = self.sessions.get(session_id)
            if live is not None:
                self._write_log(session_id, live)


def _respond_lines(engine: ProtocolEngine, line: str, owned: list[str]) -> list[str]:
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        return [json.dumps(engine._msg("Error", None, {"code": "malformed", "message": str(exc)}),
                           sort_keys=True)]
    responses = engine.handle(msg)
    for r in responses:
        if r["type"] == "Hello" and r.get("session"):
            owned.append(r["session"])
    return [json.dumps(r, sort_keys=True) for r in responses]


async def _serve_tcp(engine: ProtocolEngine, host: str, port: int):
    async def on_connect(reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        owned: list[str] = []
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                text = line.decode("utf-8").strip()
                if not text:
                    continue
                for out in _respond_lines(engine, text, owned):
                    writer.write(out.encode("utf-8") + b"\n")
                await writer.drain()
        except (ConnectionResetError, asyncio.IncompleteReadError):
            pass
        finally:
            engine.close_connection_sessions(owned)
            writer.close()

    return await asyncio.start_server(on_connect, host, port)


async def _serve_websocket(engine: ProtocolEngine, host: str, port: int):
    import websockets

    async def on_connect(ws):
        owned: list[str] = []
        try:
            async for raw in ws:
                text = raw if isinstance(raw, str) else raw.decode("utf-8")
                for out in _respond_lines(engine, text.strip(), owned):
                    await ws.send(out)
        finally:
            engine.close_connection_sessions(owned)

    return await websockets.serve(on_connect, host, port)


async def run_service(
    defaults: ServiceDefaults,
    host: str = "127.0.0.1",
    port: int = 8765,
    ws_port: int | None = None,
    log_dir: str | Path | None = None,
    ready: "asyncio.Event | None" = None,
    stop: "asyncio.Event | None" = None,
) -> None:
    """Run the TCP listener (and optionally a WebSocket one) until stopped."""
    engine = ProtocolEngine(defaults, log_dir=log_dir)
    servers = [await _serve_tcp(engine, host, port)]
    if ws_port is not None:
        servers.append(await _serve_websocket(engine, host, ws_port))
    log.info("listening on %s:%d%s", host, port,
             f" (ws :{ws_port})" if ws_port else "")
    if ready is not None:
        ready.set()
    try:
        if stop is not None:
            await stop.wait()
        else:
            await asyncio.Event().wait()  # run forever
    finally:
        for server in servers:
            server.close()
        for server in servers:
            try:
                await server.wait_closed()
            except Exception:  # websockets server lacks wait_closed pre-close
                pass
