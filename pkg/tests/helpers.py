"""Shared builders for session-level tests: keyboards, configs, and a
scripted typist that emits the exact gesture sequence for a phrase list."""

from radialkb.corpus import Lexicon, PhraseSet
from radialkb.geometry import (
    ALPHABET,
    Keyboard,
    LetterLayout,
    Posture,
    letter_to_key,
    uniform_cluster_layout,
)
from radialkb.gestures import GestureEvent, GestureKind, StrategyConfig
from radialkb.session import Mode, Session, SessionConfig


def even_groups(k: int) -> tuple[str, ...]:
    base, extra = divmod(26, k)
    out, pos = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        out.append(ALPHABET[pos : pos + size])
        pos += size
    return tuple(out)


def nine_key_keyboard(groups=None, posture=Posture.STANDING) -> Keyboard:
    return Keyboard(
        cluster_layout=uniform_cluster_layout(9, posture=posture),
        letter_layout=LetterLayout(tuple(groups) if groups else even_groups(8)),
    )


def visual_config(lexicon: Lexicon, phrases, keyboard=None, **overrides) -> SessionConfig:
    return SessionConfig(
        mode=overrides.pop("mode", Mode.VISUAL),
        strategy=overrides.pop("strategy", StrategyConfig.upstand()),
        posture=Posture.STANDING,
        keyboard=keyboard or nine_key_keyboard(),
        phrases=PhraseSet(tuple(phrases)),
        lexicon=lexicon,
        **overrides,
    )


def script_phrases(config: SessionConfig, step_ms: int = 100, start_ms: int = 0):
    """The op sequence that perfectly transcribes every configured phrase.

    Returns [("gesture", GestureEvent) | ("advance", t_ms), ...].  Ops are
    generated against a scratch session so candidate positions and page
    flips are exact; replaying them through any interface reproduces the
    same state trajectory.
    """
    scratch = Session(config)
    ops: list[tuple] = []
    t = start_ms

    def send(kind, position=None):
        nonlocal t
        foot = (
            config.strategy.navigation_foot
            if kind == GestureKind.CURSOR_MOVE
            else config.strategy.command_foot
        )
        event = GestureEvent(kind=kind, foot=foot, timestamp_ms=t, position=position)
        scratch.apply_event(event)
        ops.append(("gesture", event))
        if kind != GestureKind.CURSOR_MOVE:
            t += step_ms

    n_zones = config.page_size + 2
    for phrase in config.phrases:
        for word in phrase.split():
            for ch in word:
                key = letter_to_key(config.keyboard, ch)
                send(GestureKind.CURSOR_MOVE,
                     config.keyboard.cluster_layout.keys[key].center)
                send(GestureKind.FOREFOOT_TAP)
            send(GestureKind.FLAT_FORWARD)
            words = [w for w, _ in scratch.state.candidates]
            idx = words.index(word)
            for _ in range(idx // config.page_size):
                send(GestureKind.CURSOR_MOVE, (config.page_size + 1.5) / n_zones)
                send(GestureKind.FOREFOOT_TAP)
            send(GestureKind.CURSOR_MOVE, (1.5 + idx % config.page_size) / n_zones)
            send(GestureKind.FOREFOOT_TAP)
        ops.append(("advance", t))
        t += step_ms
    return ops


def replay_through_session(config: SessionConfig, ops) -> Session:
    session = Session(config)
    for op, arg in ops:
        if op == "gesture":
            session.apply_event(arg)
        else:
            session.advance_phrase(arg)
    return session


# -- live service harness for socket-level tests -----------------------

import asyncio
import json
import socket
import threading

from radialkb.service import run_service


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class ServiceThread:
    """Run the asyncio service on a daemon thread for socket-level tests."""

    def __init__(self, defaults, log_dir=None, ws=False):
        self.port = free_port()
        self.ws_port = free_port() if ws else None
        self.log_dir = log_dir
        self.loop = asyncio.new_event_loop()
        self.stop_event = None
        self.ready = threading.Event()
        self.thread = threading.Thread(target=self._run, args=(defaults,), daemon=True)

    def _run(self, defaults):
        asyncio.set_event_loop(self.loop)
        self.stop_event = asyncio.Event()
        ready = asyncio.Event()

        async def main():
            task = asyncio.create_task(
                run_service(defaults, port=self.port, ws_port=self.ws_port,
                            log_dir=self.log_dir, ready=ready, stop=self.stop_event)
            )
            await ready.wait()
            self.ready.set()
            await task

        self.loop.run_until_complete(main())

    def __enter__(self):
        self.thread.start()
        assert self.ready.wait(timeout=10)
        return self

    def __exit__(self, *exc):
        self.loop.call_soon_threadsafe(self.stop_event.set)
        self.thread.join(timeout=10)


class LineClient:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=10)
        self.buf = b""

    def send(self, record) -> None:
        self.sock.sendall(json.dumps(record).encode() + b"\n")

    def recv(self):
        while b"\n" not in self.buf:
            chunk = self.sock.recv(65536)
            if not chunk:
                raise EOFError("server closed")
            self.buf += chunk
        line, self.buf = self.buf.split(b"\n", 1)
        return json.loads(line)

    def close(self):
        self.sock.close()
