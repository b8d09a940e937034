// Test doubles: an in-memory transport, a manual clock, and snapshot
// builders matching the server's wire shapes.

import type {
  ClientMessage,
  KeyboardDoc,
  ServerMessage,
  SnapshotPayload,
  Transport,
} from '../src/protocol.js';

export class FakeTransport implements Transport {
  sent: ClientMessage[] = [];
  closed = false;

  send(message: ClientMessage): boolean {
    this.sent.push(message);
    return true;
  }

  close(): void {
    this.closed = true;
  }

  lastSent(): ClientMessage {
    return this.sent[this.sent.length - 1];
  }
}

export class FakeClock {
  t = 0;

  now(): number {
    return this.t;
  }

  tick(ms: number): void {
    this.t += ms;
  }
}

export function nineKeyKeyboard(): KeyboardDoc {
  const groups = ['abcd', 'efgh', 'ijk', 'lmn', 'opq', 'rst', 'uvw', 'xyz'];
  const keys = [];
  for (let i = 0; i < 9; i += 1) {
    keys.push({
      lo: i / 9,
      hi: i === 8 ? 1.0 : (i + 1) / 9,
      center: (i + 0.5) / 9,
      sigma: 0.05,
    });
  }
  return { version: 1, posture: 'standing', keys, space_key_index: 4, groups };
}

export function snapshot(overrides: Partial<SnapshotPayload> = {}): SnapshotPayload {
  const base: SnapshotPayload = {
    state: {
      area: 'letter',
      cursor: 0.5,
      pending: [],
      candidates: [],
      page: 0,
      committed: [],
      phrase_index: 0,
      cheat_visible_until_ms: null,
      cheat_requests: 0,
    },
    presented: 'the cat',
    phrase_count: 1,
    finished: false,
    page_words: [],
    n_pages: 0,
    selection_zone: 3,
    cheat_remaining_ms: 0,
    running_metrics: null,
  };
  const merged = { ...base, ...overrides };
  if (overrides.state) merged.state = { ...base.state, ...overrides.state };
  return merged;
}

export function snapshotMessage(
  seq: number,
  payload: SnapshotPayload,
  session = 's1',
): ServerMessage {
  return { v: 1, type: 'StateSnapshot', session, seq, payload: payload as never };
}

export function helloMessageFromServer(session = 's1', mode = 'visual'): ServerMessage {
  return {
    v: 1,
    type: 'Hello',
    session,
    payload: {
      session_id: session,
      keyboard: nineKeyKeyboard() as never,
      phrases: ['the cat'],
      mode,
      strategy: 'upstand',
      page_size: 5,
      cheat_sheet_duration_ms: 10_000,
    },
  };
}
