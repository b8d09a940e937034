// Round-trip test against the real backend: mouse-direction emulation
// drives a live session over the production WebSocket transport, and the
// rendered view must agree with the server's snapshots and final metrics.

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { createEmulator, normalizedToPointer, type EmulationSettings } from '../src/emulate.js';
import {
  helloMessage,
  type ClientMessage,
  type KeyboardDoc,
  type MetricsReport,
  type ServerMessage,
  type SnapshotPayload,
  type Transport,
} from '../src/protocol.js';
import { render } from '../src/render.js';
import {
  applyServerMessage,
  committedText,
  createViewModel,
  type ViewModel,
} from '../src/viewmodel.js';
import { FakeClock } from './fakes.js';
import { Inbox, startService, type LiveService } from './live.js';

let service: LiveService;

beforeAll(async () => {
  service = await startService();
});

afterAll(() => {
  service?.stop();
});

const settings: EmulationSettings = { anchorX: 400, anchorY: 500, spanDeg: 120 };
const RADIUS = 300;

function letterKey(kb: KeyboardDoc, ch: string): number {
  const nonSpace = kb.keys.map((_, i) => i).filter((i) => i !== kb.space_key_index);
  const group = kb.groups.findIndex((g) => g.includes(ch));
  if (group < 0) throw new Error(`letter ${ch} not on keyboard`);
  return nonSpace[group];
}

class CountingTransport implements Transport {
  sent = 0;

  constructor(private inner: Transport) {}

  send(message: ClientMessage): boolean {
    this.sent += 1;
    return this.inner.send(message);
  }

  close(): void {
    this.inner.close();
  }
}

class LiveSession {
  vm: ViewModel;
  inbox: Inbox;
  counting!: CountingTransport;
  emu!: ReturnType<typeof createEmulator>;
  clock = new FakeClock();

  constructor(mode: 'visual' | 'blind') {
    this.vm = createViewModel(mode);
    this.inbox = new Inbox(`ws://127.0.0.1:${service.wsPort}`);
  }

  async hello(mode: string, phrases: string[]): Promise<void> {
    await this.inbox.ready();
    const [ack, snapshot] = await this.inbox.request(
      helloMessage({ mode, strategy: 'upstand', phrases }),
      2,
    );
    this.apply(ack);
    this.apply(snapshot);
    this.counting = new CountingTransport(this.inbox.transport);
    this.emu = createEmulator(this.counting, this.vm.sessionId as string, settings, this.clock);
  }

  apply(message: ServerMessage): void {
    applyServerMessage(this.vm, message);
  }

  /** Run one emulator action, then apply exactly the responses it caused. */
  async act(action: () => void, extraResponses = 0): Promise<ServerMessage[]> {
    const before = this.counting.sent;
    action();
    const caused = this.counting.sent - before + extraResponses;
    const messages: ServerMessage[] = [];
    for (let i = 0; i < caused; i += 1) {
      const message = await this.inbox.next();
      this.apply(message);
      messages.push(message);
    }
    return messages;
  }

  snapshot(): SnapshotPayload {
    return this.vm.snapshot as SnapshotPayload;
  }

  pointTo(position: number): Promise<ServerMessage[]> {
    const { x, y } = normalizedToPointer(settings, position, RADIUS);
    return this.act(() => this.emu.pointerMove(x, y));
  }

  async typeWord(word: string): Promise<void> {
    const kb = this.vm.keyboard as KeyboardDoc;
    for (const ch of word) {
      const key = letterKey(kb, ch);
      await this.pointTo(kb.keys[key].center);
      await this.act(() => this.emu.forefootTap());
      this.clock.tick(200);
    }
    await this.act(() => this.emu.flatForward());
    this.clock.tick(200);
    const zones = this.vm.pageSize + 2;
    for (;;) {
      const words = this.snapshot().page_words.map(([w]) => w);
      const slot = words.indexOf(word);
      if (slot >= 0) {
        await this.pointTo((1 + slot + 0.5) / zones);
        await this.act(() => this.emu.forefootTap());
        this.clock.tick(200);
        return;
      }
      if (this.snapshot().state.page + 1 >= this.snapshot().n_pages) {
        throw new Error(`word ${word} not in candidates`);
      }
      await this.pointTo((zones - 1 + 0.5) / zones);
      await this.act(() => this.emu.forefootTap());
      this.clock.tick(200);
    }
  }

  close(): void {
    this.inbox.close();
  }
}

describe('visual-mode round trip', () => {
  it('transcribes "the cat" by mouse emulation and matches server metrics', async () => {
    const session = new LiveSession('visual');
    await session.hello('visual', ['the cat']);
    expect(session.snapshot().presented).toBe('the cat');

    await session.typeWord('the');
    expect(committedText(session.vm)).toBe('the');
    await session.typeWord('cat');
    expect(committedText(session.vm)).toBe('the cat');

    // ending the phrase yields a final snapshot plus the metrics message
    const messages = await session.act(() => session.emu.advancePhrase(), 1);
    const metrics = messages.find((m) => m.type === 'Metrics');
    expect(metrics).toBeDefined();
    const report = (metrics?.payload as { report: MetricsReport }).report;
    expect(report.ter).toBe(0);
    expect(report.wpm).toBeGreaterThan(0);

    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById('app') as HTMLElement;
    render(session.vm, root, session.clock.now());
    expect(root.querySelector('.transcribed')?.textContent).toContain('the cat');
    expect(root.querySelector('.metrics')?.textContent).toBe(
      `WPM ${report.wpm.toFixed(2)}`,
    );
    expect(root.querySelector('.finished')).not.toBeNull();
    session.close();
  });
});

describe('blind-mode round trip', () => {
  it('hides key labels until a cheat sheet request, then shows them for 10 s', async () => {
    const session = new LiveSession('blind');
    await session.hello('blind', ['the cat']);

    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById('app') as HTMLElement;
    render(session.vm, root, session.clock.now());
    expect(root.querySelectorAll('.key-label')).toHaveLength(0);
    expect(root.querySelector('.cursor-wedge')).toBeNull();

    session.clock.tick(5_000);
    const requestAt = session.clock.now();
    await session.act(() => session.emu.cheatSheet());
    const until = session.snapshot().state.cheat_visible_until_ms as number;
    const duration = until - requestAt;
    expect(duration).toBeGreaterThanOrEqual(9_500);
    expect(duration).toBeLessThanOrEqual(10_500);

    render(session.vm, root, requestAt);
    expect(root.querySelectorAll('.key-label').length).toBeGreaterThan(0);
    expect(root.querySelector('.cheat-countdown')?.textContent).toBe('10s');

    render(session.vm, root, requestAt + 6_000);
    expect(root.querySelector('.cheat-countdown')?.textContent).toBe('4s');

    render(session.vm, root, until + 1);
    expect(root.querySelectorAll('.key-label')).toHaveLength(0);
    expect(root.querySelector('.cheat-countdown')).toBeNull();
    session.close();
  });

  it('turns a visual-mode cheat request into a typed error toast', async () => {
    const session = new LiveSession('visual');
    await session.hello('visual', ['the cat']);
    await session.act(() => session.emu.cheatSheet());
    expect(session.vm.lastError?.code).toBe('mode_violation');

    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById('app') as HTMLElement;
    render(session.vm, root, 0);
    expect(root.querySelector('.toast.error')?.textContent).toContain('mode_violation');
    session.close();
  });
});
