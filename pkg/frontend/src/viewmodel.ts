// Snapshot-authoritative client state. The server is the source of truth;
// snapshots are applied in sequence order and stale ones are dropped, so
// the rendered view can never drift from the session.

import type {
  ConnectionStatus,
  HelloPayload,
  KeyboardDoc,
  MetricsReport,
  ServerMessage,
  SnapshotPayload,
} from './protocol.js';

export interface ViewModel {
  sessionId: string | null;
  keyboard: KeyboardDoc | null;
  phrases: string[];
  mode: 'visual' | 'blind';
  strategy: string;
  pageSize: number;
  cheatDurationMs: number;
  snapshot: SnapshotPayload | null;
  lastSeq: number;
  finalMetrics: MetricsReport | null;
  lastError: { code: string; message: string } | null;
  status: ConnectionStatus;
}

export function createViewModel(mode: 'visual' | 'blind' = 'visual', strategy = 'upstand'): ViewModel {
  return {
    sessionId: null,
    keyboard: null,
    phrases: [],
    mode,
    strategy,
    pageSize: 5,
    cheatDurationMs: 10_000,
    snapshot: null,
    lastSeq: -1,
    finalMetrics: null,
    lastError: null,
    status: 'connecting',
  };
}

/** Apply one server message; returns true when the view needs re-rendering. */
export function applyServerMessage(vm: ViewModel, message: ServerMessage): boolean {
  switch (message.type) {
    case 'Hello': {
      const payload = message.payload as unknown as HelloPayload;
      vm.sessionId = payload.session_id;
      vm.keyboard = payload.keyboard;
      vm.phrases = payload.phrases;
      vm.mode = payload.mode === 'blind' ? 'blind' : 'visual';
      vm.strategy = payload.strategy;
      vm.pageSize = payload.page_size;
      vm.cheatDurationMs = payload.cheat_sheet_duration_ms;
      return true;
    }
    case 'StateSnapshot': {
      const seq = message.seq ?? 0;
      if (seq <= vm.lastSeq) return false; // stale or duplicate
      vm.lastSeq = seq;
      vm.snapshot = message.payload as unknown as SnapshotPayload;
      return true;
    }
    case 'Metrics': {
      const report = (message.payload as { report?: MetricsReport }).report;
      vm.finalMetrics = report ?? null;
      return true;
    }
    case 'Error': {
      vm.lastError = message.payload as { code: string; message: string };
      return true;
    }
    default:
      return false;
  }
}

export function cheatSheetActive(vm: ViewModel, nowMs: number): boolean {
  const until = vm.snapshot?.state.cheat_visible_until_ms;
  return until != null && nowMs < until;
}

/** Layout (labels and cursor) is drawn in visual mode or during the cheat
 *  sheet window; blind mode otherwise renders neither. */
export function layoutVisible(vm: ViewModel, nowMs: number): boolean {
  return vm.mode === 'visual' || cheatSheetActive(vm, nowMs);
}

export function committedText(vm: ViewModel): string {
  return vm.snapshot ? vm.snapshot.state.committed.join(' ') : '';
}

export function displayedWpm(vm: ViewModel): number | null {
  if (vm.finalMetrics) return vm.finalMetrics.wpm;
  return vm.snapshot?.running_metrics?.wpm ?? null;
}
