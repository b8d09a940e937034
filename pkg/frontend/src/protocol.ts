// Wire protocol types and transports. One JSON record per message; the
// server answers every request with a state snapshot or a typed error.

export const PROTOCOL_VERSION = 1;

export interface KeyDoc {
  lo: number;
  hi: number;
  center: number;
  sigma: number;
}

export interface KeyboardDoc {
  version: number;
  posture: string;
  keys: KeyDoc[];
  space_key_index: number;
  groups: string[];
}

export interface SnapshotState {
  area: 'letter' | 'word';
  cursor: number;
  pending: unknown[];
  candidates: [string, number][];
  page: number;
  committed: string[];
  phrase_index: number;
  cheat_visible_until_ms: number | null;
  cheat_requests: number;
}

export interface SnapshotPayload {
  state: SnapshotState;
  presented: string | null;
  phrase_count: number;
  finished: boolean;
  page_words: [string, number][];
  n_pages: number;
  selection_zone: number;
  cheat_remaining_ms: number;
  running_metrics: MetricsReport | null;
}

export interface MetricsReport {
  wpm: number;
  ter: number;
  ncer: number;
  cheat_sheet_requests: number;
  phrases: unknown[];
}

export interface HelloPayload {
  session_id: string;
  keyboard: KeyboardDoc;
  phrases: string[];
  mode: string;
  strategy: string;
  page_size: number;
  cheat_sheet_duration_ms: number;
}

export interface ServerMessage {
  v: number;
  type: string;
  session?: string;
  seq?: number;
  payload: Record<string, unknown>;
}

export interface ClientMessage {
  v: number;
  type: string;
  session?: string;
  payload: Record<string, unknown>;
}

export type GestureKindName =
  | 'forefoot_tap'
  | 'rearfoot_tap'
  | 'flat_forward'
  | 'flat_backward'
  | 'cursor_move';

export function helloMessage(options: {
  mode: string;
  strategy: string;
  phrases?: string[];
}): ClientMessage {
  const payload: Record<string, unknown> = {
    mode: options.mode,
    strategy: options.strategy,
  };
  if (options.phrases) payload.phrases = options.phrases;
  return { v: PROTOCOL_VERSION, type: 'Hello', payload };
}

export function gestureMessage(
  session: string,
  kind: GestureKindName,
  timestamp: number,
  position?: number,
): ClientMessage {
  const payload: Record<string, unknown> = { kind, timestamp };
  if (position !== undefined) payload.position = position;
  return { v: PROTOCOL_VERSION, type: 'EmulatedGesture', session, payload };
}

export function cheatSheetMessage(session: string, timestamp: number): ClientMessage {
  return { v: PROTOCOL_VERSION, type: 'CheatSheet', session, payload: { timestamp } };
}

export function phraseAdvanceMessage(session: string, timestamp: number): ClientMessage {
  return { v: PROTOCOL_VERSION, type: 'PhraseAdvance', session, payload: { timestamp } };
}

export type ConnectionStatus = 'connecting' | 'connected' | 'disconnected';

export interface Transport {
  send(message: ClientMessage): boolean;
  close(): void;
}

export interface TransportHandlers {
  onMessage: (message: ServerMessage) => void;
  onStatus?: (status: ConnectionStatus) => void;
}

export function connectWebSocket(url: string, handlers: TransportHandlers): Transport {
  const ws = new WebSocket(url);
  handlers.onStatus?.('connecting');
  ws.onopen = () => handlers.onStatus?.('connected');
  ws.onclose = () => handlers.onStatus?.('disconnected');
  ws.onmessage = (event) => {
    try {
      handlers.onMessage(JSON.parse(String(event.data)) as ServerMessage);
    } catch {
      // non-JSON frames are dropped
    }
  };
  return {
    send(message: ClientMessage): boolean {
      if (ws.readyState !== WebSocket.OPEN) return false;
      ws.send(JSON.stringify(message));
      return true;
    },
    close() {
      ws.close();
    },
  };
}
