// Mouse-direction ankle emulation: the pointer's direction from a screen
// anchor maps onto the calibrated rotation span, preserving the rotational
// feel of the real input. Clicks and wheel gestures stand in for the foot
// commands.

import {
  cheatSheetMessage,
  gestureMessage,
  phraseAdvanceMessage,
  type Transport,
} from './protocol.js';

export interface EmulationSettings {
  anchorX: number;
  anchorY: number;
  spanDeg: number; // full angular span mapped onto [0, 1]
}

export const DEFAULT_SPAN_DEG = 120;

/** Pointer direction relative to the anchor, as a normalized position.
 *  Straight up is the span's middle; angles clamp at the span edges. */
export function pointerToNormalized(
  settings: EmulationSettings,
  x: number,
  y: number,
): number {
  const dx = x - settings.anchorX;
  const dy = settings.anchorY - y; // screen y grows downward
  if (dx === 0 && dy === 0) return 0.5;
  const angleDeg = (Math.atan2(dx, dy) * 180) / Math.PI;
  const half = settings.spanDeg / 2;
  const clamped = Math.max(-half, Math.min(half, angleDeg));
  return (clamped + half) / settings.spanDeg;
}

/** Inverse of pointerToNormalized at a fixed radius (used by tests and the
 *  on-screen cursor preview). */
export function normalizedToPointer(
  settings: EmulationSettings,
  position: number,
  radius: number,
): { x: number; y: number } {
  const half = settings.spanDeg / 2;
  const angle = ((position * settings.spanDeg - half) * Math.PI) / 180;
  return {
    x: settings.anchorX + Math.sin(angle) * radius,
    y: settings.anchorY - Math.cos(angle) * radius,
  };
}

export interface Clock {
  now(): number;
}

export interface Emulator {
  pointerMove(x: number, y: number): void;
  moveTo(position: number): void;
  forefootTap(): void;
  rearfootTap(): void;
  flatForward(): void;
  flatBackward(): void;
  cheatSheet(): void;
  advancePhrase(): void;
  readonly settings: EmulationSettings;
}

export function createEmulator(
  transport: Transport,
  sessionId: string,
  settings: EmulationSettings,
  clock: Clock = Date,
): Emulator {
  let lastPosition: number | null = null;

  function sendCursor(position: number): void {
    if (position === lastPosition) return;
    lastPosition = position;
    transport.send(gestureMessage(sessionId, 'cursor_move', clock.now(), position));
  }

  return {
    settings,
    pointerMove(x: number, y: number): void {
      sendCursor(pointerToNormalized(settings, x, y));
    },
    moveTo(position: number): void {
      sendCursor(Math.max(0, Math.min(1, position)));
    },
    forefootTap(): void {
      transport.send(gestureMessage(sessionId, 'forefoot_tap', clock.now()));
    },
    rearfootTap(): void {
      transport.send(gestureMessage(sessionId, 'rearfoot_tap', clock.now()));
    },
    flatForward(): void {
      transport.send(gestureMessage(sessionId, 'flat_forward', clock.now()));
    },
    flatBackward(): void {
      transport.send(gestureMessage(sessionId, 'flat_backward', clock.now()));
    },
    cheatSheet(): void {
      transport.send(cheatSheetMessage(sessionId, clock.now()));
    },
    advancePhrase(): void {
      transport.send(phraseAdvanceMessage(sessionId, clock.now()));
    },
  };
}
