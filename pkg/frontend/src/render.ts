// DOM rendering: a pure projection of the view model. The letter arc is a
// fan of wedges spanning the calibrated range, the word arc above it shows
// the current candidate page between two paging selectors. Blind mode
// renders no key labels and no cursor wedge unless the cheat sheet is
// active, in which case a countdown is shown.

import type { KeyboardDoc } from './protocol.js';
import {
  cheatSheetActive,
  committedText,
  displayedWpm,
  layoutVisible,
  type ViewModel,
} from './viewmodel.js';

export const ARC_SPAN_DEG = 120;

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function wedgeTransform(lo: number, hi: number): { rotate: number; sweep: number } {
  const mid = (lo + hi) / 2;
  return {
    rotate: (mid - 0.5) * ARC_SPAN_DEG,
    sweep: (hi - lo) * ARC_SPAN_DEG,
  };
}

function renderLetterArc(keyboard: KeyboardDoc, cursor: number | null): HTMLElement {
  const arc = el('div', 'letter-arc');
  let group = 0;
  keyboard.keys.forEach((key, index) => {
    const isSpace = index === keyboard.space_key_index;
    const label = isSpace ? '␣' : keyboard.groups[group++];
    const wedge = el('div', isSpace ? 'key space-key' : 'key letter-key');
    wedge.dataset.key = String(index);
    const { rotate, sweep } = wedgeTransform(key.lo, key.hi);
    wedge.style.transform = `rotate(${rotate.toFixed(2)}deg)`;
    wedge.style.setProperty('--sweep', `${sweep.toFixed(2)}deg`);
    wedge.appendChild(el('span', 'key-label', label));
    arc.appendChild(wedge);
  });
  if (cursor !== null) {
    const pointer = el('div', 'cursor-wedge');
    pointer.style.transform = `rotate(${((cursor - 0.5) * ARC_SPAN_DEG).toFixed(2)}deg)`;
    arc.appendChild(pointer);
  }
  return arc;
}

function renderWordArc(vm: ViewModel): HTMLElement {
  const snapshot = vm.snapshot!;
  const arc = el('div', 'word-arc');
  const zones: HTMLElement[] = [];
  zones.push(el('div', 'pager pager-left', '◀'));
  for (let slot = 0; slot < vm.pageSize; slot += 1) {
    const entry = snapshot.page_words[slot];
    const cell = el('div', 'candidate', entry ? entry[0] : '');
    cell.dataset.slot = String(slot);
    zones.push(cell);
  }
  zones.push(el('div', 'pager pager-right', '▶'));
  const inWordArea = snapshot.state.area === 'word';
  zones.forEach((zone, index) => {
    if (inWordArea && index === snapshot.selection_zone) {
      zone.classList.add('selected');
    }
    arc.appendChild(zone);
  });
  arc.classList.toggle('active', inWordArea);
  const pageInfo = el(
    'div',
    'page-info',
    snapshot.n_pages > 1 ? `page ${snapshot.state.page + 1}/${snapshot.n_pages}` : '',
  );
  arc.appendChild(pageInfo);
  return arc;
}

export function render(vm: ViewModel, root: HTMLElement, nowMs: number): void {
  root.textContent = '';
  root.className = `stage mode-${vm.mode}`;

  if (vm.status === 'disconnected') {
    root.appendChild(el('div', 'banner reconnect', 'connection lost - reconnecting'));
  }
  if (!vm.snapshot || !vm.keyboard) {
    root.appendChild(el('div', 'banner waiting', 'waiting for session'));
    return;
  }
  const snapshot = vm.snapshot;

  const phrases = el('div', 'phrase-row');
  phrases.appendChild(el('div', 'presented', snapshot.presented ?? 'done'));
  const typed = el('div', 'transcribed', committedText(vm));
  typed.appendChild(el('span', 'pending', '·'.repeat(snapshot.state.pending.length)));
  phrases.appendChild(typed);
  root.appendChild(phrases);

  root.appendChild(renderWordArc(vm));

  if (layoutVisible(vm, nowMs)) {
    const cursor = vm.mode === 'visual' || cheatSheetActive(vm, nowMs)
      ? snapshot.state.cursor
      : null;
    root.appendChild(renderLetterArc(vm.keyboard, cursor));
  }
  if (vm.mode === 'blind' && cheatSheetActive(vm, nowMs)) {
    const remaining = Math.max(0, (snapshot.state.cheat_visible_until_ms ?? 0) - nowMs);
    root.appendChild(
      el('div', 'cheat-countdown', `${Math.ceil(remaining / 1000)}s`),
    );
  }

  const status = el('div', 'status-row');
  const wpm = displayedWpm(vm);
  status.appendChild(
    el('div', 'metrics', wpm === null ? 'WPM -' : `WPM ${wpm.toFixed(2)}`),
  );
  if (snapshot.finished) {
    status.appendChild(el('div', 'finished', 'session complete'));
  }
  if (vm.lastError) {
    status.appendChild(
      el('div', 'toast error', `${vm.lastError.code}: ${vm.lastError.message}`),
    );
  }
  root.appendChild(status);
}
