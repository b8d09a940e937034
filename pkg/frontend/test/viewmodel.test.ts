import { describe, expect, it } from 'vitest';

import {
  applyServerMessage,
  cheatSheetActive,
  committedText,
  createViewModel,
  displayedWpm,
  layoutVisible,
} from '../src/viewmodel.js';
import { helloMessageFromServer, snapshot, snapshotMessage } from './fakes.js';

describe('view model', () => {
  it('applies the hello payload', () => {
    const vm = createViewModel();
    expect(applyServerMessage(vm, helloMessageFromServer())).toBe(true);
    expect(vm.sessionId).toBe('s1');
    expect(vm.keyboard?.keys).toHaveLength(9);
    expect(vm.pageSize).toBe(5);
  });

  it('applies snapshots in sequence order and drops stale ones', () => {
    const vm = createViewModel();
    applyServerMessage(vm, helloMessageFromServer());
    expect(applyServerMessage(vm, snapshotMessage(2, snapshot({ presented: 'two' })))).toBe(true);
    expect(vm.snapshot?.presented).toBe('two');
    // stale snapshot must not regress the view
    expect(applyServerMessage(vm, snapshotMessage(1, snapshot({ presented: 'one' })))).toBe(false);
    expect(vm.snapshot?.presented).toBe('two');
    expect(applyServerMessage(vm, snapshotMessage(3, snapshot({ presented: 'three' })))).toBe(true);
    expect(vm.snapshot?.presented).toBe('three');
  });

  it('keeps committed text snapshot-authoritative', () => {
    const vm = createViewModel();
    applyServerMessage(vm, helloMessageFromServer());
    applyServerMessage(
      vm,
      snapshotMessage(1, snapshot({ state: { committed: ['the', 'cat'] } as never })),
    );
    expect(committedText(vm)).toBe('the cat');
  });

  it('records typed errors without touching the snapshot', () => {
    const vm = createViewModel();
    applyServerMessage(vm, helloMessageFromServer());
    applyServerMessage(vm, snapshotMessage(1, snapshot()));
    const before = vm.snapshot;
    applyServerMessage(vm, {
      v: 1,
      type: 'Error',
      payload: { code: 'mode_violation', message: 'nope' },
    });
    expect(vm.lastError?.code).toBe('mode_violation');
    expect(vm.snapshot).toBe(before);
  });

  it('prefers final metrics over running metrics', () => {
    const vm = createViewModel();
    applyServerMessage(vm, helloMessageFromServer());
    applyServerMessage(
      vm,
      snapshotMessage(1, snapshot({ running_metrics: { wpm: 5, ter: 0, ncer: 0, cheat_sheet_requests: 0, phrases: [] } })),
    );
    expect(displayedWpm(vm)).toBe(5);
    applyServerMessage(vm, {
      v: 1,
      type: 'Metrics',
      payload: { report: { wpm: 7.5, ter: 0, ncer: 0, cheat_sheet_requests: 0, phrases: [] } },
    });
    expect(displayedWpm(vm)).toBe(7.5);
  });

  it('gates layout visibility on mode and cheat sheet', () => {
    const vm = createViewModel('blind');
    applyServerMessage(vm, helloMessageFromServer('s1', 'blind'));
    applyServerMessage(
      vm,
      snapshotMessage(1, snapshot({ state: { cheat_visible_until_ms: 11_000 } as never })),
    );
    expect(layoutVisible(vm, 1_000)).toBe(true);
    expect(cheatSheetActive(vm, 11_001)).toBe(false);
    expect(layoutVisible(vm, 11_001)).toBe(false);
    const visual = createViewModel('visual');
    expect(layoutVisible(visual, 0)).toBe(true);
  });
});
