// App wiring: connect to the service over WebSocket, feed pointer and
// button input through the ankle emulator, and re-render on every snapshot.
// Configuration comes from query parameters:
//   ?host=127.0.0.1&port=8766&mode=visual|blind&strategy=upstand|bpsit

import { createEmulator, DEFAULT_SPAN_DEG, type Emulator } from './emulate.js';
import { connectWebSocket, helloMessage, type Transport } from './protocol.js';
import { render } from './render.js';
import { applyServerMessage, createViewModel } from './viewmodel.js';

const params = new URLSearchParams(window.location.search);
const host = params.get('host') ?? window.location.hostname ?? '127.0.0.1';
const port = params.get('port') ?? '8766';
const mode = params.get('mode') === 'blind' ? 'blind' : 'visual';
const strategy = params.get('strategy') ?? 'upstand';

const root = document.getElementById('app') as HTMLElement;
const vm = createViewModel(mode, strategy);
let emulator: Emulator | null = null;

function redraw(): void {
  render(vm, root, Date.now());
}

const transport: Transport = connectWebSocket(`ws://${host}:${port}`, {
  onStatus(status) {
    vm.status = status;
    if (status === 'connected') {
      transport.send(helloMessage({ mode, strategy }));
    }
    redraw();
  },
  onMessage(message) {
    if (applyServerMessage(vm, message)) {
      if (message.type === 'Hello' && vm.sessionId && !emulator) {
        emulator = createEmulator(transport, vm.sessionId, {
          anchorX: window.innerWidth / 2,
          anchorY: window.innerHeight * 0.9,
          spanDeg: DEFAULT_SPAN_DEG,
        });
      }
      redraw();
    }
  },
});

// pointer direction -> cursor; buttons -> commands
window.addEventListener('pointermove', (event) => {
  emulator?.pointerMove(event.clientX, event.clientY);
});
window.addEventListener('pointerdown', (event) => {
  if (!emulator) return;
  event.preventDefault();
  if (event.button === 2) emulator.rearfootTap();
  else emulator.forefootTap();
});
window.addEventListener('contextmenu', (event) => event.preventDefault());
window.addEventListener('wheel', (event) => {
  if (!emulator) return;
  if (event.deltaY < 0) emulator.flatForward();
  else if (event.deltaY > 0) emulator.flatBackward();
});
// BPSit splits commands onto keys to mimic the second foot; the same keys
// work in unipedal mode as a convenience.
window.addEventListener('keydown', (event) => {
  if (!emulator) return;
  switch (event.key) {
    case 'f': emulator.forefootTap(); break;
    case 'd': emulator.rearfootTap(); break;
    case 'w': emulator.flatForward(); break;
    case 's': emulator.flatBackward(); break;
    case 'c': emulator.cheatSheet(); break;
    case 'Enter': emulator.advancePhrase(); break;
    default: return;
  }
  event.preventDefault();
});

// blind-mode countdown needs periodic repaints while the cheat sheet runs
window.setInterval(() => {
  if (vm.mode === 'blind' && vm.snapshot?.state.cheat_visible_until_ms) redraw();
}, 250);

redraw();
