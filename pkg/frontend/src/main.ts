// Console wiring: session creation, socket lifecycle, widgets, keyboard
// bindings and the render loop.

import { CommandSender, reconnectDelayMs } from "./socket.js";
import { drawPath, drawWobbleTrace, formatReadouts } from "./render.js";
import { UiSessionState } from "./state.js";
import {
  Command,
  parseServerMessage,
  PENDULUM_LIMIT_DEG,
  SPEED_LIMIT_RAD_S,
} from "./protocol.js";

const state = new UiSessionState();
let sender: CommandSender | null = null;
let socket: WebSocket | null = null;
let reconnectAttempt = 0;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el;
}

const speedSlider = $("speed") as HTMLInputElement;
const pendulumSlider = $("pendulum") as HTMLInputElement;
const gammaSlider = $("gamma") as HTMLInputElement;
const deltaSlider = $("delta") as HTMLInputElement;
const wobbleToggle = $("wobble") as HTMLInputElement;
const banner = $("banner");
const toast = $("toast");
const readouts = $("readouts");
const pathCanvas = $("path") as HTMLCanvasElement;
const traceCanvas = $("trace") as HTMLCanvasElement;

function serverBase(): string {
  const input = $("server") as HTMLInputElement;
  return input.value.replace(/\/+$/, "");
}

function showToast(message: string): void {
  toast.textContent = message;
  toast.classList.add("visible");
  setTimeout(() => toast.classList.remove("visible"), 2500);
}

function syncWidgets(): void {
  speedSlider.value = String(state.widgets.speed);
  pendulumSlider.value = String(state.widgets.pendulumDeg);
  gammaSlider.value = String(state.widgets.gamma);
  deltaSlider.value = String(state.widgets.delta);
  wobbleToggle.checked = state.widgets.wobbleEnabled;
}

function sendCommand(command: Command, revert: () => void = () => {}): void {
  sender?.send(command, revert);
}

async function connect(): Promise<void> {
  const base = serverBase();
  state.connection = "connecting";
  banner.textContent = "connecting...";
  try {
    const response = await fetch(`${base}/session`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({}),
    });
    const created = (await response.json()) as { session_id: string };
    const wsBase = base.replace(/^http/, "ws");
    socket = new WebSocket(`${wsBase}/ws/session/${created.session_id}`);
    sender = new CommandSender(
      { send: (text) => socket?.send(text) },
      (_command, message) => {
        syncWidgets();
        showToast(message);
      },
    );
    socket.onopen = () => {
      reconnectAttempt = 0;
      state.connection = "open";
      banner.textContent = "";
      syncWidgets();
    };
    socket.onmessage = (event: MessageEvent) => {
      const message = parseServerMessage(event.data as string);
      if (message.type === "telemetry") {
        state.ingest(message, performance.now());
      } else if (message.type === "ack") {
        sender?.handleAck(message.command);
      } else {
        sender?.handleError(message.message);
      }
    };
    socket.onclose = () => scheduleReconnect();
    socket.onerror = () => socket?.close();
  } catch {
    scheduleReconnect();
  }
}

function scheduleReconnect(): void {
  state.connection = "closed";
  reconnectAttempt += 1;
  const delay = reconnectDelayMs(reconnectAttempt);
  banner.textContent = `disconnected; retrying in ${(delay / 1000).toFixed(1)} s`;
  setTimeout(() => void connect(), delay);
}

// --- widget handlers -------------------------------------------------------

speedSlider.addEventListener("input", () => {
  const previous = state.widgets.speed;
  const applied = state.setSpeed(parseFloat(speedSlider.value));
  sendCommand({ type: "set_speed", value: applied }, () => {
    state.setSpeed(previous);
  });
});

pendulumSlider.addEventListener("input", () => {
  const previous = state.widgets.pendulumDeg;
  const applied = state.setPendulumDeg(parseFloat(pendulumSlider.value));
  sendCommand({ type: "set_pendulum", value: applied }, () => {
    state.setPendulumDeg(previous);
  });
});

function blendChanged(): void {
  const previous: [number, number] = [state.widgets.gamma, state.widgets.delta];
  const [gamma, delta] = state.setBlend(
    parseFloat(gammaSlider.value),
    parseFloat(deltaSlider.value),
  );
  sendCommand({ type: "set_blend", gamma, delta }, () => {
    state.setBlend(previous[0], previous[1]);
  });
}
gammaSlider.addEventListener("input", blendChanged);
deltaSlider.addEventListener("input", blendChanged);

wobbleToggle.addEventListener("change", () => {
  const enabled = wobbleToggle.checked;
  state.widgets.wobbleEnabled = enabled;
  sendCommand({ type: "set_wobble_control", enabled }, () => {
    state.widgets.wobbleEnabled = !enabled;
  });
});

$("reset").addEventListener("click", () => {
  state.reset();
  sendCommand({ type: "reset" });
});
$("pause").addEventListener("click", () => sendCommand({ type: "pause" }));
$("resume").addEventListener("click", () => sendCommand({ type: "resume" }));

// arrows: up/down nudge speed, left/right steer the pendulum
const SPEED_STEP = 0.25;
const PENDULUM_STEP = 2.5;
document.addEventListener("keydown", (event) => {
  if ((event.target as HTMLElement | null)?.tagName === "INPUT") return;
  let handled = true;
  switch (event.key) {
    case "ArrowUp":
      sendCommand({ type: "set_speed", value: state.setSpeed(state.widgets.speed - SPEED_STEP) });
      break;
    case "ArrowDown":
      sendCommand({ type: "set_speed", value: state.setSpeed(state.widgets.speed + SPEED_STEP) });
      break;
    case "ArrowLeft":
      sendCommand({
        type: "set_pendulum",
        value: state.setPendulumDeg(state.widgets.pendulumDeg - PENDULUM_STEP),
      });
      break;
    case "ArrowRight":
      sendCommand({
        type: "set_pendulum",
        value: state.setPendulumDeg(state.widgets.pendulumDeg + PENDULUM_STEP),
      });
      break;
    default:
      handled = false;
  }
  if (handled) {
    syncWidgets();
    event.preventDefault();
  }
});

// --- render loop ------------------------------------------------------------

function frame(): void {
  const pathCtx = pathCanvas.getContext("2d");
  const traceCtx = traceCanvas.getContext("2d");
  if (pathCtx !== null) {
    drawPath(pathCtx, state.path, pathCanvas.width, pathCanvas.height);
  }
  if (traceCtx !== null) {
    drawWobbleTrace(traceCtx, state.wobble, traceCanvas.width, traceCanvas.height);
  }
  readouts.innerHTML = formatReadouts(state.latest)
    .map((line) => `<div>${line}</div>`)
    .join("");
  if (state.isStale(performance.now())) {
    banner.textContent = "telemetry stale (no data for > 1 s)";
  } else if (state.connection === "open") {
    banner.textContent = "";
  }
  requestAnimationFrame(frame);
}

speedSlider.min = String(-SPEED_LIMIT_RAD_S);
speedSlider.max = String(SPEED_LIMIT_RAD_S);
pendulumSlider.min = String(-PENDULUM_LIMIT_DEG);
pendulumSlider.max = String(PENDULUM_LIMIT_DEG);
syncWidgets();
void connect();
requestAnimationFrame(frame);
