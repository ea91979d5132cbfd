/** DOM wiring for the demo page: name field, enroll/verify buttons,
 * canvas animation driven by requestAnimationFrame, pointer capture,
 * and result/error banners.
 */

import { ApiClient } from "./api.js";
import { COUNTDOWN_S, DEFAULT_CONFIG } from "./config.js";
import { CaptureSession, renderResult, type SessionMode } from "./session.js";
import { drawFrame, frameAt } from "./stimulus.js";

const config = DEFAULT_CONFIG;
const api = new ApiClient(config.baseUrl);

const canvas = document.getElementById("stage") as HTMLCanvasElement;
const nameInput = document.getElementById("name") as HTMLInputElement;
const enrollBtn = document.getElementById("enroll") as HTMLButtonElement;
const verifyBtn = document.getElementById("verify") as HTMLButtonElement;
const abortBtn = document.getElementById("abort") as HTMLButtonElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const status = document.getElementById("status") as HTMLDivElement;

canvas.width = config.geometry.widthPx;
canvas.height = config.geometry.heightPx;
const ctx = canvas.getContext("2d")!;

let active: CaptureSession | null = null;
let rafId = 0;

function setBanner(text: string, cls: "ok" | "bad" | "info"): void {
  banner.textContent = text;
  banner.className = `banner ${cls}`;
}

function setBusy(busy: boolean): void {
  enrollBtn.disabled = busy;
  verifyBtn.disabled = busy;
  abortBtn.disabled = !busy;
}

async function runSession(mode: SessionMode): Promise<void> {
  const name = nameInput.value.trim();
  if (!name) {
    setBanner("enter a name first", "bad");
    return;
  }
  setBusy(true);
  setBanner("fetching stimulus schedule...", "info");
  const session = new CaptureSession(name, mode, api, config);
  active = session;
  let schedule;
  try {
    schedule = await session.fetchSchedule(Math.floor(Math.random() * 1e9));
  } catch (err) {
    setBanner(`could not fetch stimulus: ${String(err)}`, "bad");
    setBusy(false);
    active = null;
    return;
  }

  const startMs = performance.now();
  let capturing = false;
  const onMove = (ev: PointerEvent) => {
    const t = (performance.now() - startMs) / 1000 - COUNTDOWN_S;
    if (t < 0) return;
    const rect = canvas.getBoundingClientRect();
    session.recordPointer(t, ev.clientX - rect.left, ev.clientY - rect.top);
  };
  canvas.addEventListener("pointermove", onMove);

  const finish = async () => {
    canvas.removeEventListener("pointermove", onMove);
    cancelAnimationFrame(rafId);
    if (session.state === "aborted") {
      setBanner("aborted - nothing submitted", "info");
      setBusy(false);
      active = null;
      return;
    }
    setBanner("submitting...", "info");
    const result = await session.complete();
    const cls =
      result.kind === "error"
        ? "bad"
        : result.kind === "verdict" && result.decision === "reject"
          ? "bad"
          : "ok";
    setBanner(renderResult(result), cls);
    setBusy(false);
    active = null;
  };

  const tick = () => {
    const t = (performance.now() - startMs) / 1000;
    const frame = frameAt(schedule, t);
    drawFrame(ctx, config.geometry, frame);
    status.textContent =
      frame.phase === "running"
        ? `follow the dot - ${Math.max(0, schedule.total_s - (t - COUNTDOWN_S)).toFixed(1)}s left, ${session.sampleCount} samples`
        : frame.phase === "countdown"
          ? "get ready..."
          : "";
    if (frame.phase === "running" && !capturing) {
      capturing = true;
      session.beginCapture();
    }
    if (session.state === "aborted" || frame.phase === "done") {
      void finish();
      return;
    }
    rafId = requestAnimationFrame(tick);
  };
  rafId = requestAnimationFrame(tick);
}

enrollBtn.addEventListener("click", () => void runSession("enroll"));
verifyBtn.addEventListener("click", () => void runSession("verify"));
abortBtn.addEventListener("click", () => active?.abort());

api
  .health()
  .then((h) =>
    setBanner(
      `service up - model ${h.model_id}, threshold ${h.threshold}`,
      "info",
    ),
  )
  .catch(() => setBanner(`service unreachable at ${config.baseUrl}`, "bad"));
