// Single-page console wiring: create a session, steer it cycle by cycle,
// watch the population live, and compare completed cycles side by side.
// All numbers rendered here come from service snapshots; the only local
// math is form validation and chart geometry.

import { ServiceApiError, SteeringClient } from "./api.js";
import {
  DEFAULT_ROTATION,
  renderSeries,
  type Rotation,
  type Series,
} from "./charts.js";
import type { CycleRecord, RoiJson, Snapshot } from "./types.js";
import {
  parseAspiration,
  validateGenerations,
  validateTau,
  validTauInterval,
} from "./validation.js";
import { chartKind, axisRange, toViewModel, zdt1FrontCurve } from "./viewmodel.js";

const client = new SteeringClient("");

interface UiState {
  snapshot: Snapshot | null;
  cycleInFlight: boolean;
  rotation: Rotation;
  pollTimer: number | null;
}

const state: UiState = {
  snapshot: null,
  cycleInFlight: false,
  rotation: { ...DEFAULT_ROTATION },
  pollTimer: null,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setFieldError(id: string, message: string) {
  el<HTMLElement>(id).textContent = message;
}

function clearFieldErrors() {
  for (const node of document.querySelectorAll(".field-error")) {
    node.textContent = "";
  }
}

function setBanner(message: string, kind: "error" | "info" | "") {
  const banner = el<HTMLElement>("banner");
  banner.textContent = message;
  banner.className = kind ? `banner ${kind}` : "banner hidden";
}

function mainCanvas(): [CanvasRenderingContext2D, number, number] {
  const canvas = el<HTMLCanvasElement>("chart");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  return [ctx, canvas.width, canvas.height];
}

function seriesFromSnapshot(snap: Snapshot): Series {
  return {
    solutions: snap.objectives,
    referencePoints: snap.reference_points,
    aspiration: snap.roi.z_r,
    underlay: snap.problem.name === "ZDT1" ? zdt1FrontCurve() : undefined,
  };
}

function redraw() {
  if (!state.snapshot) return;
  const vm = toViewModel(state.snapshot);
  const [ctx, w, h] = mainCanvas();
  renderSeries(ctx, w, h, vm.kind, seriesFromSnapshot(state.snapshot), vm.range, state.rotation);
  el<HTMLElement>("status-line").textContent =
    vm.status === "running"
      ? `running cycle... ${vm.progressPercent}%`
      : `idle - generation ${state.snapshot.generation}, ${vm.cyclesCompleted} cycle(s) done`;
  el<HTMLElement>("problem-label").textContent = vm.problemLabel;
  renderTimeline();
  refreshCompareSelectors();
  updateTauHint();
}

function renderTimeline() {
  if (!state.snapshot) return;
  const vm = toViewModel(state.snapshot);
  const tbody = el<HTMLElement>("timeline-body");
  tbody.innerHTML = "";
  for (const row of vm.timeline) {
    const tr = document.createElement("tr");
    tr.innerHTML =
      `<td>${row.cycle}</td><td>${row.zR}</td><td>${row.tau}</td>` +
      `<td>${row.keepBoundary ? "kept" : "shifted"}</td>` +
      `<td>${row.generations}</td><td>${row.ideal}</td>`;
    tbody.appendChild(tr);
  }
}

function controlsDisabled(disabled: boolean) {
  for (const id of ["cycle-form-submit", "zr-input", "tau-input", "keep-input", "gens-input"]) {
    (el<HTMLInputElement>(id) as HTMLInputElement | HTMLButtonElement).disabled = disabled;
  }
}

function updateTauHint() {
  const snap = state.snapshot;
  const keep = el<HTMLInputElement>("keep-input").checked;
  if (!snap) return;
  el<HTMLElement>("tau-hint").textContent =
    `valid interval: ${validTauInterval(snap.problem.m, snap.lattice.h, keep)}`;
}

async function onCreateSession(ev: Event) {
  ev.preventDefault();
  clearFieldErrors();
  const name = el<HTMLSelectElement>("create-problem").value;
  const m = Number(el<HTMLInputElement>("create-m").value);
  const h = Number(el<HTMLInputElement>("create-h").value);
  const seed = Number(el<HTMLInputElement>("create-seed").value);
  const zrText = el<HTMLInputElement>("create-zr").value;
  const tau = Number(el<HTMLInputElement>("create-tau").value);
  const keep = el<HTMLInputElement>("create-keep").checked;

  const zr = parseAspiration(zrText, m);
  if (!zr.ok) {
    setFieldError("create-zr-error", zr.message);
    return;
  }
  const tauVerdict = validateTau(m, h, tau, keep);
  if (!tauVerdict.ok) {
    setFieldError("create-tau-error", tauVerdict.message);
    return;
  }
  try {
    const snap = await client.createSession({
      problem: { name, m },
      roi: { z_r: zr.values, tau, keep_boundary: keep },
      lattice: { h },
      seed,
    });
    state.snapshot = snap;
    el<HTMLElement>("session-id").textContent = snap.session_id;
    el<HTMLInputElement>("zr-input").value = zrText;
    el<HTMLInputElement>("tau-input").value = String(tau);
    el<HTMLInputElement>("keep-input").checked = keep;
    setBanner("", "");
    redraw();
  } catch (err) {
    routeServiceError(err, {
      "/roi/z_r": "create-zr-error",
      "/roi/tau": "create-tau-error",
    });
  }
}

async function onSubmitCycle(ev: Event) {
  ev.preventDefault();
  if (!state.snapshot || state.cycleInFlight) return;
  clearFieldErrors();
  const snap = state.snapshot;
  const gens = Number(el<HTMLInputElement>("gens-input").value);
  const gensVerdict = validateGenerations(gens);
  if (!gensVerdict.ok) {
    setFieldError("gens-error", gensVerdict.message);
    return;
  }
  const zrText = el<HTMLInputElement>("zr-input").value.trim();
  let roi: RoiJson | undefined;
  if (zrText.length > 0) {
    const zr = parseAspiration(zrText, snap.problem.m);
    if (!zr.ok) {
      setFieldError("zr-error", zr.message);
      return;
    }
    const tau = Number(el<HTMLInputElement>("tau-input").value);
    const keep = el<HTMLInputElement>("keep-input").checked;
    const tauVerdict = validateTau(snap.problem.m, snap.lattice.h, tau, keep);
    if (!tauVerdict.ok) {
      setFieldError("tau-error", tauVerdict.message);
      return;
    }
    roi = { z_r: zr.values, tau, keep_boundary: keep };
  }
  try {
    state.cycleInFlight = true;
    controlsDisabled(true);
    await client.startCycle(snap.session_id, { generations: gens, roi });
    setBanner("", "");
    pollUntilIdle();
  } catch (err) {
    state.cycleInFlight = false;
    controlsDisabled(false);
    routeServiceError(err, { "/roi/z_r": "zr-error", "/roi/tau": "tau-error" });
  }
}

function pollUntilIdle() {
  if (state.pollTimer !== null) window.clearInterval(state.pollTimer);
  state.pollTimer = window.setInterval(async () => {
    if (!state.snapshot) return;
    try {
      const snap = await client.getSession(state.snapshot.session_id);
      state.snapshot = snap;
      setBanner("", "");
      redraw();
      if (snap.status === "idle") {
        if (state.pollTimer !== null) window.clearInterval(state.pollTimer);
        state.pollTimer = null;
        state.cycleInFlight = false;
        controlsDisabled(false);
      }
    } catch {
      // keep polling; the cycle continues server-side across network blips
      setBanner("connection lost - retrying... (state preserved)", "error");
    }
  }, 1000);
}

function routeServiceError(err: unknown, pointers: Record<string, string>) {
  if (err instanceof ServiceApiError) {
    const target = err.pointer ? pointers[err.pointer] : undefined;
    if (target) {
      setFieldError(target, err.message);
    } else if (err.pointer && err.pointer.endsWith("tau")) {
      setFieldError(pointers["/roi/tau"] ?? "banner", err.message);
    } else {
      setBanner(`${err.code}: ${err.message}`, "error");
    }
  } else {
    setBanner("network failure - request not sent, state preserved", "error");
  }
}

function refreshCompareSelectors() {
  if (!state.snapshot) return;
  const done = state.snapshot.cycles_completed;
  for (const id of ["compare-a", "compare-b"]) {
    const select = el<HTMLSelectElement>(id);
    const current = select.value;
    select.innerHTML = "";
    for (let k = 1; k <= done; k++) {
      const opt = document.createElement("option");
      opt.value = String(k);
      opt.textContent = `cycle ${k}`;
      select.appendChild(opt);
    }
    if (current && Number(current) <= done) select.value = current;
  }
  el<HTMLButtonElement>("compare-button").disabled = done === 0;
}

async function onCompare(ev: Event) {
  ev.preventDefault();
  if (!state.snapshot) return;
  const snap = state.snapshot;
  const k1 = Number(el<HTMLSelectElement>("compare-a").value);
  const k2 = Number(el<HTMLSelectElement>("compare-b").value);
  if (!k1 || !k2) return;
  try {
    const [r1, r2] = await Promise.all([
      client.getCycle(snap.session_id, k1),
      client.getCycle(snap.session_id, k2),
    ]);
    drawComparePane("compare-canvas-a", r1, snap);
    drawComparePane("compare-canvas-b", r2, snap);
    el<HTMLElement>("compare-row").classList.remove("hidden");
  } catch (err) {
    routeServiceError(err, {});
  }
}

function drawComparePane(canvasId: string, rec: CycleRecord, snap: Snapshot) {
  const canvas = el<HTMLCanvasElement>(canvasId);
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  // shared fixed axes across both panes keep cycles comparable
  const range = axisRange(snap.problem.name, rec.objectives);
  const kind = chartKind(snap.problem.m);
  const series: Series = {
    solutions: rec.objectives,
    referencePoints: rec.reference_points,
    aspiration: rec.roi.z_r,
    underlay: snap.problem.name === "ZDT1" ? zdt1FrontCurve() : undefined,
  };
  renderSeries(ctx, canvas.width, canvas.height, kind, series, range, state.rotation);
}

function wireRotation() {
  const canvas = el<HTMLCanvasElement>("chart");
  let dragging = false;
  let last: [number, number] = [0, 0];
  canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    last = [e.clientX, e.clientY];
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
  window.addEventListener("mousemove", (e) => {
    if (!dragging || !state.snapshot) return;
    if (chartKind(state.snapshot.problem.m) !== "scatter3d") return;
    state.rotation = {
      yaw: state.rotation.yaw + (e.clientX - last[0]) * 0.01,
      pitch: state.rotation.pitch + (e.clientY - last[1]) * 0.01,
    };
    last = [e.clientX, e.clientY];
    redraw();
  });
}

async function boot() {
  try {
    const health = await client.health();
    el<HTMLElement>("service-version").textContent = `service ${health.version}`;
  } catch {
    setBanner("steering service unreachable", "error");
  }
  el<HTMLFormElement>("create-form").addEventListener("submit", onCreateSession);
  el<HTMLFormElement>("cycle-form").addEventListener("submit", onSubmitCycle);
  el<HTMLFormElement>("compare-form").addEventListener("submit", onCompare);
  el<HTMLInputElement>("keep-input").addEventListener("change", updateTauHint);
  wireRotation();
}

document.addEventListener("DOMContentLoaded", boot);
