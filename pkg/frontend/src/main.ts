/** DOM bootstrap: wires the workbench controller to the page. */

import { Api, type DocumentDetail } from "./api.js";
import { Workbench } from "./app.js";
import { marksNear, pointInPolygon, type Pt } from "./geometry.js";
import { buildPanel } from "./panel.js";
import { drawScatter, layout, transformFor, type Mark } from "./scatter.js";
import { taggedCount, type ViewState } from "./state.js";

const api = new Api("");
const bench = new Workbench(api);

const el = {
  sessionList: document.getElementById("session-list") as HTMLElement,
  artifactPath: document.getElementById("artifact-path") as HTMLInputElement,
  createBtn: document.getElementById("create-session") as HTMLButtonElement,
  canvas: document.getElementById("scatter") as HTMLCanvasElement,
  tooltip: document.getElementById("tooltip") as HTMLElement,
  methodSelect: document.getElementById("method") as HTMLSelectElement,
  colorBy: document.getElementById("color-by") as HTMLSelectElement,
  tagInput: document.getElementById("tag-input") as HTMLInputElement,
  stageBtn: document.getElementById("stage-tag") as HTMLButtonElement,
  untagBtn: document.getElementById("stage-untag") as HTMLButtonElement,
  commitBtn: document.getElementById("commit") as HTMLButtonElement,
  discardBtn: document.getElementById("discard") as HTMLButtonElement,
  pendingNote: document.getElementById("pending-note") as HTMLElement,
  conflictBox: document.getElementById("conflict") as HTMLElement,
  retryBtn: document.getElementById("retry-commit") as HTMLButtonElement,
  dropBtn: document.getElementById("drop-edits") as HTMLButtonElement,
  validateBtn: document.getElementById("validate") as HTMLButtonElement,
  panel: document.getElementById("validation-panel") as HTMLElement,
  status: document.getElementById("status") as HTMLElement,
  selectionNote: document.getElementById("selection-note") as HTMLElement,
};

let lasso: Pt[] = [];
let drawing = false;
let marks: Mark[] = [];
const docCache = new Map<string, DocumentDetail>();

function canvasPoint(event: MouseEvent): Pt {
  const rect = el.canvas.getBoundingClientRect();
  return { x: event.clientX - rect.left, y: event.clientY - rect.top };
}

function render(state: ViewState): void {
  const width = el.canvas.width;
  const height = el.canvas.height;
  const ctx = el.canvas.getContext("2d");
  if (ctx === null) return;

  const stagedIds = new Set(state.pendingEdits.map((e) => e.doc_id));
  const transform = transformFor(state.projection, width, height);
  marks = layout(state.projection, transform, {
    colorBy: state.colorBy,
    tagNames: state.summary?.tag_names ?? [],
    tags: state.tags,
    clusters: state.clusters,
  }, state.selection, stagedIds);
  drawScatter(ctx, width, height, marks, lasso);

  if (state.projection.length === 0) {
    ctx.fillStyle = "#60646c";
    ctx.font = "14px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(state.summary === null
      ? "open or create a session on the left"
      : "no documents in this session", width / 2, height / 2);
  }

  const summary = state.summary;
  el.methodSelect.innerHTML = "";
  for (const method of summary?.methods ?? []) {
    const option = document.createElement("option");
    option.value = method;
    option.textContent = method;
    if (method === state.clusters?.method) option.selected = true;
    el.methodSelect.append(option);
  }

  el.selectionNote.textContent = state.selection.size > 0
    ? `${state.selection.size} selected`
    : "";
  el.pendingNote.textContent = state.pendingEdits.length > 0
    ? `${state.pendingEdits.length} staged edits`
    : "";
  el.commitBtn.disabled =
    state.committing || state.pendingEdits.length === 0;
  el.discardBtn.disabled = state.pendingEdits.length === 0;
  el.conflictBox.hidden = state.conflict === null;
  if (state.conflict !== null) {
    const note = el.conflictBox.querySelector(".conflict-note");
    if (note !== null) {
      note.textContent =
        `someone else committed first (server at revision ` +
        `${state.conflict.currentRevision}); reload and retry, or drop ` +
        `your staged edits`;
    }
  }
  el.status.textContent = state.error ?? (summary !== null
    ? `session ${summary.session_id.slice(0, 8)} · revision ` +
      `${summary.revision} · ${summary.doc_count} docs`
    : "");

  renderPanel(state);
}

function renderPanel(state: ViewState): void {
  const taggedIndexes: number[] = [];
  state.projection.forEach((point, index) => {
    if ((state.tags.get(point.doc_id) ?? null) !== null) {
      taggedIndexes.push(index);
    }
  });
  const model = buildPanel(state.report, taggedCount(state), taggedIndexes,
                           state.clusters);
  el.panel.innerHTML = "";
  if (model.placeholder) {
    const p = document.createElement("p");
    p.className = "placeholder";
    p.textContent = "no validation yet — tag at least two groups and run it";
    el.panel.append(p);
    return;
  }
  if (model.accuracyLine !== null) {
    const p = document.createElement("p");
    p.className = "accuracy";
    p.textContent = model.accuracyLine;
    el.panel.append(p);
  }
  if (model.silhouetteLine !== null) {
    const p = document.createElement("p");
    p.textContent = model.silhouetteLine;
    el.panel.append(p);
  }
  for (const bar of model.bars) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.textContent = String(bar.cluster);
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    // silhouette lives in [-1, 1]; the track maps that range linearly
    fill.style.width = `${((bar.mean + 1) / 2) * 100}%`;
    const value = document.createElement("span");
    value.textContent = bar.mean.toFixed(3);
    track.append(fill);
    row.append(label, track, value);
    el.panel.append(row);
  }
}

async function refreshSessions(): Promise<void> {
  const sessions = await api.listSessions();
  el.sessionList.innerHTML = "";
  for (const session of sessions) {
    const item = document.createElement("li");
    const link = document.createElement("a");
    link.href = "#";
    link.textContent =
      `${session.session_id.slice(0, 8)} (${session.doc_count} docs)`;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      void bench.open(session.session_id);
    });
    item.append(link);
    el.sessionList.append(item);
  }
}

function hookEvents(): void {
  el.canvas.addEventListener("mousedown", (event) => {
    drawing = true;
    lasso = [canvasPoint(event)];
  });
  el.canvas.addEventListener("mousemove", (event) => {
    const pt = canvasPoint(event);
    if (drawing) {
      lasso.push(pt);
      render(bench.getState());
      return;
    }
    const near = marksNear(marks.map((m) => ({ x: m.x, y: m.y })), pt, 6);
    void showTooltip(near, event);
  });
  el.canvas.addEventListener("mouseup", () => {
    drawing = false;
    if (lasso.length > 2) {
      const inside = marks
        .filter((mark) => pointInPolygon({ x: mark.x, y: mark.y }, lasso))
        .map((mark) => mark.docId);
      bench.select(inside);
    } else {
      bench.clearSelection();
    }
    lasso = [];
    render(bench.getState());
  });

  el.createBtn.addEventListener("click", () => {
    const path = el.artifactPath.value.trim();
    if (path.length === 0) return;
    void (async () => {
      const summary = await api.createSession(path);
      await refreshSessions();
      await bench.open(summary.session_id);
    })().catch((err) => {
      el.status.textContent = err instanceof Error ? err.message : String(err);
    });
  });

  el.methodSelect.addEventListener("change", () => {
    void bench.showMethod(el.methodSelect.value);
  });
  el.colorBy.addEventListener("change", () => {
    bench.setColorBy(el.colorBy.value === "TAG" ? "TAG" : "CLUSTER");
  });
  el.stageBtn.addEventListener("click", () => {
    bench.stageTag(el.tagInput.value);
  });
  el.untagBtn.addEventListener("click", () => {
    bench.stageTag(null);
  });
  el.commitBtn.addEventListener("click", () => void bench.commit());
  el.discardBtn.addEventListener("click", () => bench.discardPending());
  el.retryBtn.addEventListener("click",
                               () => void bench.retryAfterConflict());
  el.dropBtn.addEventListener("click", () => bench.discardPending());
  el.validateBtn.addEventListener("click", () => {
    const method = el.methodSelect.value;
    if (method.length > 0) void bench.validate(method);
  });
}

async function showTooltip(indexes: number[],
                           event: MouseEvent): Promise<void> {
  if (indexes.length === 0) {
    el.tooltip.hidden = true;
    return;
  }
  const state = bench.getState();
  const sessionId = state.summary?.session_id;
  if (sessionId === undefined) return;
  const lines: string[] = [];
  // coincident points all get a line, so stacked marks stay reachable
  for (const index of indexes.slice(0, 4)) {
    const mark = marks[index];
    if (mark === undefined) continue;
    let doc = docCache.get(mark.docId);
    if (doc === undefined) {
      doc = await api.getDocument(sessionId, mark.docId);
      docCache.set(mark.docId, doc);
    }
    const tag = state.tags.get(mark.docId);
    lines.push(`${mark.docId}${tag ? ` [${tag}]` : ""}: ${doc.description}`);
  }
  if (indexes.length > 4) lines.push(`… and ${indexes.length - 4} more`);
  el.tooltip.textContent = lines.join("\n");
  el.tooltip.style.left = `${event.clientX + 12}px`;
  el.tooltip.style.top = `${event.clientY + 12}px`;
  el.tooltip.hidden = false;
}

bench.subscribe(render);
hookEvents();
render(bench.getState());
void refreshSessions().catch(() => {
  el.status.textContent = "service unreachable";
});
