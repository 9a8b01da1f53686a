/** View state and its transitions, kept as pure functions.
 *
 * Two invariants hold at every step: the selection only ever contains
 * loaded doc ids, and staged edits are emptied by a successful commit and
 * by nothing else except an explicit discard. Mutations are serialized:
 * while one commit is in flight no second one can start.
 */

import type {
  ClusterPayload,
  ProjectionPoint,
  SessionSummary,
  TagEdit,
  ValidationReport,
} from "./api.js";

export type ColorBy = "CLUSTER" | "TAG";

export interface ViewState {
  summary: SessionSummary | null;
  projection: ProjectionPoint[];
  tags: ReadonlyMap<string, string | null>;
  clusters: ClusterPayload | null;
  colorBy: ColorBy;
  selection: ReadonlySet<string>;
  pendingEdits: TagEdit[];
  committing: boolean;
  conflict: { currentRevision: number } | null;
  report: ValidationReport | null;
  error: string | null;
}

export const initialState: ViewState = {
  summary: null,
  projection: [],
  tags: new Map(),
  clusters: null,
  colorBy: "CLUSTER",
  selection: new Set(),
  pendingEdits: [],
  committing: false,
  conflict: null,
  report: null,
  error: null,
};

function tagsOf(projection: ProjectionPoint[]): Map<string, string | null> {
  return new Map(projection.map((p) => [p.doc_id, p.tag]));
}

export function sessionLoaded(state: ViewState, summary: SessionSummary,
                              projection: ProjectionPoint[],
                              clusters: ClusterPayload | null): ViewState {
  return {
    ...initialState,
    summary,
    projection,
    clusters,
    tags: tagsOf(projection),
    colorBy: state.colorBy,
  };
}

/** Server truth after a reload: tags and revision move, staged work stays. */
export function refreshed(state: ViewState, summary: SessionSummary,
                          projection: ProjectionPoint[]): ViewState {
  return {
    ...state,
    summary,
    projection,
    tags: tagsOf(projection),
    conflict: null,
  };
}

export function methodChanged(state: ViewState,
                              clusters: ClusterPayload): ViewState {
  return { ...state, clusters, report: null };
}

export function colorByChanged(state: ViewState, colorBy: ColorBy): ViewState {
  return { ...state, colorBy };
}

export function selected(state: ViewState,
                         docIds: ReadonlyArray<string>): ViewState {
  const loaded = new Set(state.projection.map((p) => p.doc_id));
  const selection = new Set(docIds.filter((id) => loaded.has(id)));
  return { ...state, selection };
}

export function selectionCleared(state: ViewState): ViewState {
  return { ...state, selection: new Set() };
}

/**
 * Stage one edit per selected document. A blank tag is refused here, on
 * the client, before anything reaches the service; `null` is the
 * deliberate untag. Restaging a document replaces its earlier edit.
 */
export function staged(state: ViewState, rawTag: string | null): ViewState {
  const tag = rawTag === null ? null : rawTag.trim();
  if (tag !== null && tag.length === 0) {
    return { ...state, error: "tag must not be empty" };
  }
  if (state.selection.size === 0) {
    return { ...state, error: "nothing selected" };
  }
  const kept = state.pendingEdits.filter(
    (e) => !state.selection.has(e.doc_id));
  const added: TagEdit[] = state.projection
    .filter((p) => state.selection.has(p.doc_id))
    .map((p) => ({ doc_id: p.doc_id, tag }));
  return {
    ...state,
    pendingEdits: [...kept, ...added],
    selection: new Set(),
    error: null,
  };
}

export function pendingDiscarded(state: ViewState): ViewState {
  return { ...state, pendingEdits: [], conflict: null, error: null };
}

/** Gate for the single in-flight mutation; null means "do not send". */
export function commitStarted(state: ViewState): ViewState | null {
  if (state.committing || state.pendingEdits.length === 0) return null;
  return { ...state, committing: true, error: null };
}

export function commitSucceeded(state: ViewState,
                                revision: number): ViewState {
  const tags = new Map(state.tags);
  const tagNames = [...(state.summary?.tag_names ?? [])];
  for (const edit of state.pendingEdits) {
    tags.set(edit.doc_id, edit.tag);
    if (edit.tag !== null && !tagNames.includes(edit.tag)) {
      tagNames.push(edit.tag);
    }
  }
  const projection = state.projection.map((p) => ({
    ...p,
    tag: tags.get(p.doc_id) ?? null,
  }));
  return {
    ...state,
    summary: state.summary
      ? { ...state.summary, revision, tag_names: tagNames }
      : null,
    projection,
    tags,
    pendingEdits: [],
    committing: false,
    conflict: null,
  };
}

/** A 409 keeps the staged edits; the user decides to rebase or discard. */
export function commitConflicted(state: ViewState,
                                 currentRevision: number): ViewState {
  return {
    ...state,
    committing: false,
    conflict: { currentRevision },
  };
}

export function commitFailed(state: ViewState, message: string): ViewState {
  return { ...state, committing: false, error: message };
}

export function reportReceived(state: ViewState,
                               report: ValidationReport): ViewState {
  return { ...state, report };
}

export function reportFailed(state: ViewState, message: string): ViewState {
  return { ...state, report: null, error: message };
}

/** Count of documents the server would score: those carrying a tag. */
export function taggedCount(state: ViewState): number {
  let count = 0;
  for (const tag of state.tags.values()) {
    if (tag !== null) count++;
  }
  return count;
}
