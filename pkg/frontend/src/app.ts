/** Controller binding the API client to the state transitions.
 *
 * Owns the commit lifecycle: stage, send with the optimistic revision,
 * and on a conflict hold the staged edits until the user either rebases
 * onto the server's tags and retries, or discards. Exactly one mutation
 * is in flight at any time; reads never block.
 */

import { Api, ApiError } from "./api.js";
import * as st from "./state.js";

export type Listener = (state: st.ViewState) => void;

export class Workbench {
  private state: st.ViewState = st.initialState;
  private readonly listeners: Listener[] = [];

  constructor(private readonly api: Api) {}

  getState(): st.ViewState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private setState(next: st.ViewState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  async open(sessionId: string): Promise<void> {
    const summary = await this.api.getSession(sessionId);
    const projection = await this.api.getProjection(sessionId);
    const method = summary.methods[0];
    const clusters = method !== undefined
      ? await this.api.getClusters(sessionId, method)
      : null;
    this.setState(st.sessionLoaded(this.state, summary, projection, clusters));
  }

  async showMethod(method: string): Promise<void> {
    const summary = this.requireSession();
    const clusters = await this.api.getClusters(summary.session_id, method);
    this.setState(st.methodChanged(this.state, clusters));
  }

  setColorBy(colorBy: st.ColorBy): void {
    this.setState(st.colorByChanged(this.state, colorBy));
  }

  select(docIds: ReadonlyArray<string>): void {
    this.setState(st.selected(this.state, docIds));
  }

  clearSelection(): void {
    this.setState(st.selectionCleared(this.state));
  }

  stageTag(tag: string | null): void {
    this.setState(st.staged(this.state, tag));
  }

  discardPending(): void {
    this.setState(st.pendingDiscarded(this.state));
  }

  /** Send the staged edits; false means nothing was sent. */
  async commit(): Promise<boolean> {
    const summary = this.requireSession();
    const started = st.commitStarted(this.state);
    if (started === null) return false;
    this.setState(started);
    try {
      const { revision } = await this.api.commitTags(
        summary.session_id, summary.revision, this.state.pendingEdits);
      this.setState(st.commitSucceeded(this.state, revision));
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.code === "revision_conflict") {
        this.setState(st.commitConflicted(
          this.state, err.currentRevision ?? summary.revision));
      } else {
        this.setState(st.commitFailed(this.state, describe(err)));
      }
      return false;
    }
  }

  /** Reload the server's tags and revision, then resend the staged edits. */
  async retryAfterConflict(): Promise<boolean> {
    const summary = this.requireSession();
    const fresh = await this.api.getSession(summary.session_id);
    const projection = await this.api.getProjection(summary.session_id);
    this.setState(st.refreshed(this.state, fresh, projection));
    return this.commit();
  }

  async validate(method: string): Promise<void> {
    const summary = this.requireSession();
    try {
      const report = await this.api.validate(summary.session_id, method);
      this.setState(st.reportReceived(this.state, report));
    } catch (err) {
      this.setState(st.reportFailed(this.state, describe(err)));
    }
  }

  private requireSession() {
    const summary = this.state.summary;
    if (summary === null) throw new Error("no session open");
    return summary;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}
