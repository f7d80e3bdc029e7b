/**
 * Pure UI state logic: query panel validity, viewer frame math, the Tab
 * timestamp capture, and stale-response bookkeeping. No DOM access here so
 * everything is unit-testable.
 */

export interface QueryRow {
  text: string;
  imagePayload: number[] | string | null;
  useFrameEmb: boolean;
  useTextEmb: boolean;
  useTextRaw: boolean;
}

export interface QueryPanelState {
  rows: QueryRow[];
  question: string; // current question banner
}

export interface ViewerState {
  open: boolean;
  videoId: string;
  fps: number;
  playheadSeconds: number;
  answer: string;
}

export function emptyRow(): QueryRow {
  return { text: '', imagePayload: null, useFrameEmb: false, useTextEmb: false, useTextRaw: false };
}

export function closedViewer(): ViewerState {
  return { open: false, videoId: '', fps: 25, playheadSeconds: 0, answer: '' };
}

/** A row may be submitted once it has a toggle and the matching payload. */
export function rowValid(row: QueryRow): boolean {
  if (!row.useFrameEmb && !row.useTextEmb && !row.useTextRaw) return false;
  if ((row.useTextEmb || row.useTextRaw) && row.text.trim() === '') return false;
  if (row.useFrameEmb && row.imagePayload === null && row.text.trim() === '') return false;
  return true;
}

export function canSubmit(panel: QueryPanelState): boolean {
  return panel.rows.length > 0 && panel.rows.every(rowValid);
}

export function rowToRequest(row: QueryRow) {
  return {
    text: row.text.trim() || undefined,
    image_payload: row.imagePayload ?? undefined,
    use_frame_emb: row.useFrameEmb,
    use_text_emb: row.useTextEmb,
    use_text_raw: row.useTextRaw,
  };
}

/** Displayed frame index: floor(playhead seconds x fps) + 1. */
export function currentFrameIndex(viewer: ViewerState): number {
  return Math.floor(viewer.playheadSeconds * viewer.fps) + 1;
}

/**
 * Tab handler: append the current frame index to the answer field,
 * comma-separated, without touching playback. No-op when the viewer is
 * closed.
 */
export function tabCapture(viewer: ViewerState): ViewerState {
  if (!viewer.open) return viewer;
  const idx = String(currentFrameIndex(viewer));
  const answer = viewer.answer === '' ? idx : viewer.answer + ',' + idx;
  return { ...viewer, answer };
}

/** The answer field as an export payload, or null if it holds no indices. */
export function answerToExport(viewer: ViewerState) {
  const indices = viewer.answer
    .split(',')
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => parseInt(s, 10));
  if (indices.length === 0 || indices.some((n) => !Number.isInteger(n))) return null;
  return { video_id: viewer.videoId, frame_indices: indices };
}

/**
 * One in-flight search per panel: each submission takes a fresh sequence
 * number, and a response is applied only if it is still the latest.
 */
export class SearchSession {
  private seq = 0;

  begin(): number {
    return ++this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}
