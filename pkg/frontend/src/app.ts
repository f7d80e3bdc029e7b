/**
 * Application wiring: binds the query panel, suggestion grid, viewer, and
 * keyboard shortcuts to the DOM. The page skeleton lives in index.html.
 */

import { ApiClient, ApiError, type RetrievedFrame, type Suggestion } from './api';
import { renderSuggestions, renderWarnings } from './grid';
import {
  type QueryPanelState,
  type ViewerState,
  SearchSession,
  answerToExport,
  canSubmit,
  closedViewer,
  currentFrameIndex,
  emptyRow,
  rowToRequest,
  tabCapture,
} from './state';

export interface AppElements {
  queryText: HTMLInputElement;
  toggleFrameEmb: HTMLInputElement;
  toggleTextEmb: HTMLInputElement;
  toggleTextRaw: HTMLInputElement;
  submitButton: HTMLButtonElement;
  grid: HTMLElement;
  warnings: HTMLElement;
  viewer: HTMLElement;
  viewerVideo: HTMLVideoElement;
  frameIndicator: HTMLElement; // top-right corner of the viewer
  answerField: HTMLInputElement;
  downloadButton: HTMLButtonElement;
  errorToast: HTMLElement;
}

export class App {
  panel: QueryPanelState = { rows: [emptyRow()], question: '' };
  viewer: ViewerState = closedViewer();
  private session = new SearchSession();
  private fpsByVideo: Record<string, number> = {};

  constructor(
    private el: AppElements,
    private api: ApiClient,
  ) {}

  async init(): Promise<void> {
    const meta = await this.api.meta();
    for (const [vid, info] of Object.entries(meta.videos)) {
      this.fpsByVideo[vid] = info.fps;
    }
    this.el.submitButton.addEventListener('click', () => void this.submit());
    this.el.downloadButton.addEventListener('click', () => void this.download());
    this.el.queryText.addEventListener('input', () => this.syncPanel());
    for (const toggle of [this.el.toggleFrameEmb, this.el.toggleTextEmb, this.el.toggleTextRaw]) {
      toggle.addEventListener('change', () => this.syncPanel());
    }
    this.el.answerField.addEventListener('input', () => {
      this.viewer = { ...this.viewer, answer: this.el.answerField.value };
      this.syncDownload();
    });
    this.el.viewerVideo.addEventListener('timeupdate', () => {
      this.viewer = { ...this.viewer, playheadSeconds: this.el.viewerVideo.currentTime };
      this.renderFrameIndicator();
    });
    document.addEventListener('keydown', (e) => this.onKeyDown(e));
    this.syncPanel();
    this.syncDownload();
  }

  syncPanel(): void {
    const row = this.panel.rows[0];
    row.text = this.el.queryText.value;
    row.useFrameEmb = this.el.toggleFrameEmb.checked;
    row.useTextEmb = this.el.toggleTextEmb.checked;
    row.useTextRaw = this.el.toggleTextRaw.checked;
    this.el.submitButton.disabled = !canSubmit(this.panel);
  }

  syncDownload(): void {
    this.el.downloadButton.disabled = answerToExport(this.viewer) === null;
  }

  async submit(): Promise<void> {
    const token = this.session.begin();
    try {
      const response = await this.api.search({
        queries: this.panel.rows.map(rowToRequest),
      });
      if (!this.session.isCurrent(token)) return; // superseded submission
      renderSuggestions(this.el.grid, response, (s, f) => this.openViewer(s, f));
      renderWarnings(this.el.warnings, response.warnings);
    } catch (err) {
      if (this.session.isCurrent(token)) this.showError(err);
    }
  }

  openViewer(suggestion: Suggestion, frame: RetrievedFrame): void {
    this.viewer = {
      open: true,
      videoId: suggestion.video_id,
      fps: this.fpsByVideo[suggestion.video_id] ?? 25,
      playheadSeconds: frame.timestamp_ms / 1000,
      answer: this.viewer.videoId === suggestion.video_id ? this.viewer.answer : '',
    };
    this.el.viewer.hidden = false;
    this.el.viewerVideo.currentTime = this.viewer.playheadSeconds;
    this.el.answerField.value = this.viewer.answer;
    this.renderFrameIndicator();
    this.syncDownload();
  }

  closeViewer(): void {
    this.viewer = { ...this.viewer, open: false };
    this.el.viewer.hidden = true;
  }

  renderFrameIndicator(): void {
    this.el.frameIndicator.textContent = `frame ${currentFrameIndex(this.viewer)}`;
  }

  onKeyDown(e: KeyboardEvent): void {
    if (e.key === 'Tab' && this.viewer.open && document.activeElement === this.el.answerField) {
      e.preventDefault(); // playback keeps running; Tab only captures
      this.viewer = tabCapture(this.viewer);
      this.el.answerField.value = this.viewer.answer;
      this.syncDownload();
      return;
    }
    if (e.key === 'Escape' && this.viewer.open) {
      this.closeViewer();
      return;
    }
    if (e.key === '/' && document.activeElement !== this.el.queryText
        && document.activeElement !== this.el.answerField) {
      e.preventDefault();
      this.el.queryText.focus();
    }
  }

  async download(): Promise<void> {
    const answer = answerToExport(this.viewer);
    if (answer === null) return;
    try {
      const csv = await this.api.exportCsv([answer]);
      const blob = new Blob([csv], { type: 'text/csv' });
      const link = document.createElement('a');
      link.href = URL.createObjectURL(blob);
      link.download = 'answers.csv';
      link.click();
      URL.revokeObjectURL(link.href);
    } catch (err) {
      this.showError(err);
    }
  }

  showError(err: unknown): void {
    const message = err instanceof ApiError ? `server error ${err.status}: ${err.message}` : String(err);
    this.el.errorToast.textContent = message;
    this.el.errorToast.hidden = false;
  }
}
