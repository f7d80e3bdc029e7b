/**
 * Suggestion grid rendering. One row per suggestion, strictly in the order
 * the server returned them; clicking a frame cell opens the viewer there.
 */

import type { RetrievedFrame, SearchResponse, Suggestion } from './api';

export type OpenViewer = (suggestion: Suggestion, frame: RetrievedFrame) => void;

function frameCell(suggestion: Suggestion, frame: RetrievedFrame, open: OpenViewer): HTMLElement {
  const cell = document.createElement('button');
  cell.className = 'frame-cell';
  cell.textContent = `${(frame.timestamp_ms / 1000).toFixed(1)}s ${frame.source}`;
  cell.title = `query ${frame.query_id}, score ${frame.score.toFixed(3)}`;
  cell.addEventListener('click', () => open(suggestion, frame));
  return cell;
}

function suggestionRow(suggestion: Suggestion, open: OpenViewer): HTMLElement {
  const row = document.createElement('div');
  row.className = 'suggestion-row';
  const label = document.createElement('span');
  label.className = 'suggestion-label';
  label.textContent = `${suggestion.video_id} ${suggestion.start_ms}-${suggestion.end_ms} ms`;
  row.appendChild(label);
  for (const frame of suggestion.frames) {
    row.appendChild(frameCell(suggestion, frame, open));
  }
  return row;
}

export function renderSuggestions(
  container: HTMLElement,
  response: SearchResponse,
  open: OpenViewer,
): void {
  container.replaceChildren();
  if (response.suggestions.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No clips matched your queries.';
    container.appendChild(empty);
    return;
  }
  for (const suggestion of response.suggestions) {
    container.appendChild(suggestionRow(suggestion, open));
  }
}

export function renderWarnings(container: HTMLElement, warnings: string[]): void {
  container.replaceChildren();
  for (const warning of warnings) {
    const line = document.createElement('p');
    line.className = 'warning';
    line.textContent = warning;
    container.appendChild(line);
  }
}
