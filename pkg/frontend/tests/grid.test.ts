// @vitest-environment jsdom
import { describe, expect, it, vi } from 'vitest';

import type { SearchResponse, Suggestion } from '../src/api';
import { renderSuggestions, renderWarnings } from '../src/grid';

function suggestion(videoId: string, startMs: number): Suggestion {
  return {
    video_id: videoId,
    start_ms: startMs,
    end_ms: startMs + 2000,
    frames: [
      { video_id: videoId, timestamp_ms: startMs, query_id: 0, score: 0.9, source: 'text_raw' },
      { video_id: videoId, timestamp_ms: startMs + 1000, query_id: 1, score: 0.5, source: 'frame_emb' },
    ],
  };
}

describe('suggestion grid', () => {
  it('renders one row per suggestion', () => {
    const container = document.createElement('div');
    const response: SearchResponse = {
      suggestions: [suggestion('A', 0), suggestion('B', 5000), suggestion('A', 9000)],
      warnings: [],
    };
    renderSuggestions(container, response, () => {});
    expect(container.querySelectorAll('.suggestion-row')).toHaveLength(3);
  });

  it('shows an empty state for zero suggestions', () => {
    const container = document.createElement('div');
    renderSuggestions(container, { suggestions: [], warnings: [] }, () => {});
    expect(container.querySelectorAll('.suggestion-row')).toHaveLength(0);
    expect(container.querySelector('.empty-state')?.textContent).toMatch(/no clips/i);
  });

  it('preserves server order exactly', () => {
    const container = document.createElement('div');
    const response: SearchResponse = {
      suggestions: [suggestion('C', 7000), suggestion('A', 0), suggestion('B', 3000)],
      warnings: [],
    };
    renderSuggestions(container, response, () => {});
    const labels = [...container.querySelectorAll('.suggestion-label')].map(
      (el) => el.textContent ?? '',
    );
    expect(labels).toEqual(['C 7000-9000 ms', 'A 0-2000 ms', 'B 3000-5000 ms']);
  });

  it('clicking a frame cell opens the viewer on that frame', () => {
    const container = document.createElement('div');
    const open = vi.fn();
    const s = suggestion('A', 0);
    renderSuggestions(container, { suggestions: [s], warnings: [] }, open);
    const cells = container.querySelectorAll<HTMLButtonElement>('.frame-cell');
    cells[1].click();
    expect(open).toHaveBeenCalledWith(s, s.frames[1]);
  });

  it('re-rendering replaces the previous grid', () => {
    const container = document.createElement('div');
    renderSuggestions(container, { suggestions: [suggestion('A', 0)], warnings: [] }, () => {});
    renderSuggestions(container, { suggestions: [], warnings: [] }, () => {});
    expect(container.querySelectorAll('.suggestion-row')).toHaveLength(0);
  });
});

describe('warnings strip', () => {
  it('renders one line per warning', () => {
    const container = document.createElement('div');
    renderWarnings(container, ['query 0: embedding skipped', 'query 1: embedding skipped']);
    expect(container.querySelectorAll('.warning')).toHaveLength(2);
  });
});
