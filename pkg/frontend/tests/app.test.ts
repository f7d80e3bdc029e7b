// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from 'vitest';

import type { ApiClient, SearchResponse } from '../src/api';
import { App, type AppElements } from '../src/app';

function makeElements(): AppElements {
  document.body.innerHTML = `
    <input id="query-text" type="text">
    <input id="toggle-frame-emb" type="checkbox">
    <input id="toggle-text-emb" type="checkbox">
    <input id="toggle-text-raw" type="checkbox">
    <button id="submit"></button>
    <div id="grid"></div>
    <div id="warnings"></div>
    <div id="viewer" hidden>
      <span id="frame-indicator"></span>
      <video id="viewer-video"></video>
      <input id="answer-field" type="text">
      <button id="download"></button>
    </div>
    <div id="error-toast" hidden></div>
  `;
  const byId = (id: string) => document.getElementById(id) as HTMLElement;
  return {
    queryText: byId('query-text') as HTMLInputElement,
    toggleFrameEmb: byId('toggle-frame-emb') as HTMLInputElement,
    toggleTextEmb: byId('toggle-text-emb') as HTMLInputElement,
    toggleTextRaw: byId('toggle-text-raw') as HTMLInputElement,
    submitButton: byId('submit') as HTMLButtonElement,
    grid: byId('grid'),
    warnings: byId('warnings'),
    viewer: byId('viewer'),
    viewerVideo: byId('viewer-video') as HTMLVideoElement,
    frameIndicator: byId('frame-indicator'),
    answerField: byId('answer-field') as HTMLInputElement,
    downloadButton: byId('download') as HTMLButtonElement,
    errorToast: byId('error-toast'),
  };
}

const response: SearchResponse = {
  suggestions: [
    {
      video_id: 'V000',
      start_ms: 1000,
      end_ms: 3000,
      frames: [
        { video_id: 'V000', timestamp_ms: 1000, query_id: 0, score: 1, source: 'text_raw' },
      ],
    },
  ],
  warnings: [],
};

function makeApi(): ApiClient {
  return {
    meta: vi.fn().mockResolvedValue({
      generation: 'g',
      videos: { V000: { fps: 25 } },
      defaults: { T_ms: 60000, K: 100 },
    }),
    search: vi.fn().mockResolvedValue(response),
    exportCsv: vi.fn().mockResolvedValue('V000,26\r\n'),
  } as unknown as ApiClient;
}

function key(name: string): void {
  document.dispatchEvent(new KeyboardEvent('keydown', { key: name, bubbles: true, cancelable: true }));
}

describe('app wiring', () => {
  let el: AppElements;
  let app: App;

  beforeEach(async () => {
    el = makeElements();
    app = new App(el, makeApi());
    await app.init();
  });

  it('disables submit until a row is valid', () => {
    expect(el.submitButton.disabled).toBe(true);
    el.queryText.value = 'fire truck';
    el.queryText.dispatchEvent(new Event('input'));
    expect(el.submitButton.disabled).toBe(true); // still no toggle
    el.toggleTextRaw.checked = true;
    el.toggleTextRaw.dispatchEvent(new Event('change'));
    expect(el.submitButton.disabled).toBe(false);
  });

  it('search renders the grid and clicking opens the viewer', async () => {
    await app.submit();
    const cell = el.grid.querySelector<HTMLButtonElement>('.frame-cell');
    expect(cell).not.toBeNull();
    cell!.click();
    expect(el.viewer.hidden).toBe(false);
    expect(el.frameIndicator.textContent).toBe('frame 26'); // 1.0 s at 25 fps
  });

  it('Tab captures the frame into the focused answer field', async () => {
    await app.submit();
    el.grid.querySelector<HTMLButtonElement>('.frame-cell')!.click();
    el.answerField.value = '120';
    el.answerField.dispatchEvent(new Event('input'));
    el.answerField.focus();
    key('Tab');
    expect(el.answerField.value).toBe('120,26');
    expect(el.downloadButton.disabled).toBe(false);
  });

  it('Tab does nothing when the viewer is closed', () => {
    el.answerField.value = '120';
    el.answerField.focus();
    key('Tab');
    expect(el.answerField.value).toBe('120');
  });

  it('Escape closes the viewer', async () => {
    await app.submit();
    el.grid.querySelector<HTMLButtonElement>('.frame-cell')!.click();
    key('Escape');
    expect(el.viewer.hidden).toBe(true);
  });

  it('"/" focuses the query box', () => {
    expect(document.activeElement).not.toBe(el.queryText);
    key('/');
    expect(document.activeElement).toBe(el.queryText);
  });

  it('download stays disabled with no captured answers', () => {
    expect(el.downloadButton.disabled).toBe(true);
  });
});
