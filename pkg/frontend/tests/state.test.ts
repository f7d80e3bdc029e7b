import { describe, expect, it } from 'vitest';

import {
  type ViewerState,
  SearchSession,
  answerToExport,
  canSubmit,
  closedViewer,
  currentFrameIndex,
  emptyRow,
  rowValid,
  tabCapture,
} from '../src/state';

function openViewer(frameIndex: number, answer = '', fps = 25): ViewerState {
  // playhead chosen so floor(playhead x fps) + 1 lands on frameIndex
  return {
    open: true,
    videoId: 'V001',
    fps,
    playheadSeconds: (frameIndex - 1) / fps,
    answer,
  };
}

describe('frame index display', () => {
  it('is floor(playhead x fps) + 1', () => {
    expect(currentFrameIndex({ ...closedViewer(), fps: 25, playheadSeconds: 0 })).toBe(1);
    expect(currentFrameIndex({ ...closedViewer(), fps: 25, playheadSeconds: 1 })).toBe(26);
    expect(currentFrameIndex({ ...closedViewer(), fps: 30, playheadSeconds: 2.5 })).toBe(76);
  });
});

describe('tab capture', () => {
  it('appends comma-separated to an existing answer', () => {
    const viewer = tabCapture(openViewer(360, '120'));
    expect(viewer.answer).toBe('120,360');
  });

  it('starts a fresh answer from empty', () => {
    const viewer = tabCapture(openViewer(50, ''));
    expect(viewer.answer).toBe('50');
  });

  it('is a no-op while the viewer is closed', () => {
    const closed = { ...openViewer(50, '120'), open: false };
    expect(tabCapture(closed)).toBe(closed);
  });

  it('does not move the playhead', () => {
    const before = openViewer(360, '120');
    expect(tabCapture(before).playheadSeconds).toBe(before.playheadSeconds);
  });
});

describe('query panel validity', () => {
  it('rejects a row with no toggle', () => {
    const row = { ...emptyRow(), text: 'fire truck' };
    expect(rowValid(row)).toBe(false);
  });

  it('text sources need text', () => {
    const row = { ...emptyRow(), useTextRaw: true };
    expect(rowValid(row)).toBe(false);
    expect(rowValid({ ...row, text: 'fire truck' })).toBe(true);
  });

  it('frame source accepts an image payload without text', () => {
    const row = { ...emptyRow(), useFrameEmb: true, imagePayload: [1, 0, 0] };
    expect(rowValid(row)).toBe(true);
  });

  it('submit is gated on every row being valid', () => {
    const good = { ...emptyRow(), text: 'a', useTextRaw: true };
    expect(canSubmit({ rows: [good], question: '' })).toBe(true);
    expect(canSubmit({ rows: [good, emptyRow()], question: '' })).toBe(false);
    expect(canSubmit({ rows: [], question: '' })).toBe(false);
  });
});

describe('answer export payload', () => {
  it('parses the comma-separated field', () => {
    expect(answerToExport(openViewer(1, '120,360,900'))).toEqual({
      video_id: 'V001',
      frame_indices: [120, 360, 900],
    });
  });

  it('is null when the field is empty or malformed', () => {
    expect(answerToExport(openViewer(1, ''))).toBeNull();
    expect(answerToExport(openViewer(1, '12,abc'))).toBeNull();
  });
});

describe('search session', () => {
  it('discards superseded responses', () => {
    const session = new SearchSession();
    const first = session.begin();
    const second = session.begin();
    expect(session.isCurrent(first)).toBe(false);
    expect(session.isCurrent(second)).toBe(true);
  });
});
