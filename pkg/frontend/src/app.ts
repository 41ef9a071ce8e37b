// Application wiring: binds the session, views and player to the page.
// All domain behavior lives in the imported modules; this file is glue.

import { ApiClient } from './api.js';
import { ProcedureSession } from './session.js';
import { ComparisonView } from './compare.js';
import { ReportView } from './report.js';
import { HtmlVideoPlayer } from './player.js';
import { renderColorKey, renderRows, renderTagStrip } from './render.js';
import { distanceFieldValid } from './glyphs.js';
import type { LabelCode } from './types.js';
import { ALL_LABEL_CODES, SEGMENT_CODES } from './types.js';
import { LABEL_NAMES } from './palette.js';

const api = new ApiClient('');

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const procedures = await api.listProcedures();
  const picker = el<HTMLSelectElement>('procedure-picker');
  for (const item of procedures) {
    const option = document.createElement('option');
    option.value = item.procedure_id;
    option.textContent = `${item.procedure_id} (rev ${item.revision})`;
    picker.appendChild(option);
  }
  el('color-key-slot').appendChild(renderColorKey(document));
  picker.addEventListener('change', () => openProcedure(picker.value));
  if (procedures.length > 0) await openProcedure(procedures[0]!.procedure_id);
}

async function openProcedure(procedureId: string): Promise<void> {
  const session = new ProcedureSession(api, procedureId);
  await session.load();
  const video = el<HTMLVideoElement>('player');
  video.src = api.videoUrl(procedureId);
  const meta = session.detail.timeline.video;
  const player = new HtmlVideoPlayer(video, meta.fps, meta.frame_count);
  player.onFrameChange((frame) => {
    session.view.currentFrame = frame;
    el('cursor-frame').textContent = `frame ${frame}`;
  });

  const timelineSlot = el('timeline-slot');
  const redraw = () => {
    timelineSlot.replaceChildren(
      renderRows(document, session.view),
      renderTagStrip(document, session.view, session.tags(), (tagId) => {
        const tag = session.tags().find((t) => t.tag_id === tagId);
        if (tag) player.seekToFrame(tag.frame);
      }),
    );
  };
  redraw();

  const armButton = el<HTMLButtonElement>('annotate-button');
  armButton.onclick = () => {
    session.view.armAnnotate(!session.view.annotateArmed);
    armButton.classList.toggle('armed', session.view.annotateArmed);
  };

  const frameAt = (event: MouseEvent): number => {
    const rect = timelineSlot.getBoundingClientRect();
    const ratio = (event.clientX - rect.left) / rect.width;
    const span = session.view.zoom.end - session.view.zoom.start;
    return Math.round(session.view.zoom.start + ratio * span);
  };

  timelineSlot.onmousedown = (event) => session.view.beginGesture(frameAt(event));
  timelineSlot.onmousemove = (event) => session.view.dragGesture(frameAt(event));
  timelineSlot.onmouseup = async (event) => {
    const range = session.view.releaseGesture(frameAt(event));
    if (!range) return;
    const label = await pickLabel(event);
    if (!label) return;
    const outcome = await session.annotateGesture(range.start, range.end, label);
    if (outcome.kind === 'ok') redraw();
    else showInline(`${outcome.code}: ${outcome.message}`);
  };

  timelineSlot.oncontextmenu = (event) => {
    event.preventDefault();
    openTagDialog(session, frameAt(event), redraw);
  };

  el<HTMLButtonElement>('generate-report').onclick = async () => {
    const reportView = new ReportView(api, procedureId);
    await reportView.generate({});
    if (reportView.inlineError) showInline(reportView.inlineError);
    else el('report-slot').textContent = JSON.stringify(reportView.report, null, 2);
  };

  el<HTMLButtonElement>('compare-button').onclick = async () => {
    const ids = el<HTMLInputElement>('compare-ids').value.split(',').map((s) => s.trim());
    const view = new ComparisonView(api, async () => player);
    await view.load(ids.filter((s) => s.length > 0));
    el('compare-slot').textContent = view.csv;
  };
}

/** The drop-down that pops up at the cursor after a drag. */
function pickLabel(event: MouseEvent): Promise<LabelCode | null> {
  return new Promise((resolve) => {
    const menu = document.createElement('div');
    menu.className = 'label-menu';
    menu.style.left = `${event.clientX}px`;
    menu.style.top = `${event.clientY}px`;
    for (const code of ALL_LABEL_CODES) {
      const item = document.createElement('button');
      item.textContent = `${code} ${LABEL_NAMES[code]}`;
      item.onclick = () => {
        menu.remove();
        resolve(code);
      };
      menu.appendChild(item);
    }
    const dismiss = document.createElement('button');
    dismiss.textContent = 'cancel';
    dismiss.onclick = () => {
      menu.remove();
      resolve(null);
    };
    menu.appendChild(dismiss);
    document.body.appendChild(menu);
  });
}

function openTagDialog(session: ProcedureSession, frame: number, redraw: () => void): void {
  const dialog = el<HTMLElement>('tag-dialog');
  dialog.hidden = false;
  const distance = el<HTMLInputElement>('tag-distance');
  const findings = el<HTMLTextAreaElement>('tag-findings');
  const impressions = el<HTMLTextAreaElement>('tag-impressions');
  distance.oninput = () => {
    distance.classList.toggle('invalid', !distanceFieldValid(distance.value));
  };
  el<HTMLButtonElement>('tag-submit').onclick = async () => {
    const outcome = await session.submitTag(frame, {
      distance_cm: distance.value.trim() === '' ? undefined : Number(distance.value),
      findings: findings.value || undefined,
      impressions: impressions.value || undefined,
    });
    if (outcome.kind === 'ok') {
      dialog.hidden = true;
      redraw();
    } else {
      showInline(`${outcome.code}: ${outcome.message}`);
    }
  };
  el<HTMLButtonElement>('tag-cancel').onclick = () => {
    dialog.hidden = true;
  };
}

function showInline(message: string): void {
  el('inline-error').textContent = message;
}

// segment codes are re-exported for the style guide's anatomical ordering
export { SEGMENT_CODES };

if (typeof document !== 'undefined' && document.getElementById('procedure-picker')) {
  void boot();
}
