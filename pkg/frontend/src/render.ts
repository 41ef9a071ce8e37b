// DOM construction for the timeline rows, tag strip and color key.
// Pure functions from server state to elements; no fetching in here.

import { LABEL_COLORS } from './palette.js';
import { colorKey } from './palette.js';
import { glyphForTag } from './glyphs.js';
import type { LayoutRow, TagData } from './types.js';
import type { TimelineViewState } from './timeline.js';

export function renderRows(
  doc: Document,
  view: TimelineViewState,
  onSelect?: (annotationId: string) => void,
): HTMLElement {
  const container = doc.createElement('div');
  container.className = 'timeline-rows';
  for (const row of view.rows) {
    container.appendChild(renderRow(doc, view, row, onSelect));
  }
  return container;
}

function renderRow(
  doc: Document,
  view: TimelineViewState,
  row: LayoutRow,
  onSelect?: (annotationId: string) => void,
): HTMLElement {
  const rowElement = doc.createElement('div');
  rowElement.className = 'timeline-row';
  rowElement.dataset.layer = String(row.layer);
  for (const entry of row.entries) {
    const block = doc.createElement('div');
    block.className = 'timeline-entry';
    block.dataset.annotationId = entry.annotation_id;
    block.dataset.label = entry.label;
    block.style.backgroundColor = LABEL_COLORS[entry.label];
    block.style.left = `${view.positionFor(entry.start_frame) * 100}%`;
    block.style.width = `${(view.positionFor(entry.end_frame) - view.positionFor(entry.start_frame)) * 100}%`;
    block.title = `${entry.label} [${entry.start_frame}, ${entry.end_frame})`;
    if (onSelect) block.addEventListener('click', () => onSelect(entry.annotation_id));
    rowElement.appendChild(block);
  }
  return rowElement;
}

export function renderTagStrip(
  doc: Document,
  view: TimelineViewState,
  tags: TagData[],
  onClick?: (tagId: string) => void,
): HTMLElement {
  const strip = doc.createElement('div');
  strip.className = 'tag-strip';
  for (const tag of tags) {
    const glyph = doc.createElement('span');
    glyph.className = `tag-glyph ${glyphForTag(tag)}`;
    glyph.dataset.tagId = tag.tag_id;
    glyph.dataset.frame = String(tag.frame);
    glyph.style.left = `${view.positionFor(tag.frame) * 100}%`;
    glyph.textContent = glyphForTag(tag) === 'distance-mark' ? '|' : '▼';
    if (tag.distance_cm !== undefined) glyph.title = `${tag.distance_cm} cm`;
    if (onClick) glyph.addEventListener('click', () => onClick(tag.tag_id));
    strip.appendChild(glyph);
  }
  return strip;
}

export function renderColorKey(doc: Document): HTMLElement {
  const key = doc.createElement('div');
  key.className = 'color-key';
  for (const swatch of colorKey()) {
    const item = doc.createElement('span');
    item.className = 'key-item';
    item.dataset.label = swatch.code;
    const chip = doc.createElement('span');
    chip.className = 'key-chip';
    chip.style.backgroundColor = swatch.color;
    const text = doc.createElement('span');
    text.textContent = `${swatch.code} ${swatch.name}`;
    item.appendChild(chip);
    item.appendChild(text);
    key.appendChild(item);
  }
  return key;
}
