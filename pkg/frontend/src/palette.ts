// Fixed nine-color key: six anatomical hues from rectum to cecum, then
// three saturated alert hues for the anomaly layers. Every timeline entry
// and key swatch uses exactly these colors.

import type { LabelCode } from './types.js';
import { ALL_LABEL_CODES } from './types.js';

export const LABEL_COLORS: Record<LabelCode, string> = {
  R: '#1f77b4', // rectum - blue
  S: '#17becf', // sigmoid - cyan
  D: '#2ca02c', // descending - green
  T: '#bcbd22', // transverse - olive
  A: '#ff7f0e', // ascending - orange
  C: '#9467bd', // cecum - violet
  P: '#d62728', // polyp - red
  I: '#e377c2', // IBD - magenta
  B: '#8c564b', // blood clot - dark maroon
};

export const LABEL_NAMES: Record<LabelCode, string> = {
  R: 'rectum',
  S: 'sigmoid',
  D: 'descending',
  T: 'transverse',
  A: 'ascending',
  C: 'cecum',
  P: 'polyp',
  I: 'IBD',
  B: 'blood clot',
};

export interface KeySwatch {
  code: LabelCode;
  name: string;
  color: string;
}

/** The bottom-left color key, one swatch per label in display order. */
export function colorKey(): KeySwatch[] {
  return ALL_LABEL_CODES.map((code) => ({
    code,
    name: LABEL_NAMES[code],
    color: LABEL_COLORS[code],
  }));
}
