// Wire types mirroring the annotation service's JSON payloads.
// The view layer never invents fields: what the server sends is what renders.

export type LabelCode = 'R' | 'S' | 'D' | 'T' | 'A' | 'C' | 'P' | 'I' | 'B';

export const SEGMENT_CODES: LabelCode[] = ['R', 'S', 'D', 'T', 'A', 'C'];
export const ANOMALY_CODES: LabelCode[] = ['P', 'I', 'B'];
export const ALL_LABEL_CODES: LabelCode[] = [...SEGMENT_CODES, ...ANOMALY_CODES];

export interface VideoData {
  video_id: string;
  frame_count: number;
  fps: number;
  source_uri?: string;
}

export interface AnnotationData {
  annotation_id: string;
  start_frame: number;
  end_frame: number;
  label: LabelCode;
  note?: string;
}

export interface TagData {
  tag_id: string;
  frame: number;
  distance_cm?: number;
  findings?: string;
  impressions?: string;
  origin: 'manual' | 'transcript';
}

export interface TimelineData {
  procedure_id: string;
  video: VideoData;
  annotations: AnnotationData[];
  tags: TagData[];
  patient_ref?: string;
  procedure_date?: string;
}

export interface LayoutEntry {
  start_frame: number;
  end_frame: number;
  label: LabelCode;
  annotation_id: string;
}

export interface LayoutRow {
  layer: number;
  entries: LayoutEntry[];
}

export interface PhaseTimesData {
  complete: boolean;
  insertion_s?: number;
  cecum_dwell_s?: number;
  withdrawal_s?: number;
  warnings?: DiagnosticData[];
}

export interface DiagnosticData {
  severity: 'error' | 'warning';
  code: string;
  message: string;
  subject: string | null;
}

export interface FindingData {
  anomaly_label: LabelCode;
  segment?: LabelCode;
  distance_cm?: number;
  findings_text?: string;
  impressions_text?: string;
  snapshot_frame: number;
  compound_attributes: string[];
  source_annotation_id: string;
  blood_clot_annotation_ids: string[];
}

export interface ReportData {
  status: 'draft' | 'complete';
  findings: FindingData[];
  phase_times: PhaseTimesData;
  general_information: string;
  clinical_history_and_physicals: string;
  consent: string;
  medications: string;
  impressions: string;
  preparation: string;
  procedure_notes: string;
  complications: string;
  recommendations: string;
}

export interface ProcedureDetail {
  schema_version: number;
  revision: number;
  saved_at: string;
  timeline: TimelineData;
  reports: ReportData[];
  layout: LayoutRow[];
}

export interface ProcedureListItem {
  procedure_id: string;
  revision: number;
  saved_at: string;
  video_id: string;
  frame_count: number;
  fps: number;
}

export interface CompareRow {
  case: string;
  segments: Record<string, Record<string, number>>;
  unsegmented: Record<string, number>;
  insertion_s: number | null;
  withdrawal_s: number | null;
  complete: boolean;
  phase_ratio_warning: boolean;
}

export interface CompareResponse {
  rows: CompareRow[];
  csv: string;
}

export interface MutationAck {
  revision: number;
  annotation_id?: string;
  tag_id?: string;
  classification?: 'distance_mark' | 'full_tag';
}
