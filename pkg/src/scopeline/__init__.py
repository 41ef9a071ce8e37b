"""scopeline: annotation, reporting and comparison suite for colonoscopy
procedure videos.

Clinicians (or the transcript importer) mark colon segments, anomalies and
distance/finding tags on a video timeline; the engine validates the
hierarchical timeline, computes insertion/withdrawal times, assembles a
draft procedure report, and compares cases across procedures.
"""

from .model import (
    Annotation,
    Diagnostic,
    DiagnosticCode,
    Interval,
    Label,
    LabelKind,
    Severity,
    Tag,
    TagOrigin,
    Timeline,
    VideoMeta,
    label_from_code,
    validate_timeline,
)
from .timeline_ops import (
    LayoutEntry,
    LayoutRow,
    PhaseTimes,
    add_annotation,
    add_tag,
    compute_phase_times,
    hierarchy_layout,
    phase_ratio_warning,
    remove_annotation,
    segment_at,
)
from .transcript import (
    ParseResult,
    TranscriptLine,
    UtteranceEvent,
    apply_events,
    interpret_line,
    interpret_transcript,
    parse_transcript,
    snap5,
)
from .reporting import (
    FindingEntry,
    RenderFormat,
    Report,
    ReportStatus,
    finalize_report,
    generate_report,
    render_report,
    set_manual_sections,
)
from .comparison import (
    AnomalyMatch,
    AnomalyRecord,
    CaseSummary,
    ComparisonTable,
    MatchStatus,
    align_anomalies,
    compare_cases,
    summarize_case,
)
from .store import ProjectFile, load_project, new_project, save_project

__version__ = "0.1.0"
