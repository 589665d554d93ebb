"""Run configuration, stage orchestration, checkpoints and store statistics."""

from .checkpoint import Checkpoint
from .config import DedupConfig, ExpandConfig, PipelineConfig, RunSettings, SynthesizeConfig, load_config
from .run import STAGE_DIRS, STAGES, check_lineage, run_pipeline, stage_dir
from .stats import persona_stats, stats

__all__ = [
    "STAGES", "STAGE_DIRS", "Checkpoint", "DedupConfig", "ExpandConfig", "PipelineConfig", "RunSettings",
    "SynthesizeConfig", "check_lineage", "load_config", "persona_stats", "run_pipeline", "stage_dir", "stats",
]
