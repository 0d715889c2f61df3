"""Orchestration: configuration, end-to-end pipeline, ablation runner, demo workspace."""
from .ablation import Cell, grid_cells, run_ablation
from .config import ConfigError, PipelineConfig, load_config
from .pipeline import Pipeline, PipelineResult, StageError, run_batch, run_pipeline
from .main import main

__all__ = [name for name in dir() if not name.startswith("_")]
