"""Training-frame quality control and image metrics."""
from .flow import DimensionMismatch, blur_score, dense_flow, poly_expansion, to_gray
from .metrics import PSNR_IDENTICAL, image_metrics, l1, psnr, ssim
from .qc import (
    QcReport, QcThresholds, SeriesTooShort, Tier, classify_frames, landmark_jump, load_drop_frames,
    save_qc_reports,
)

__all__ = [name for name in dir() if not name.startswith("_")]
