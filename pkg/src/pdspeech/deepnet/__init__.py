from .network import (CnnParams, cnn_backward, cnn_forward, count_parameters,
                      init_cnn_params, load_checkpoint, save_checkpoint)
from .ops import BACKEND
from .train import (AdamState, TrainConfig, cnn_train, predict_sample_probs,
                    split_by_segment)
from .windows import (WINDOW_STRIDE, WINDOW_WIDTH, SampleWindow, stack_windows,
                      window_count, window_samples)

__all__ = [
    "BACKEND",
    "AdamState",
    "CnnParams",
    "SampleWindow",
    "TrainConfig",
    "WINDOW_STRIDE",
    "WINDOW_WIDTH",
    "cnn_backward",
    "cnn_forward",
    "cnn_train",
    "count_parameters",
    "init_cnn_params",
    "load_checkpoint",
    "predict_sample_probs",
    "save_checkpoint",
    "split_by_segment",
    "stack_windows",
    "window_count",
    "window_samples",
]
