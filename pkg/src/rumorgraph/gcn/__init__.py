"""Two-layer graph convolutional network with hand-derived gradients."""

from .kernels import ShapeError, hadamard, matmul, sigmoid, softmax, transpose
from .model import (
    ForwardCache,
    GcnConfig,
    GcnModel,
    Gradients,
    TrainingError,
    TrainResult,
    backward,
    bce_loss,
    ce_loss,
    classes_from_output,
    forward,
    load_checkpoint,
    loss_fn,
    one_hot,
    predict,
    predict_proba,
    save_checkpoint,
    train,
    train_mlp,
    write_loss_trace,
)
