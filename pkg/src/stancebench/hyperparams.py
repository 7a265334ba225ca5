"""Published per-topic hyperparameter defaults for the compared models.

Epoch values are ranges: training runs to the upper bound and the vote
scheme checkpoints every epoch inside the range.  The convolutional
model's published configuration names no learning rate or epoch range,
so it reuses the attention models' values (recorded as a local default).
"""

from __future__ import annotations

from .errors import ConfigError
from .svm import SvmTrainConfig
from .training import TrainSchedule

TOPICS = ("AT", "CC", "FM", "HC", "LA", "MMR", "SC", "EC", "VC", "HRT")

_TAN_L2 = {
    "AT": 1.25, "HRT": 1.25,
    "CC": 1.0, "LA": 1.0, "HC": 1.0,
    "FM": 0.75,
    "MMR": 0.25, "SC": 0.25, "VC": 0.25, "EC": 0.25,
}
_TAN_EPOCHS = {
    "AT": (40, 50), "LA": (40, 50), "VC": (40, 50),
    "CC": (50, 60), "FM": (50, 60), "HC": (50, 60),
    "MMR": (50, 60), "HRT": (50, 60), "SC": (50, 60), "EC": (50, 60),
}

_LSTM_L2 = {
    "AT": 0.25, "HC": 0.25, "VC": 0.25, "EC": 0.25,
    "CC": 0.5, "LA": 0.5, "MMR": 0.5, "HRT": 0.5, "SC": 0.5,
    "FM": 0.75,
}
_LSTM_EPOCHS = {
    "AT": (50, 60), "CC": (50, 60), "FM": (50, 60),
    "LA": (50, 60), "HC": (50, 60), "SC": (50, 60),
    "MMR": (30, 40), "HRT": (30, 40), "VC": (30, 40), "EC": (30, 40),
}

_CNN_NORM_LIMIT = {
    "AT": 7.0, "FM": 7.0, "LA": 7.0, "MMR": 7.0, "VC": 7.0, "EC": 7.0,
    "CC": 8.0, "HC": 8.0, "HRT": 8.0,
    "SC": 9.0,
}

NEURAL_LEARNING_RATE = 5e-4
NEURAL_BATCH_SIZE = 50
NEURAL_DROPOUT = 0.5
CNN_LR_DECAY = 0.95

SVM_GAMMA = 0.001


def _check_topic(topic: str) -> None:
    if topic not in TOPICS:
        raise ConfigError(f"unknown topic {topic!r} (expected one of {TOPICS})")


def epoch_range(model_name: str, topic: str) -> tuple[int, int]:
    _check_topic(topic)
    if model_name in ("tan", "tan_minus", "cnn"):
        return _TAN_EPOCHS[topic]
    if model_name == "lstm":
        return _LSTM_EPOCHS[topic]
    raise ConfigError(f"no epoch range for model {model_name!r}")


def checkpoint_epochs(model_name: str, topic: str) -> tuple[int, ...]:
    lo, hi = epoch_range(model_name, topic)
    return tuple(range(lo, hi + 1))


def neural_schedule(
    model_name: str, topic: str, seed: int = 0, **overrides
) -> TrainSchedule:
    _check_topic(topic)
    lo, hi = epoch_range(model_name, topic)
    values = dict(
        learning_rate=NEURAL_LEARNING_RATE,
        batch_size=NEURAL_BATCH_SIZE,
        dropout=NEURAL_DROPOUT,
        epochs=hi,
        seed=seed,
    )
    if model_name in ("tan", "tan_minus"):
        values["l2"] = _TAN_L2[topic]
    elif model_name == "lstm":
        values["l2"] = _LSTM_L2[topic]
    elif model_name == "cnn":
        values["lr_decay"] = CNN_LR_DECAY
        values["norm_limit"] = _CNN_NORM_LIMIT[topic]
    else:
        raise ConfigError(f"unknown neural model {model_name!r}")
    values.update(overrides)
    return TrainSchedule(**values)


def svm_config(topic: str, seed: int = 0, **overrides) -> SvmTrainConfig:
    _check_topic(topic)
    values = dict(lambda_=0.01, epochs=100, seed=seed, gamma=SVM_GAMMA)
    values.update(overrides)
    return SvmTrainConfig(**values)
