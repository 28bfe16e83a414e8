"""Distance-based transformation-classification anomaly detection.

The heavy lifting lives in the compiled extension; this package re-exports
its surface and adds a couple of NumPy conveniences.
"""

from _goad import (  # noqa: F401
    GoadError,
    Lof,
    Model,
    TaskBank,
    __version__,
    encode_csv,
    f1_report,
    load,
    roc_auc,
    select_threshold,
    train,
)

__all__ = [
    "GoadError",
    "Lof",
    "Model",
    "TaskBank",
    "encode_csv",
    "f1_report",
    "load",
    "roc_auc",
    "select_threshold",
    "train",
    "f1_at_true_count",
]


def f1_at_true_count(scores, truth):
    """F1 when the threshold flags exactly as many rows as there are anomalies."""
    import numpy as np

    truth = np.asarray(truth, dtype=np.uint8)
    _, flags = select_threshold(list(map(float, scores)), int(truth.sum()))
    return f1_report(flags, truth)["f1"]
