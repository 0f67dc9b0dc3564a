from qarank.evaluation.metrics import (
    METRIC_NAMES,
    ConfusionMatrix,
    MetricReport,
    RocCurve,
    SingleClassError,
    auc_score,
    balance,
    confusion,
    metric_report,
    roc_and_auc,
    roc_curve,
    threshold_metrics,
)
from qarank.evaluation.scottknott import Cluster, cluster_of, scott_knott_esd
from qarank.evaluation.stats import (
    DegenerateTestError,
    DeLongResult,
    WilcoxonResult,
    cohens_d,
    cohens_d_groups,
    delong_test,
    wilcoxon_signed_rank,
)

__all__ = [
    "METRIC_NAMES", "ConfusionMatrix", "MetricReport", "RocCurve", "SingleClassError",
    "auc_score", "balance", "confusion", "metric_report", "roc_and_auc", "roc_curve",
    "threshold_metrics", "Cluster", "cluster_of", "scott_knott_esd", "DegenerateTestError",
    "DeLongResult", "WilcoxonResult", "cohens_d", "cohens_d_groups", "delong_test",
    "wilcoxon_signed_rank",
]
