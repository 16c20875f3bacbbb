from src.metrics.errors import (
    ErrorReport,
    compare_trajectories,
    ks_critical_value,
    ks_statistic,
    quantile_noise,
    regional_contrast,
)
from src.metrics.sweep import (
    STATUS_FAILED,
    STATUS_OK,
    SampleTestReport,
    SampleTestRow,
    SweepReport,
    SweepRow,
    convergence_sweep,
    sample_test,
)

__all__ = [
    "ErrorReport",
    "compare_trajectories",
    "ks_critical_value",
    "ks_statistic",
    "quantile_noise",
    "regional_contrast",
    "STATUS_FAILED",
    "STATUS_OK",
    "SampleTestReport",
    "SampleTestRow",
    "SweepReport",
    "SweepRow",
    "convergence_sweep",
    "sample_test",
]
