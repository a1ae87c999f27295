"""Self-consuming generative loops: simulations and analysis kernels."""

from collections import defaultdict

from ._core import (
    CollapseError,
    RngStream,
    analyze_mixture,
    count_cells,
    covariate_transform,
    expected_variance_product,
    f_upper_tail,
    fit_gaussian,
    fit_ols,
    generate_toy,
    kde_log_density,
    kde_mean_nll,
    ols,
    regularized_incomplete_beta,
    replace_variance_prediction,
    run_gaussian,
    run_linreg,
    run_oracle,
    sample_kde,
    shrinking_variance_bound,
    stable_hash,
    theorem1_limits,
    wasserstein2_sq,
)

WORKFLOWS = ("Replace", "Accumulate", "Accumulate-Subsample")


def by_metric(records):
    """Group (iteration, metric, value) records into {metric: [(iteration, value), ...]}."""
    out = defaultdict(list)
    for iteration, metric, value in records:
        out[metric].append((iteration, value))
    return dict(out)


__all__ = [name for name in dir() if not name.startswith("_")]
