#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqclick/numkernel.hpp"

namespace seqclick {

// Predictions are clamped to [kProbClamp, 1 - kProbClamp] inside the cross
// entropy so degenerate models yield bounded metrics.
inline constexpr double kProbClamp = 1e-12;

// Rank-based AUC (Mann-Whitney, ties count one half). Throws
// UndefinedMetricError unless both classes are present.
double auc(const Vec& scores, const std::vector<int>& labels);

// Mean clamped cross entropy of predictions against binary labels.
double mean_log_loss(const Vec& preds, const std::vector<int>& labels);

// RIG = 1 - CE / H(r) with r the empirical positive rate of the evaluated
// set, so a constant base-rate predictor scores exactly zero. Throws
// UndefinedMetricError on a one-class label set.
double rig(const Vec& preds, const std::vector<int>& labels);

struct MetricsResult {
    std::optional<double> auc;  // absent when the set has one class
    std::optional<double> rig;
    double mean_log_loss = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_positives = 0;
    double base_rate = 0.0;
};

struct EvalReport {
    MetricsResult overall;
    // One entry per distinct segment label, sorted by label. Segments with a
    // single class carry flagged (absent) AUC/RIG instead of erroring.
    std::vector<std::pair<std::string, MetricsResult>> segments;
};

EvalReport evaluate(const Vec& preds, const std::vector<int>& labels);
EvalReport evaluate(const Vec& preds, const std::vector<int>& labels,
                    const std::vector<std::string>& segments);

} // namespace seqclick
