#include "seqclick/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "seqclick/errors.hpp"

namespace seqclick {

namespace {

void check_aligned(std::size_t a, std::size_t b, const char* op) {
    if (a != b) {
        throw ContractViolation(std::string(op) + ": preds/labels length mismatch, " +
                                std::to_string(a) + " vs " + std::to_string(b));
    }
}

std::size_t count_positives(const std::vector<int>& labels) {
    std::size_t p = 0;
    for (int l : labels) p += l == 1 ? 1 : 0;
    return p;
}

double clamped_ce(double pred, int label) {
    const double p = std::clamp(pred, kProbClamp, 1.0 - kProbClamp);
    return label == 1 ? -std::log(p) : -std::log1p(-p);
}

double binary_entropy(double r) {
    return -r * std::log(r) - (1.0 - r) * std::log(1.0 - r);
}

} // namespace

double auc(const Vec& scores, const std::vector<int>& labels) {
    check_aligned(scores.size(), labels.size(), "auc");
    const std::size_t n = scores.size();
    const std::size_t pos = count_positives(labels);
    if (pos == 0 || pos == n) {
        throw UndefinedMetricError("auc undefined: labels contain a single class (" +
                                   std::to_string(pos) + " positives of " + std::to_string(n) +
                                   ")");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks across tie groups (Mann-Whitney with ties counted half).
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // 1-based ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[idx[k]] == 1) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(pos);
    const double neg = static_cast<double>(n - pos);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * neg);
}

double mean_log_loss(const Vec& preds, const std::vector<int>& labels) {
    check_aligned(preds.size(), labels.size(), "mean_log_loss");
    if (preds.empty()) throw ContractViolation("mean_log_loss: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) acc += clamped_ce(preds[i], labels[i]);
    return acc / static_cast<double>(preds.size());
}

double rig(const Vec& preds, const std::vector<int>& labels) {
    check_aligned(preds.size(), labels.size(), "rig");
    const std::size_t n = preds.size();
    const std::size_t pos = count_positives(labels);
    if (pos == 0 || pos == n) {
        throw UndefinedMetricError("rig undefined: labels contain a single class");
    }
    const double r = static_cast<double>(pos) / static_cast<double>(n);
    return 1.0 - mean_log_loss(preds, labels) / binary_entropy(r);
}

namespace {

MetricsResult metrics_for(const Vec& preds, const std::vector<int>& labels) {
    MetricsResult m;
    m.n_samples = preds.size();
    m.n_positives = count_positives(labels);
    m.base_rate = static_cast<double>(m.n_positives) / static_cast<double>(m.n_samples);
    m.mean_log_loss = mean_log_loss(preds, labels);
    if (m.n_positives > 0 && m.n_positives < m.n_samples) {
        m.auc = auc(preds, labels);
        m.rig = 1.0 - m.mean_log_loss / binary_entropy(m.base_rate);
    }
    return m;
}

} // namespace

EvalReport evaluate(const Vec& preds, const std::vector<int>& labels) {
    if (preds.empty()) throw ContractViolation("evaluate: empty input");
    check_aligned(preds.size(), labels.size(), "evaluate");
    EvalReport report;
    report.overall = metrics_for(preds, labels);
    return report;
}

EvalReport evaluate(const Vec& preds, const std::vector<int>& labels,
                    const std::vector<std::string>& segments) {
    check_aligned(preds.size(), segments.size(), "evaluate(segments)");
    EvalReport report = evaluate(preds, labels);

    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < segments.size(); ++i) groups[segments[i]].push_back(i);

    for (const auto& [name, indices] : groups) {
        Vec p(indices.size());
        std::vector<int> l(indices.size());
        for (std::size_t k = 0; k < indices.size(); ++k) {
            p[k] = preds[indices[k]];
            l[k] = labels[indices[k]];
        }
        report.segments.emplace_back(name, metrics_for(p, l));
    }
    return report;
}

} // namespace seqclick
