#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include <doctest.h>

#include "seqclick/errors.hpp"
#include "seqclick/experiments.hpp"
#include "seqclick/metrics.hpp"
#include "seqclick/synthgen.hpp"

using namespace seqclick;

namespace {

GenConfig small_config(std::uint64_t seed) {
    GenConfig c;
    c.n_users = 400;
    c.min_impressions = 20;
    c.max_impressions = 120;
    c.seed = seed;
    return c;
}

double ctr_of(const std::vector<char>& clicks) {
    double sum = 0.0;
    for (char c : clicks) sum += c;
    return sum / static_cast<double>(clicks.size());
}

// two-proportion z statistic
double z_stat(double p1, std::size_t n1, double p2, std::size_t n2) {
    const double pooled = (p1 * n1 + p2 * n2) / static_cast<double>(n1 + n2);
    const double se =
        std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    return (p1 - p2) / se;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    const std::vector<double> rx = ranks(xs);
    const std::vector<double> ry = ranks(ys);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

// The quick-back effect, measured the way the planted process defines it:
// among repeat impressions whose previous same-ad event was a CLICK, those
// following a quick-back (dwell < 20s) vs those following a satisfied
// click. Tallying 2x2 tables per (user, ad) keeps user- and ad-level
// click-rate heterogeneity out of the comparison.
struct QuickbackSplit {
    std::vector<char> after_quickback;
    std::vector<char> after_satisfied;
    std::vector<double> qb_elapsed_seconds; // aligned with after_quickback
    struct Stratum {
        double n1 = 0, x1 = 0, n0 = 0, x0 = 0;
    };
    std::vector<Stratum> strata; // one per (user, ad) with both groups
};

QuickbackSplit quickback_split(const std::vector<UserSequence>& seqs) {
    QuickbackSplit out;
    struct AdMemory {
        bool prev_was_click = false;
        bool prev_was_quickback = false;
        std::int64_t click_ts = 0;
        QuickbackSplit::Stratum stratum;
    };
    for (const UserSequence& seq : seqs) {
        std::unordered_map<std::uint64_t, AdMemory> memory;
        for (const ImpressionRecord& rec : seq.impressions) {
            AdMemory& m = memory[rec.ad_id];
            if (m.prev_was_click) {
                if (m.prev_was_quickback) {
                    out.after_quickback.push_back(rec.clicked ? 1 : 0);
                    out.qb_elapsed_seconds.push_back(
                        static_cast<double>(rec.timestamp - m.click_ts));
                    m.stratum.n1 += 1;
                    m.stratum.x1 += rec.clicked ? 1 : 0;
                } else {
                    out.after_satisfied.push_back(rec.clicked ? 1 : 0);
                    m.stratum.n0 += 1;
                    m.stratum.x0 += rec.clicked ? 1 : 0;
                }
            }
            m.prev_was_click = rec.clicked;
            m.prev_was_quickback = rec.clicked && rec.dwell_seconds < 20.0;
            if (rec.clicked) m.click_ts = rec.timestamp;
        }
        for (auto& [ad, m] : memory) {
            if (m.stratum.n1 > 0 && m.stratum.n0 > 0) out.strata.push_back(m.stratum);
        }
    }
    return out;
}

// Signed Cochran-Mantel-Haenszel statistic over the strata; positive means
// after-quickback impressions click MORE than after-satisfied ones.
double cmh_z(const QuickbackSplit& split) {
    double num = 0.0, var = 0.0;
    for (const QuickbackSplit::Stratum& s : split.strata) {
        const double n = s.n1 + s.n0;
        if (n < 2) continue;
        const double m1 = s.x1 + s.x0;          // total clicks in stratum
        const double m0 = n - m1;
        num += s.x1 - s.n1 * m1 / n;
        var += s.n1 * s.n0 * m1 * m0 / (n * n * (n - 1.0));
    }
    return num / std::sqrt(var);
}

} // namespace

TEST_CASE("generation is byte-identical for a fixed seed") {
    const GenConfig config = small_config(11);
    std::ostringstream a, b;
    write_log(generate(config), a);
    write_log(generate(config), b);
    CHECK(a.str() == b.str());
    CHECK_FALSE(a.str().empty());
}

TEST_CASE("generated logs satisfy the record invariants and round-trip") {
    const GenConfig config = small_config(12);
    const std::vector<ImpressionRecord> records = generate(config);
    for (const ImpressionRecord& r : records) {
        CHECK(r.timestamp >= 0);
        CHECK(r.relevance >= 0.0);
        CHECK(r.relevance <= 1.0);
        if (r.dwell_seconds > 0.0) CHECK(r.clicked);
        if (r.position == PositionClass::TopFirst) CHECK(r.slot == 0);
        else CHECK(r.slot >= 1);
    }
    std::ostringstream out;
    write_log(records, out);
    std::istringstream in(out.str());
    CHECK(parse_log(in) == records);
}

TEST_CASE("generator output is already in canonical sequence order") {
    const GenConfig config = small_config(13);
    const std::vector<ImpressionRecord> records = generate(config);
    const std::vector<UserSequence> seqs = build_sequences(records);
    std::vector<ImpressionRecord> flat;
    for (const UserSequence& s : seqs) {
        for (const ImpressionRecord& r : s.impressions) flat.push_back(r);
    }
    CHECK(flat == records);
}

TEST_CASE("with all planted effects off the quick-back split shows no effect") {
    GenConfig config = small_config(14);
    config.n_users = 2000;
    config.dwell_carryover_weight = 0.0;
    config.quickback_penalty = 0.0;
    config.topic_familiarity_lift = 0.0;
    const std::vector<UserSequence> seqs = build_sequences(generate(config));
    const QuickbackSplit split = quickback_split(seqs);
    REQUIRE(split.after_quickback.size() > 500);
    REQUIRE(split.after_satisfied.size() > 500);
    CHECK(std::abs(cmh_z(split)) < 2.0);
}

TEST_CASE("default config plants the quick-back forgetting curve") {
    GenConfig config;
    config.n_users = 10000; // ~1e6 impressions
    config.seed = 15;
    const std::vector<ImpressionRecord> records = generate(config);
    CHECK(records.size() > 900000);
    const std::vector<UserSequence> seqs = build_sequences(records);

    double clicks = 0;
    for (const ImpressionRecord& r : records) clicks += r.clicked ? 1 : 0;
    const double overall_ctr = clicks / static_cast<double>(records.size());

    const QuickbackSplit split = quickback_split(seqs);
    REQUIRE(split.after_quickback.size() > 5000);

    // immediately after a quick-back (within 2 hours) the CTR sits below overall
    std::vector<char> immediate;
    for (std::size_t i = 0; i < split.after_quickback.size(); ++i) {
        if (split.qb_elapsed_seconds[i] < 7200.0) immediate.push_back(split.after_quickback[i]);
    }
    REQUIRE(immediate.size() > 500);
    CHECK(ctr_of(immediate) < overall_ctr);

    // CTR recovers with elapsed time: positive rank correlation across
    // half-day bins at 95% one-sided confidence
    std::map<std::size_t, std::pair<double, double>> bins; // bin -> (clicks, n)
    for (std::size_t i = 0; i < split.after_quickback.size(); ++i) {
        const std::size_t bin = static_cast<std::size_t>(split.qb_elapsed_seconds[i] / 43200.0);
        if (bin >= 10) continue;
        bins[bin].first += split.after_quickback[i];
        bins[bin].second += 1.0;
    }
    std::vector<double> xs, ys;
    for (const auto& [bin, acc] : bins) {
        if (acc.second < 200) continue;
        xs.push_back(static_cast<double>(bin));
        ys.push_back(acc.first / acc.second);
    }
    REQUIRE(xs.size() >= 5);
    const double r = spearman(xs, ys);
    const double z = r * std::sqrt(static_cast<double>(xs.size() - 1));
    CHECK(r > 0.0);
    CHECK(z > 1.645);
}

TEST_CASE("dwell carryover plants a monotone next-click trend") {
    GenConfig config;
    config.n_users = 4000;
    config.seed = 16;
    const std::vector<UserSequence> seqs = build_sequences(generate(config));

    // consecutive same-ad pairs: bin by the prior click's dwell
    const std::vector<double> edges = {0.0, 5.0, 20.0, 60.0, 180.0, 1e18};
    std::vector<std::pair<double, double>> bins(edges.size() - 1, {0.0, 0.0});
    for (const UserSequence& seq : seqs) {
        std::unordered_map<std::uint64_t, const ImpressionRecord*> last;
        for (const ImpressionRecord& rec : seq.impressions) {
            auto it = last.find(rec.ad_id);
            if (it != last.end() && it->second->clicked) {
                const double dwell = it->second->dwell_seconds;
                for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
                    if (dwell >= edges[b] && dwell < edges[b + 1]) {
                        bins[b].first += rec.clicked ? 1.0 : 0.0;
                        bins[b].second += 1.0;
                        break;
                    }
                }
            }
            last[rec.ad_id] = &rec;
        }
    }
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < bins.size(); ++b) {
        REQUIRE(bins[b].second > 300);
        xs.push_back(static_cast<double>(b));
        ys.push_back(bins[b].first / bins[b].second);
    }
    CHECK(spearman(xs, ys) > 0.8);
    CHECK(ys.back() > ys.front());
}

TEST_CASE("topic familiarity lifts repeat-topic CTR") {
    GenConfig config;
    config.n_users = 3000;
    config.seed = 17;
    const std::vector<UserSequence> seqs = build_sequences(generate(config));

    std::vector<char> first_topic, repeat_topic;
    for (const UserSequence& seq : seqs) {
        std::unordered_map<std::uint32_t, bool> seen;
        std::int64_t page_ts = -1;
        std::uint64_t page_session = 0;
        std::vector<std::uint32_t> staged;
        for (const ImpressionRecord& rec : seq.impressions) {
            if (rec.timestamp != page_ts || rec.session_id != page_session) {
                for (std::uint32_t t : staged) seen[t] = true;
                staged.clear();
                page_ts = rec.timestamp;
                page_session = rec.session_id;
            }
            (seen.count(rec.query_topic) ? repeat_topic : first_topic)
                .push_back(rec.clicked ? 1 : 0);
            staged.push_back(rec.query_topic);
        }
    }
    REQUIRE(first_topic.size() > 1000);
    REQUIRE(repeat_topic.size() > 1000);
    const double z = z_stat(ctr_of(repeat_topic), repeat_topic.size(), ctr_of(first_topic),
                            first_topic.size());
    CHECK(z > 2.0);
}

TEST_CASE("shuffling user impressions kills the quick-back effect") {
    GenConfig config;
    config.n_users = 3000;
    config.seed = 18;
    const std::vector<UserSequence> seqs = build_sequences(generate(config));

    // strong, negative effect in the intact data (stratified by user)
    const QuickbackSplit planted = quickback_split(seqs);
    CHECK(cmh_z(planted) < -4.0);

    Rng rng(999);
    const QuickbackSplit shuffled = quickback_split(shuffle_payloads(seqs, rng));
    CHECK(std::abs(cmh_z(shuffled)) < 2.0);
}

TEST_CASE("true_probability with all weights zero is the base-rate sigmoid") {
    GenConfig config = small_config(19);
    config.position_bias_top = 0.0;
    config.position_bias_mainline = 0.0;
    config.position_bias_sidebar = 0.0;
    config.relevance_weight = 0.0;
    config.dwell_carryover_weight = 0.0;
    config.quickback_penalty = 0.0;
    config.topic_familiarity_lift = 0.0;

    const std::vector<UserSequence> seqs = build_sequences(generate(config));
    const Vec preds = oracle_scores(config, seqs);
    const double want = sigmoid(config.base_bias);
    for (double p : preds) CHECK(p == want);
}

TEST_CASE("the oracle's log-loss lower-bounds simple competitors across seeds") {
    for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
        GenConfig config = small_config(seed);
        config.n_users = 800;
        const std::vector<UserSequence> seqs = build_sequences(generate(config));

        Vec oracle = oracle_scores(config, seqs);
        std::vector<int> labels;
        for (const UserSequence& s : seqs) {
            for (const ImpressionRecord& r : s.impressions) labels.push_back(r.clicked ? 1 : 0);
        }
        const double oracle_loss = mean_log_loss(oracle, labels);

        // constant base-rate predictor
        double base = 0.0;
        for (int l : labels) base += l;
        base /= static_cast<double>(labels.size());
        CHECK(oracle_loss < mean_log_loss(Vec(labels.size(), base), labels));

        // the oracle with distorted probabilities
        Vec distorted = oracle;
        for (double& p : distorted) p = std::clamp(0.7 * p + 0.1, 1e-9, 1.0 - 1e-9);
        CHECK(oracle_loss < mean_log_loss(distorted, labels));

        // the oracle replayed under wrong effect weights
        GenConfig wrong = config;
        wrong.quickback_penalty = 0.0;
        wrong.dwell_carryover_weight = 0.0;
        CHECK(oracle_loss < mean_log_loss(oracle_scores(wrong, seqs), labels));
    }
}

TEST_CASE("oracle probabilities are calibrated against sampled clicks") {
    GenConfig config;
    config.n_users = 4000;
    config.seed = 26;
    const std::vector<UserSequence> seqs = build_sequences(generate(config));
    const Vec preds = oracle_scores(config, seqs);

    std::vector<int> labels;
    for (const UserSequence& s : seqs) {
        for (const ImpressionRecord& r : s.impressions) labels.push_back(r.clicked ? 1 : 0);
    }

    // in deciles of predicted probability, the empirical CTR must match the
    // mean prediction within 4 standard errors
    std::vector<double> pred_sum(10, 0.0), click_sum(10, 0.0), count(10, 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const std::size_t bin = std::min<std::size_t>(9, static_cast<std::size_t>(preds[i] * 10));
        pred_sum[bin] += preds[i];
        click_sum[bin] += labels[i];
        count[bin] += 1.0;
    }
    for (std::size_t b = 0; b < 10; ++b) {
        if (count[b] < 1000) continue;
        const double want = pred_sum[b] / count[b];
        const double got = click_sum[b] / count[b];
        const double se = std::sqrt(want * (1.0 - want) / count[b]);
        CHECK(std::abs(got - want) < 4.0 * se);
    }
}

TEST_CASE("config validation rejects bad fields") {
    GenConfig config = small_config(1);
    config.quickback_penalty = 0.5;
    CHECK_THROWS_AS(config.validate(), DataError);
    config = small_config(1);
    config.ads_per_user = 0;
    CHECK_THROWS_AS(config.validate(), DataError);
    config = small_config(1);
    config.unsat_rate = 1.5;
    CHECK_THROWS_AS(config.validate(), DataError);
}
