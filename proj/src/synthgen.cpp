#include "seqclick/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqclick/errors.hpp"
#include "seqclick/kvconfig.hpp"
#include "seqclick/numkernel.hpp"

namespace seqclick {

namespace {

constexpr double kQuickBackSeconds = 20.0;
constexpr double kLn2 = 0.6931471805599453;

// Quantize to six decimals so the written log (%.6f) parses back to the
// exact same doubles.
double quantize6(double v) {
    return std::round(v * 1e6) / 1e6;
}

} // namespace

void GenConfig::validate() const {
    if (n_users == 0) throw DataError("GenConfig: n_users must be positive");
    if (min_impressions == 0 || max_impressions < min_impressions) {
        throw DataError("GenConfig: impressions range invalid");
    }
    if (n_ads == 0 || n_topics == 0) throw DataError("GenConfig: n_ads/n_topics must be positive");
    if (ads_per_user == 0 || ads_per_user > n_ads) {
        throw DataError("GenConfig: ads_per_user must be in [1, n_ads]");
    }
    if (new_topic_prob < 0.0 || new_topic_prob > 1.0) {
        throw DataError("GenConfig: new_topic_prob outside [0,1]");
    }
    if (!(horizon_days * 86400.0 > 7200.0)) {
        throw DataError("GenConfig: horizon_days must cover at least two hours");
    }
    if (start_epoch < 0) throw DataError("GenConfig: start_epoch must be non-negative");
    if (dwell_carryover_weight < 0.0) throw DataError("GenConfig: dwell_carryover_weight must be >= 0");
    if (quickback_penalty > 0.0) throw DataError("GenConfig: quickback_penalty must be <= 0");
    if (!(quickback_halflife_hours > 0.0)) {
        throw DataError("GenConfig: quickback_halflife_hours must be positive");
    }
    if (topic_familiarity_lift < 0.0) throw DataError("GenConfig: topic_familiarity_lift must be >= 0");
    if (!(dwell_sigma > 0.0)) throw DataError("GenConfig: dwell_sigma must be positive");
    if (unsat_rate < 0.0 || unsat_rate > 1.0) throw DataError("GenConfig: unsat_rate outside [0,1]");
    if (max_ads_per_page == 0 || max_ads_per_page > ads_per_user) {
        throw DataError("GenConfig: max_ads_per_page must be in [1, ads_per_user]");
    }
    if (top_position_prob < 0.0 || top_position_prob > 1.0) {
        throw DataError("GenConfig: top_position_prob outside [0,1]");
    }
    if (session_end_prob <= 0.0 || session_end_prob > 1.0) {
        throw DataError("GenConfig: session_end_prob must be in (0,1]");
    }
}

GenConfig gen_config_from_kv(KvConfig& kv) {
    GenConfig c;
    c.n_users = kv.get_uint("n_users", c.n_users);
    c.min_impressions = kv.get_uint("min_impressions", c.min_impressions);
    c.max_impressions = kv.get_uint("max_impressions", c.max_impressions);
    c.n_ads = kv.get_uint("n_ads", c.n_ads);
    c.ads_per_user = kv.get_uint("ads_per_user", c.ads_per_user);
    c.n_topics = kv.get_uint("n_topics", c.n_topics);
    c.new_topic_prob = kv.get_real("new_topic_prob", c.new_topic_prob);
    c.seed = kv.get_uint("seed", c.seed);
    c.horizon_days = kv.get_real("horizon_days", c.horizon_days);
    c.start_epoch = kv.get_int("start_epoch", c.start_epoch);
    c.base_bias = kv.get_real("base_bias", c.base_bias);
    c.position_bias_top = kv.get_real("position_bias_top", c.position_bias_top);
    c.position_bias_mainline = kv.get_real("position_bias_mainline", c.position_bias_mainline);
    c.position_bias_sidebar = kv.get_real("position_bias_sidebar", c.position_bias_sidebar);
    c.relevance_weight = kv.get_real("relevance_weight", c.relevance_weight);
    c.dwell_carryover_weight = kv.get_real("dwell_carryover_weight", c.dwell_carryover_weight);
    c.quickback_penalty = kv.get_real("quickback_penalty", c.quickback_penalty);
    c.quickback_halflife_hours =
        kv.get_real("quickback_halflife_hours", c.quickback_halflife_hours);
    c.topic_familiarity_lift = kv.get_real("topic_familiarity_lift", c.topic_familiarity_lift);
    c.lag2_weight = kv.get_real("lag2_weight", c.lag2_weight);
    c.lag3_weight = kv.get_real("lag3_weight", c.lag3_weight);
    c.dwell_mu = kv.get_real("dwell_mu", c.dwell_mu);
    c.dwell_sigma = kv.get_real("dwell_sigma", c.dwell_sigma);
    c.unsat_rate = kv.get_real("unsat_rate", c.unsat_rate);
    c.unsat_dwell_shift = kv.get_real("unsat_dwell_shift", c.unsat_dwell_shift);
    c.max_ads_per_page = kv.get_uint("max_ads_per_page", c.max_ads_per_page);
    c.top_position_prob = kv.get_real("top_position_prob", c.top_position_prob);
    c.session_end_prob = kv.get_real("session_end_prob", c.session_end_prob);
    kv.reject_unknown_keys();
    c.validate();
    return c;
}

GenConfig load_gen_config(const std::string& path) {
    KvConfig kv = KvConfig::from_file(path);
    return gen_config_from_kv(kv);
}

double true_probability(const GenConfig& config, const LatentUserState& state,
                        const ImpressionRecord& rec) {
    double logit = config.base_bias;
    switch (rec.position) {
        case PositionClass::TopFirst: logit += config.position_bias_top; break;
        case PositionClass::Mainline: logit += config.position_bias_mainline; break;
        case PositionClass::Sidebar: logit += config.position_bias_sidebar; break;
    }
    logit += config.relevance_weight * rec.relevance;

    auto dwell_it = state.last_click_dwell.find(rec.ad_id);
    if (dwell_it != state.last_click_dwell.end()) {
        logit += config.dwell_carryover_weight * std::log1p(dwell_it->second);
    }
    auto qb_it = state.last_quickback_time.find(rec.ad_id);
    if (qb_it != state.last_quickback_time.end()) {
        const double hours = static_cast<double>(rec.timestamp - qb_it->second) / 3600.0;
        logit += config.quickback_penalty *
                 std::exp(-kLn2 * hours / config.quickback_halflife_hours);
    }
    if (state.topics_seen.count(rec.query_topic) > 0) {
        logit += config.topic_familiarity_lift;
    }
    logit += config.lag2_weight * state.recent_satisfied[1];
    logit += config.lag3_weight * state.recent_satisfied[2];
    return sigmoid(logit);
}

void update_state(const GenConfig& config, LatentUserState& state, const ImpressionRecord& rec) {
    (void)config;
    if (rec.timestamp != state.staged_page_ts || rec.session_id != state.staged_page_session) {
        for (std::uint32_t t : state.staged_topics) state.topics_seen.insert(t);
        state.staged_topics.clear();
        state.staged_page_ts = rec.timestamp;
        state.staged_page_session = rec.session_id;
    }
    state.staged_topics.push_back(rec.query_topic);

    if (rec.clicked) {
        state.last_click_dwell[rec.ad_id] = rec.dwell_seconds;
        if (rec.dwell_seconds < kQuickBackSeconds) {
            state.last_quickback_time[rec.ad_id] = rec.timestamp;
        } else {
            state.last_quickback_time.erase(rec.ad_id);
        }
    }

    state.recent_satisfied[2] = state.recent_satisfied[1];
    state.recent_satisfied[1] = state.recent_satisfied[0];
    state.recent_satisfied[0] =
        (rec.clicked && rec.dwell_seconds >= kQuickBackSeconds) ? 1.0 : 0.0;
}

namespace {

struct PageSlotAssigner {
    std::size_t mainline_used = 0;
    std::size_t sidebar_used = 0;

    void assign(ImpressionRecord& rec, bool first, bool use_top) {
        if (first && use_top) {
            rec.position = PositionClass::TopFirst;
            rec.slot = 0;
        } else if (mainline_used < 2) {
            rec.position = PositionClass::Mainline;
            rec.slot = static_cast<std::uint32_t>(++mainline_used);
        } else {
            rec.position = PositionClass::Sidebar;
            rec.slot = static_cast<std::uint32_t>(++sidebar_used);
        }
    }
};

void generate_user(const GenConfig& config, std::uint64_t user_id, Rng& rng,
                   std::vector<ImpressionRecord>& out) {
    const std::size_t n_impressions =
        config.min_impressions +
        rng.next_below(config.max_impressions - config.min_impressions + 1);

    // Per-user ad pool: repeated exposure to a small set of ads is what
    // makes the per-ad memory effects observable.
    std::vector<std::uint64_t> ad_pool;
    while (ad_pool.size() < config.ads_per_user) {
        const std::uint64_t ad = 1 + rng.next_below(config.n_ads);
        if (std::find(ad_pool.begin(), ad_pool.end(), ad) == ad_pool.end()) {
            ad_pool.push_back(ad);
        }
    }
    std::vector<std::uint32_t> topic_history;

    // Sessions sit at sorted uniform times over the horizon, so every user's
    // activity covers the whole time range and a midpoint split leaves data
    // on both sides. Pages inside a session run seconds-to-minutes apart.
    const double horizon_seconds = config.horizon_days * 86400.0;
    const double expected_pages =
        static_cast<double>(n_impressions) /
        (0.5 * (1.0 + static_cast<double>(config.max_ads_per_page)));
    const std::size_t n_sessions = std::max<std::size_t>(
        1, static_cast<std::size_t>(expected_pages * config.session_end_prob + 0.5));
    std::vector<double> session_starts(n_sessions);
    for (double& s : session_starts) s = rng.uniform(0.0, horizon_seconds - 3600.0);
    std::sort(session_starts.begin(), session_starts.end());

    std::size_t session_index = 0;
    std::int64_t t = config.start_epoch + static_cast<std::int64_t>(session_starts[0]);
    std::uint64_t session = 1;

    LatentUserState state;
    std::size_t emitted = 0;
    std::vector<std::size_t> pick; // scratch for per-page ad selection

    while (emitted < n_impressions) {
        // whole pages, drawn identically across the sequence; the budget may
        // overshoot by at most a page so page composition stays stationary
        const std::size_t page_size = 1 + rng.next_below(config.max_ads_per_page);

        // distinct ads for this page
        pick.resize(ad_pool.size());
        for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
        for (std::size_t i = 0; i < page_size; ++i) {
            const std::size_t j = i + rng.next_below(pick.size() - i);
            std::swap(pick[i], pick[j]);
        }

        // page topic: occasionally a fresh draw, else a revisit
        std::uint32_t topic;
        if (topic_history.empty() || rng.next_double() < config.new_topic_prob) {
            topic = static_cast<std::uint32_t>(1 + rng.next_below(config.n_topics));
            if (std::find(topic_history.begin(), topic_history.end(), topic) ==
                topic_history.end()) {
                topic_history.push_back(topic);
            }
        } else {
            topic = topic_history[rng.next_below(topic_history.size())];
        }

        const bool use_top = rng.next_double() < config.top_position_prob;
        PageSlotAssigner slots;
        for (std::size_t i = 0; i < page_size; ++i) {
            ImpressionRecord rec;
            rec.user_id = user_id;
            rec.timestamp = t;
            rec.session_id = session;
            rec.ad_id = ad_pool[pick[i]];
            rec.query_topic = topic;
            rec.relevance = static_cast<double>(rng.next_below(1000001)) / 1e6;
            slots.assign(rec, i == 0, use_top);

            const double p = true_probability(config, state, rec);
            rec.clicked = rng.next_double() < p;
            if (rec.clicked) {
                const double shift =
                    rng.next_double() < config.unsat_rate ? config.unsat_dwell_shift : 0.0;
                const double dwell =
                    std::exp(config.dwell_mu - shift + config.dwell_sigma * rng.next_gaussian());
                rec.dwell_seconds = quantize6(dwell);
            }
            update_state(config, state, rec);
            out.push_back(rec);
            ++emitted;
        }

        const bool last_session = session_index + 1 >= n_sessions;
        if (!last_session && rng.next_double() < config.session_end_prob) {
            ++session_index;
            ++session;
            const std::int64_t next_start =
                config.start_epoch + static_cast<std::int64_t>(session_starts[session_index]);
            t = std::max(next_start, t + 3600); // sessions never overlap
        } else {
            t += static_cast<std::int64_t>(rng.uniform(20.0, 300.0));
        }
    }
}

} // namespace

std::vector<ImpressionRecord> generate(const GenConfig& config) {
    config.validate();
    std::vector<ImpressionRecord> out;
    out.reserve(config.n_users * (config.min_impressions + config.max_impressions) / 2);
    for (std::uint64_t u = 1; u <= config.n_users; ++u) {
        Rng rng(mix64(mix64(config.seed) ^ u));
        generate_user(config, u, rng, out);
    }
    return out;
}

Vec oracle_scores(const GenConfig& config, const std::vector<UserSequence>& sequences) {
    return oracle_scores(config, sequences, std::numeric_limits<std::int64_t>::min());
}

Vec oracle_scores(const GenConfig& config, const std::vector<UserSequence>& sequences,
                  std::int64_t since_timestamp) {
    Vec preds;
    for (const UserSequence& seq : sequences) {
        LatentUserState state;
        for (const ImpressionRecord& rec : seq.impressions) {
            if (rec.timestamp >= since_timestamp) {
                preds.push_back(true_probability(config, state, rec));
            }
            update_state(config, state, rec);
        }
    }
    return preds;
}

} // namespace seqclick
