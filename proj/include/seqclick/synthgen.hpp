#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "seqclick/datamodel.hpp"

namespace seqclick {

class KvConfig;

// Synthetic sponsored-search log generator. Clicks are sampled from a
// logistic model whose logit adds, on top of position and relevance terms,
// three planted sequential effects:
//   - dwell carryover: beta_d * log1p(last click dwell on this ad),
//   - quick-back forgetting: beta_q * 2^(-elapsed_hours / halflife) after a
//     quick-back click on this ad (cleared by a later satisfying click),
//   - topic familiarity: beta_t once the user has queried the topic before,
// plus optional lag terms keyed to whether the impression two / three steps
// back was a satisfying click, used to plant dependencies that only a
// deeper unfolding can learn.
struct GenConfig {
    std::size_t n_users = 5000;
    std::size_t min_impressions = 20;
    std::size_t max_impressions = 200;
    std::size_t n_ads = 300;
    std::size_t ads_per_user = 5;
    std::size_t n_topics = 40;
    double new_topic_prob = 0.12;
    std::uint64_t seed = 1;
    double horizon_days = 14.0;
    std::int64_t start_epoch = 1700000000;

    double base_bias = -2.8;
    double position_bias_top = 0.8;
    double position_bias_mainline = 0.0;
    double position_bias_sidebar = -1.2;
    double relevance_weight = 1.0;
    double dwell_carryover_weight = 0.5;  // beta_d >= 0
    double quickback_penalty = -3.5;      // beta_q <= 0
    double quickback_halflife_hours = 12.0;
    double topic_familiarity_lift = 0.3;  // beta_t >= 0
    double lag2_weight = 0.0;
    double lag3_weight = 0.0;

    // Click dwell is log-normal(dwell_mu, dwell_sigma) seconds; a fraction
    // unsat_rate of clicks draws with the mean shifted down by
    // unsat_dwell_shift, which is what produces quick-backs.
    double dwell_mu = 4.0;
    double dwell_sigma = 0.9;
    double unsat_rate = 0.45;
    double unsat_dwell_shift = 2.6;

    std::size_t max_ads_per_page = 3;
    double top_position_prob = 0.5;
    double session_end_prob = 0.3;

    void validate() const; // throws DataError
};

GenConfig gen_config_from_kv(KvConfig& kv); // rejects unknown keys
GenConfig load_gen_config(const std::string& path);

// Everything the click model conditions on, reconstructible by replaying a
// user's impressions in order. Satisfying click = clicked with dwell >= 20s.
struct LatentUserState {
    std::unordered_map<std::uint64_t, double> last_click_dwell;       // per ad, seconds
    std::unordered_map<std::uint64_t, std::int64_t> last_quickback_time; // per ad
    std::unordered_set<std::uint32_t> topics_seen;

    // recent_satisfied[k] is the flag of the impression k+1 steps back
    std::array<double, 3> recent_satisfied{0.0, 0.0, 0.0};

    // Topics of the current page are committed to topics_seen only once a
    // later page starts, so familiarity means "queried on an earlier page".
    std::int64_t staged_page_ts = -1;
    std::uint64_t staged_page_session = 0;
    std::vector<std::uint32_t> staged_topics;
};

// The exact logistic probability the sampler uses for this impression.
// Only the context fields of `rec` are read (never clicked/dwell), so the
// oracle can score logged impressions it has not yet revealed.
double true_probability(const GenConfig& config, const LatentUserState& state,
                        const ImpressionRecord& rec);

// Advances the state with a fully revealed impression, in sequence order.
void update_state(const GenConfig& config, LatentUserState& state, const ImpressionRecord& rec);

// Generates the full log, ordered by user then time. Deterministic per seed;
// users are generated from independently derived seeds.
std::vector<ImpressionRecord> generate(const GenConfig& config);

// Replays true_probability over already-built sequences: the oracle
// predictor whose log-loss lower-bounds every model on this data. The
// second form replays the full history but emits predictions only for
// impressions at or after the cutoff, so a time-split test set is scored
// with the exact latent state carried in from the earlier period.
Vec oracle_scores(const GenConfig& config, const std::vector<UserSequence>& sequences);
Vec oracle_scores(const GenConfig& config, const std::vector<UserSequence>& sequences,
                  std::int64_t since_timestamp);

} // namespace seqclick
