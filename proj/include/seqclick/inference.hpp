#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "seqclick/datamodel.hpp"
#include "seqclick/models.hpp"

namespace seqclick {

// Stateful sequential scorer: one stored hidden state per user, overwritten
// after every scored impression. Users never seen before start from the
// zero state, matching the training-time head-of-sequence convention.
// Scoring within one user is strictly sequential; concurrent callers must
// not issue two in-flight calls for the same user key.
class ScorerState {
public:
    explicit ScorerState(RnnParams params);

    double score_next(std::uint64_t user_id, const Vec& x);

    void reset(std::uint64_t user_id);
    void reset_all();
    std::size_t tracked_users() const { return states_.size(); }

    const RnnParams& params() const { return params_; }

private:
    RnnParams params_;
    std::unordered_map<std::uint64_t, Vec> states_;
    Vec zero_; // canonical start state for users not in the store
};

// Scores with the hidden state forced to zero; no state is stored. This is
// the recurrent-state ablation: the trained RNN run as a feedforward net.
double score_ablated(const RnnParams& params, const Vec& x);

// Predictions for a whole corpus, walked sequence by sequence in order.
// The first `accumulation` impressions of each sequence are still scored
// (they update the hidden state) but excluded from the output.
struct ScoredCorpus {
    Vec preds;
    std::vector<int> labels;
    std::vector<PositionClass> positions;
    std::vector<std::uint64_t> user_ids;
};

ScoredCorpus score_corpus_rnn(const RnnParams& params, const FeatureSpec& spec,
                              const std::vector<UserSequence>& sequences,
                              bool ablate_recurrent = false, std::size_t accumulation = 0);
ScoredCorpus score_corpus_nn(const NnParams& params, const FeatureSpec& spec,
                             const std::vector<UserSequence>& sequences,
                             std::size_t accumulation = 0);
ScoredCorpus score_corpus_lr(const LrParams& params, const FeatureSpec& spec,
                             const std::vector<UserSequence>& sequences,
                             std::size_t accumulation = 0);

} // namespace seqclick
