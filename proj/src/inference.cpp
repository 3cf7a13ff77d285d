#include "seqclick/inference.hpp"

#include <utility>

#include "seqclick/errors.hpp"

namespace seqclick {

ScorerState::ScorerState(RnnParams params) : params_(std::move(params)) {
    params_.check_shapes();
    zero_ = zero_state(params_.hidden_size());
}

double ScorerState::score_next(std::uint64_t user_id, const Vec& x) {
    auto it = states_.find(user_id);
    const Vec& h_prev = it == states_.end() ? zero_ : it->second;
    Vec h_new;
    const double prob = rnn_step_into(params_, x, h_prev, h_new);
    states_[user_id] = std::move(h_new);
    return prob;
}

void ScorerState::reset(std::uint64_t user_id) {
    states_.erase(user_id);
}

void ScorerState::reset_all() {
    states_.clear();
}

double score_ablated(const RnnParams& params, const Vec& x) {
    Vec h;
    return rnn_step_into(params, x, zero_state(params.hidden_size()), h);
}

namespace {

template <typename ScoreFn>
ScoredCorpus score_corpus(const FeatureSpec& spec, const std::vector<UserSequence>& sequences,
                          std::size_t accumulation, ScoreFn&& score) {
    ScoredCorpus out;
    Vec x;
    for (const UserSequence& seq : sequences) {
        const ImpressionRecord* prev = nullptr;
        std::size_t t = 0;
        for (const ImpressionRecord& rec : seq.impressions) {
            featurize(spec, rec, prev, x);
            const double pred = score(seq.user_id, x);
            if (t >= accumulation) {
                out.preds.push_back(pred);
                out.labels.push_back(rec.clicked ? 1 : 0);
                out.positions.push_back(rec.position);
                out.user_ids.push_back(seq.user_id);
            }
            prev = &rec;
            ++t;
        }
    }
    return out;
}

} // namespace

ScoredCorpus score_corpus_rnn(const RnnParams& params, const FeatureSpec& spec,
                              const std::vector<UserSequence>& sequences, bool ablate_recurrent,
                              std::size_t accumulation) {
    if (ablate_recurrent) {
        return score_corpus(spec, sequences, accumulation,
                            [&params](std::uint64_t, const Vec& x) {
                                return score_ablated(params, x);
                            });
    }
    ScorerState state(params);
    return score_corpus(spec, sequences, accumulation,
                        [&state](std::uint64_t user, const Vec& x) {
                            return state.score_next(user, x);
                        });
}

ScoredCorpus score_corpus_nn(const NnParams& params, const FeatureSpec& spec,
                             const std::vector<UserSequence>& sequences,
                             std::size_t accumulation) {
    return score_corpus(spec, sequences, accumulation, [&params](std::uint64_t, const Vec& x) {
        return nn_forward(params, x);
    });
}

ScoredCorpus score_corpus_lr(const LrParams& params, const FeatureSpec& spec,
                             const std::vector<UserSequence>& sequences,
                             std::size_t accumulation) {
    return score_corpus(spec, sequences, accumulation, [&params](std::uint64_t, const Vec& x) {
        return lr_forward(params, x);
    });
}

} // namespace seqclick
