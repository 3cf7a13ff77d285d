#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "seqclick/datamodel.hpp"
#include "seqclick/models.hpp"
#include "seqclick/numkernel.hpp"

namespace seqclick {

struct TrainConfig {
    double alpha = 0.003;            // learning rate (paper reports none; desk-scale choice)
    double l2_lambda = 1e-6;         // paper's best L2 coefficient
    std::size_t epochs = 3;          // paper's best epoch count
    std::size_t hidden_size = 13;    // paper's best hidden layer size
    std::size_t unfold_T = 3;        // paper's best unfolding depth
    std::uint64_t seed = 1;
    double lr_decay_per_epoch = 0.5;
    double init_scale = 0.1;         // weights start uniform on [-init_scale, +init_scale]
    bool clip_gradients = false;     // off by default; vanishing, not exploding,
    double clip_norm = 5.0;          // gradients are the failure mode here

    void validate() const;           // throws DataError on out-of-range fields
};

// Ring buffer of the last <= T forward steps of one user's sequence. Entry
// z counts back from the current time t: (x(t-z), h(t-z-1), h(t-z)). The
// stored states must be exactly the forward activations of the stored
// inputs; verify_window() re-runs the forward pass to check.
class BpttWindow {
public:
    explicit BpttWindow(std::size_t unfold_T);

    struct Step {
        Vec x;
        Vec h_prev;
        Vec h;
    };

    void push(const Vec& x, const Vec& h_prev, const Vec& h);
    void set_output(double pred, int label);
    void clear();

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return size_; }
    // z = 0 is the newest step (time t).
    const Step& step(std::size_t z) const;

    double pred() const { return pred_; }
    int label() const { return label_; }

private:
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::size_t head_ = 0; // slot of the newest entry
    std::vector<Step> slots_;
    double pred_ = 0.5;
    int label_ = 0;
};

struct Gradients {
    Matrix dU;
    Matrix dR;
    Vec dv;
    Vec db_h;
    double db_o = 0.0;

    void reset(std::size_t hidden, std::size_t input);
    double squared_norm() const;
    void scale(double s);
};

// e_o(t) = y(t) - l(t): the cross-entropy gradient at the sigmoid logit.
double output_error(double pred, int label);

// -label ln(pred) - (1-label) ln(1-pred); pred must lie strictly in (0,1).
double cross_entropy(double pred, int label);

// Average cross entropy plus (lambda/2) * sum of squared weights of U, R, v
// (biases excluded).
double mean_loss(const Vec& preds, const std::vector<int>& labels,
                 const RnnParams& params, double lambda);

// Truncated-BPTT gradients of the current step's loss:
//   dv = e_o h(t), db_o = e_o,
//   e_h(t) = e_o v * (1 - h(t)*h(t)),
//   e_h(t-z-1) = e_h(t-z) R * (1 - h(t-z-1)*h(t-z-1)),
//   dU = sum_z e_h(t-z)^T x(t-z), dR = sum_z e_h(t-z)^T h(t-z-1),
//   db_h = sum_z e_h(t-z),
// with sums truncated to the window length and lambda * weight added to the
// weight gradients when lambda > 0.
void bptt_gradients(const RnnParams& params, const BpttWindow& window, double lambda,
                    Gradients& out);
Gradients bptt_gradients(const RnnParams& params, const BpttWindow& window, double lambda);

// Throws ContractViolation if the stored states do not reproduce the forward
// pass on the stored inputs (debug verification; not called in training).
void verify_window(const RnnParams& params, const BpttWindow& window);

// params -= alpha * grads, every block.
void sgd_step(RnnParams& params, const Gradients& grads, double alpha);

struct RnnTrainResult {
    RnnParams params;
    std::vector<double> loss_history; // mean training cross entropy per epoch
};
struct NnTrainResult {
    NnParams params;
    std::vector<double> loss_history;
};
struct LrTrainResult {
    LrParams params;
    std::vector<double> loss_history;
};

// Online SGD in sequence order: per epoch, users are visited in a seeded
// shuffled order, impressions within a user in time order, hidden state
// reset at each user's head. One bptt_gradients + sgd_step per impression.
// The shuffle stream depends only on config.seed, so all three trainers see
// the same global example order for a given seed.
RnnTrainResult train_rnn(const TrainConfig& config, const FeatureSpec& spec,
                         const std::vector<UserSequence>& sequences,
                         std::ostream* diag = nullptr);
NnTrainResult train_nn(const TrainConfig& config, const FeatureSpec& spec,
                       const std::vector<UserSequence>& sequences,
                       std::ostream* diag = nullptr);
LrTrainResult train_lr(const TrainConfig& config, const FeatureSpec& spec,
                       const std::vector<UserSequence>& sequences,
                       std::ostream* diag = nullptr);

struct GradCheckReport {
    double max_rel_error_U = 0.0;
    double max_rel_error_R = 0.0;
    double max_rel_error_v = 0.0;
    double max_rel_error_b_h = 0.0;
    double max_rel_error_b_o = 0.0;
    std::size_t instances = 0;

    double max_rel_error() const;
};

// Compares bptt_gradients against central finite differences (eps = 1e-6)
// of the window loss on random small instances (H <= 5, D <= 7, T <= 4,
// lambda cycling through {0, 1e-6, 0.1}), including head-truncated windows.
GradCheckReport gradient_check(std::size_t instances, Rng& rng);

struct GridPointResult {
    TrainConfig config;
    double val_auc = 0.0;
    double val_rig = 0.0;
};
struct GridSearchResult {
    TrainConfig best;
    std::vector<GridPointResult> table;
};

// Trains one model per grid point and picks the highest validation RIG;
// ties break toward the earliest grid entry.
GridSearchResult grid_search(ModelKind kind, const std::vector<TrainConfig>& grid,
                             const FeatureSpec& spec,
                             const std::vector<UserSequence>& train_corpus,
                             const std::vector<UserSequence>& val_corpus,
                             std::ostream* diag = nullptr);

} // namespace seqclick
