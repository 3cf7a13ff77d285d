#include "seqclick/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "seqclick/errors.hpp"
#include "seqclick/inference.hpp"
#include "seqclick/metrics.hpp"

namespace seqclick {

void TrainConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DataError("TrainConfig: alpha must be > 0");
    if (l2_lambda < 0.0 || !std::isfinite(l2_lambda))
        throw DataError("TrainConfig: l2_lambda must be >= 0");
    if (hidden_size == 0) throw DataError("TrainConfig: hidden_size must be >= 1");
    if (unfold_T == 0) throw DataError("TrainConfig: unfold_T must be >= 1");
    if (!(lr_decay_per_epoch > 0.0) || lr_decay_per_epoch > 1.0)
        throw DataError("TrainConfig: lr_decay_per_epoch must be in (0, 1]");
    if (init_scale < 0.0 || !std::isfinite(init_scale))
        throw DataError("TrainConfig: init_scale must be >= 0");
    if (clip_gradients && !(clip_norm > 0.0))
        throw DataError("TrainConfig: clip_norm must be > 0 when clipping is on");
}

BpttWindow::BpttWindow(std::size_t unfold_T) : capacity_(unfold_T), slots_(unfold_T) {
    if (unfold_T == 0) throw ContractViolation("BpttWindow: unfold_T must be >= 1");
}

void BpttWindow::push(const Vec& x, const Vec& h_prev, const Vec& h) {
    head_ = (head_ + 1) % capacity_;
    Step& s = slots_[head_];
    s.x = x;
    s.h_prev = h_prev;
    s.h = h;
    if (size_ < capacity_) ++size_;
}

void BpttWindow::set_output(double pred, int label) {
    pred_ = pred;
    label_ = label;
}

void BpttWindow::clear() {
    size_ = 0;
    head_ = 0;
}

const BpttWindow::Step& BpttWindow::step(std::size_t z) const {
    if (z >= size_) throw ContractViolation("BpttWindow::step: index past window length");
    return slots_[(head_ + capacity_ - z) % capacity_];
}

void Gradients::reset(std::size_t hidden, std::size_t input) {
    if (dU.rows() != hidden || dU.cols() != input) {
        dU = Matrix(hidden, input);
        dR = Matrix(hidden, hidden);
        dv.assign(hidden, 0.0);
        db_h.assign(hidden, 0.0);
    } else {
        dU.fill(0.0);
        dR.fill(0.0);
        dv.assign(hidden, 0.0);
        db_h.assign(hidden, 0.0);
    }
    db_o = 0.0;
}

double Gradients::squared_norm() const {
    double acc = db_o * db_o;
    for (double g : dU.data()) acc += g * g;
    for (double g : dR.data()) acc += g * g;
    for (double g : dv) acc += g * g;
    for (double g : db_h) acc += g * g;
    return acc;
}

void Gradients::scale(double s) {
    for (double& g : dU.data()) g *= s;
    for (double& g : dR.data()) g *= s;
    for (double& g : dv) g *= s;
    for (double& g : db_h) g *= s;
    db_o *= s;
}

double output_error(double pred, int label) {
    return pred - static_cast<double>(label);
}

double cross_entropy(double pred, int label) {
    if (!(pred > 0.0 && pred < 1.0)) {
        throw ContractViolation("cross_entropy: pred " + std::to_string(pred) +
                                " outside (0,1)");
    }
    return label == 1 ? -std::log(pred) : -std::log1p(-pred);
}

double mean_loss(const Vec& preds, const std::vector<int>& labels, const RnnParams& params,
                 double lambda) {
    if (preds.empty() || preds.size() != labels.size()) {
        throw ContractViolation("mean_loss: empty or mismatched inputs");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) acc += cross_entropy(preds[i], labels[i]);
    acc /= static_cast<double>(preds.size());
    if (lambda > 0.0) {
        double sq = 0.0;
        for (double w : params.U.data()) sq += w * w;
        for (double w : params.R.data()) sq += w * w;
        for (double w : params.v) sq += w * w;
        acc += 0.5 * lambda * sq;
    }
    return acc;
}

void bptt_gradients(const RnnParams& params, const BpttWindow& window, double lambda,
                    Gradients& out) {
    const std::size_t H = params.hidden_size();
    const std::size_t D = params.input_size();
    const std::size_t L = window.size();
    if (L == 0) throw ContractViolation("bptt_gradients: empty window");

    out.reset(H, D);
    const double e_o = output_error(window.pred(), window.label());

    const Vec& h_t = window.step(0).h;
    for (std::size_t i = 0; i < H; ++i) out.dv[i] = e_o * h_t[i];
    out.db_o = e_o;

    // e_h(t) = e_o v * (1 - h(t)*h(t)), then propagated back through R.
    Vec e_h(H), e_h_next(H);
    for (std::size_t i = 0; i < H; ++i) e_h[i] = e_o * params.v[i] * (1.0 - h_t[i] * h_t[i]);

    for (std::size_t z = 0; z < L; ++z) {
        const BpttWindow::Step& s = window.step(z);
        for (std::size_t i = 0; i < H; ++i) {
            const double coef = e_h[i];
            out.db_h[i] += coef;
            double* du = out.dU.row(i);
            const double* xz = s.x.data();
            for (std::size_t c = 0; c < D; ++c) du[c] += coef * xz[c];
            double* dr = out.dR.row(i);
            const double* hp = s.h_prev.data();
            for (std::size_t j = 0; j < H; ++j) dr[j] += coef * hp[j];
        }
        if (z + 1 < L) {
            // e_h(t-z-1) = e_h(t-z) R * (1 - h(t-z-1)*h(t-z-1))
            for (std::size_t j = 0; j < H; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < H; ++i) acc += e_h[i] * params.R(i, j);
                e_h_next[j] = acc * (1.0 - s.h_prev[j] * s.h_prev[j]);
            }
            e_h.swap(e_h_next);
        }
    }

    if (lambda > 0.0) {
        const std::size_t nu = H * D;
        for (std::size_t k = 0; k < nu; ++k) out.dU.data()[k] += lambda * params.U.data()[k];
        const std::size_t nr = H * H;
        for (std::size_t k = 0; k < nr; ++k) out.dR.data()[k] += lambda * params.R.data()[k];
        for (std::size_t i = 0; i < H; ++i) out.dv[i] += lambda * params.v[i];
    }
}

Gradients bptt_gradients(const RnnParams& params, const BpttWindow& window, double lambda) {
    Gradients g;
    bptt_gradients(params, window, lambda, g);
    return g;
}

void verify_window(const RnnParams& params, const BpttWindow& window) {
    const std::size_t L = window.size();
    Vec h = window.step(L - 1).h_prev;
    Vec h_next;
    for (std::size_t z = L; z-- > 0;) {
        const BpttWindow::Step& s = window.step(z);
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (s.h_prev[i] != h[i]) {
                throw ContractViolation("verify_window: stored h_prev does not chain at z=" +
                                        std::to_string(z));
            }
        }
        rnn_step_into(params, s.x, h, h_next);
        for (std::size_t i = 0; i < h_next.size(); ++i) {
            if (std::abs(h_next[i] - s.h[i]) > 1e-12) {
                throw ContractViolation(
                    "verify_window: stored state does not reproduce forward pass at z=" +
                    std::to_string(z));
            }
        }
        h = h_next;
    }
}

void sgd_step(RnnParams& params, const Gradients& grads, double alpha) {
    const std::size_t nu = params.U.data().size();
    if (grads.dU.data().size() != nu || grads.dR.data().size() != params.R.data().size() ||
        grads.dv.size() != params.v.size() || grads.db_h.size() != params.b_h.size()) {
        throw ContractViolation("sgd_step: gradient shapes do not match parameters");
    }
    for (std::size_t k = 0; k < nu; ++k) params.U.data()[k] -= alpha * grads.dU.data()[k];
    const std::size_t nr = params.R.data().size();
    for (std::size_t k = 0; k < nr; ++k) params.R.data()[k] -= alpha * grads.dR.data()[k];
    for (std::size_t i = 0; i < params.v.size(); ++i) params.v[i] -= alpha * grads.dv[i];
    for (std::size_t i = 0; i < params.b_h.size(); ++i) params.b_h[i] -= alpha * grads.db_h[i];
    params.b_o -= alpha * grads.db_o;
}

namespace {

// User visit order per epoch; depends only on the seed, so every model kind
// sees the same global example order.
std::vector<std::size_t> epoch_order(std::size_t n, Rng& shuffle_rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(shuffle_rng.next_below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

Rng shuffle_rng_for(std::uint64_t seed) {
    return Rng(mix64(seed ^ 0x534855464C45ULL)); // "SHUFLE"
}
Rng init_rng_for(std::uint64_t seed) {
    return Rng(mix64(seed ^ 0x494E4954ULL)); // "INIT"
}

void check_corpus(const std::vector<UserSequence>& sequences) {
    for (const UserSequence& seq : sequences) {
        if (!seq.impressions.empty()) return;
    }
    throw DataError("training corpus has no impressions");
}

[[noreturn]] void numeric_abort(const char* model, std::size_t epoch, std::size_t step,
                                std::uint64_t user_id) {
    throw NumericError(std::string(model) + " training diverged: non-finite prediction at epoch " +
                       std::to_string(epoch + 1) + ", step " + std::to_string(step) + ", user " +
                       std::to_string(user_id));
}

[[noreturn]] void numeric_abort_params(const char* model, std::size_t epoch) {
    throw NumericError(std::string(model) +
                       " training diverged: non-finite parameters after epoch " +
                       std::to_string(epoch + 1));
}

void emit_epoch(std::ostream* diag, const char* model, std::size_t epoch, std::size_t samples,
                double mean_loss) {
    if (diag != nullptr) {
        (*diag) << "model=" << model << " epoch=" << epoch + 1 << " samples=" << samples
                << " mean_loss=" << mean_loss << "\n";
    }
}

} // namespace

RnnTrainResult train_rnn(const TrainConfig& config, const FeatureSpec& spec,
                         const std::vector<UserSequence>& sequences, std::ostream* diag) {
    config.validate();
    check_corpus(sequences);
    const std::size_t D = spec.width();
    const std::size_t H = config.hidden_size;

    Rng init_rng = init_rng_for(config.seed);
    Rng shuffle_rng = shuffle_rng_for(config.seed);

    RnnTrainResult result;
    result.params = init_rnn(H, D, config.init_scale, init_rng);

    BpttWindow window(config.unfold_T);
    Gradients grads;
    Vec x, h, h_next;
    double alpha = config.alpha;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<std::size_t> order = epoch_order(sequences.size(), shuffle_rng);
        double loss_acc = 0.0;
        std::size_t samples = 0;
        for (const std::size_t si : order) {
            const UserSequence& seq = sequences[si];
            if (seq.impressions.empty()) continue;
            h.assign(H, 0.0);
            window.clear();
            const ImpressionRecord* prev = nullptr;
            for (const ImpressionRecord& rec : seq.impressions) {
                featurize(spec, rec, prev, x);
                const double pred = rnn_step_into(result.params, x, h, h_next);
                if (!std::isfinite(pred)) numeric_abort("rnn", epoch, samples, seq.user_id);
                const int label = rec.clicked ? 1 : 0;
                window.push(x, h, h_next);
                window.set_output(pred, label);
                bptt_gradients(result.params, window, config.l2_lambda, grads);
                if (config.clip_gradients) {
                    const double norm = std::sqrt(grads.squared_norm());
                    if (norm > config.clip_norm) grads.scale(config.clip_norm / norm);
                }
                sgd_step(result.params, grads, alpha);
                h.swap(h_next);
                loss_acc += cross_entropy(pred, label);
                ++samples;
                prev = &rec;
            }
        }
        if (!all_finite(result.params.U) || !all_finite(result.params.R) ||
            !all_finite(result.params.v) || !all_finite(result.params.b_h) ||
            !std::isfinite(result.params.b_o)) {
            numeric_abort_params("rnn", epoch);
        }
        result.loss_history.push_back(loss_acc / static_cast<double>(samples));
        emit_epoch(diag, "rnn", epoch, samples, result.loss_history.back());
        alpha *= config.lr_decay_per_epoch;
    }
    return result;
}

NnTrainResult train_nn(const TrainConfig& config, const FeatureSpec& spec,
                       const std::vector<UserSequence>& sequences, std::ostream* diag) {
    config.validate();
    check_corpus(sequences);
    const std::size_t D = spec.width();
    const std::size_t H = config.hidden_size;

    Rng init_rng = init_rng_for(config.seed);
    Rng shuffle_rng = shuffle_rng_for(config.seed);

    NnTrainResult result;
    result.params = init_nn(H, D, config.init_scale, init_rng);

    Vec x, hidden, e_a(H);
    double alpha = config.alpha;
    const double lambda = config.l2_lambda;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<std::size_t> order = epoch_order(sequences.size(), shuffle_rng);
        double loss_acc = 0.0;
        std::size_t samples = 0;
        for (const std::size_t si : order) {
            const UserSequence& seq = sequences[si];
            const ImpressionRecord* prev = nullptr;
            for (const ImpressionRecord& rec : seq.impressions) {
                featurize(spec, rec, prev, x);
                const double pred = nn_forward_hidden(result.params, x, hidden);
                if (!std::isfinite(pred)) numeric_abort("nn", epoch, samples, seq.user_id);
                const int label = rec.clicked ? 1 : 0;
                const double e_o = output_error(pred, label);
                for (std::size_t i = 0; i < H; ++i) {
                    e_a[i] = e_o * result.params.w2[i] * (1.0 - hidden[i] * hidden[i]);
                }
                // fused gradient + update, weight decay on W1 and w2 only
                for (std::size_t i = 0; i < H; ++i) {
                    result.params.w2[i] -=
                        alpha * (e_o * hidden[i] + lambda * result.params.w2[i]);
                    double* w1 = result.params.W1.row(i);
                    const double coef = e_a[i];
                    for (std::size_t c = 0; c < D; ++c) {
                        w1[c] -= alpha * (coef * x[c] + lambda * w1[c]);
                    }
                    result.params.b1[i] -= alpha * coef;
                }
                result.params.b2 -= alpha * e_o;
                loss_acc += cross_entropy(pred, label);
                ++samples;
                prev = &rec;
            }
        }
        if (!all_finite(result.params.W1) || !all_finite(result.params.w2) ||
            !all_finite(result.params.b1) || !std::isfinite(result.params.b2)) {
            numeric_abort_params("nn", epoch);
        }
        result.loss_history.push_back(loss_acc / static_cast<double>(samples));
        emit_epoch(diag, "nn", epoch, samples, result.loss_history.back());
        alpha *= config.lr_decay_per_epoch;
    }
    return result;
}

LrTrainResult train_lr(const TrainConfig& config, const FeatureSpec& spec,
                       const std::vector<UserSequence>& sequences, std::ostream* diag) {
    config.validate();
    check_corpus(sequences);
    const std::size_t D = spec.width();

    Rng init_rng = init_rng_for(config.seed);
    Rng shuffle_rng = shuffle_rng_for(config.seed);

    LrTrainResult result;
    result.params = init_lr(D, config.init_scale, init_rng);

    Vec x;
    double alpha = config.alpha;
    const double lambda = config.l2_lambda;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<std::size_t> order = epoch_order(sequences.size(), shuffle_rng);
        double loss_acc = 0.0;
        std::size_t samples = 0;
        for (const std::size_t si : order) {
            const UserSequence& seq = sequences[si];
            const ImpressionRecord* prev = nullptr;
            for (const ImpressionRecord& rec : seq.impressions) {
                featurize(spec, rec, prev, x);
                const double pred = lr_forward(result.params, x);
                if (!std::isfinite(pred)) numeric_abort("lr", epoch, samples, seq.user_id);
                const int label = rec.clicked ? 1 : 0;
                const double e_o = output_error(pred, label);
                for (std::size_t c = 0; c < D; ++c) {
                    result.params.w[c] -= alpha * (e_o * x[c] + lambda * result.params.w[c]);
                }
                result.params.b -= alpha * e_o;
                loss_acc += cross_entropy(pred, label);
                ++samples;
                prev = &rec;
            }
        }
        if (!all_finite(result.params.w) || !std::isfinite(result.params.b)) {
            numeric_abort_params("lr", epoch);
        }
        result.loss_history.push_back(loss_acc / static_cast<double>(samples));
        emit_epoch(diag, "lr", epoch, samples, result.loss_history.back());
        alpha *= config.lr_decay_per_epoch;
    }
    return result;
}

double GradCheckReport::max_rel_error() const {
    return std::max({max_rel_error_U, max_rel_error_R, max_rel_error_v, max_rel_error_b_h,
                     max_rel_error_b_o});
}

namespace {

// Loss of the truncated window: forward from the window's oldest stored
// state over the stored inputs, cross entropy at the final step, plus the
// L2 penalty. bptt_gradients is the exact gradient of this quantity.
//
// Evaluated in extended precision: the central difference divides an
// O(eps)-sized loss change by 2*eps, so plain double evaluation leaves
// ~5e-11 of cancellation noise, which swamps components whose true
// gradient is tiny (an L2-only term at a sequence head, say). A long
// double forward pass keeps the quotient meaningful at the 1e-4 tolerance.
long double window_loss(const RnnParams& params, const std::vector<Vec>& inputs,
                        const Vec& h_start, int label, double lambda) {
    const std::size_t H = params.hidden_size();
    const std::size_t D = params.input_size();
    std::vector<long double> h(h_start.begin(), h_start.end());
    std::vector<long double> h_next(H);
    long double logit = 0.0L;
    for (const Vec& x : inputs) {
        for (std::size_t i = 0; i < H; ++i) {
            long double acc = params.b_h[i];
            const double* ur = params.U.row(i);
            for (std::size_t c = 0; c < D; ++c) acc += static_cast<long double>(ur[c]) * x[c];
            const double* rr = params.R.row(i);
            for (std::size_t j = 0; j < H; ++j) acc += static_cast<long double>(rr[j]) * h[j];
            h_next[i] = std::tanh(acc);
        }
        h.swap(h_next);
        logit = params.b_o;
        for (std::size_t i = 0; i < H; ++i) logit += static_cast<long double>(params.v[i]) * h[i];
    }
    const long double pred = 1.0L / (1.0L + std::exp(-logit));
    long double loss = label == 1 ? -std::log(pred) : -std::log(1.0L - pred);
    if (lambda > 0.0) {
        long double sq = 0.0L;
        for (double w : params.U.data()) sq += static_cast<long double>(w) * w;
        for (double w : params.R.data()) sq += static_cast<long double>(w) * w;
        for (double w : params.v) sq += static_cast<long double>(w) * w;
        loss += 0.5L * lambda * sq;
    }
    return loss;
}

double rel_error(double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(1e-8, std::abs(analytic) + std::abs(fd));
}

double fd_gradient(double& param, const RnnParams& params, const std::vector<Vec>& inputs,
                   const Vec& h_start, int label, double lambda) {
    constexpr double eps = 1e-6;
    const double saved = param;
    param = saved + eps;
    const long double up = window_loss(params, inputs, h_start, label, lambda);
    param = saved - eps;
    const long double down = window_loss(params, inputs, h_start, label, lambda);
    param = saved;
    return static_cast<double>((up - down) / (2.0L * eps));
}

} // namespace

GradCheckReport gradient_check(std::size_t instances, Rng& rng) {
    static const double lambdas[] = {0.0, 1e-6, 0.1};
    GradCheckReport report;
    report.instances = instances;

    for (std::size_t inst = 0; inst < instances; ++inst) {
        const std::size_t H = 1 + rng.next_below(5);
        const std::size_t D = 1 + rng.next_below(7);
        const std::size_t T = 1 + rng.next_below(4);
        const double lambda = lambdas[inst % 3];

        RnnParams params;
        params.U = init_weights(H, D, 0.6, rng);
        params.R = init_weights(H, H, 0.6, rng);
        params.v = init_vector(H, 0.6, rng);
        params.b_h = init_vector(H, 0.3, rng);
        params.b_o = rng.uniform(-0.3, 0.3);

        // Sequence sometimes shorter than T (head truncation), sometimes
        // longer (window drops the oldest step).
        const std::size_t steps = 1 + rng.next_below(T + 2);
        BpttWindow window(T);
        Vec h = zero_state(H);
        Vec h_next;
        double pred = 0.5;
        std::vector<Vec> all_inputs;
        std::vector<Vec> all_states; // h after each step
        for (std::size_t t = 0; t < steps; ++t) {
            Vec x = init_vector(D, 1.0, rng);
            pred = rnn_step_into(params, x, h, h_next);
            window.push(x, h, h_next);
            all_inputs.push_back(std::move(x));
            all_states.push_back(h_next);
            h.swap(h_next);
        }
        const int label = static_cast<int>(rng.next_below(2));
        window.set_output(pred, label);
        verify_window(params, window);

        Gradients analytic = bptt_gradients(params, window, lambda);

        const std::size_t L = window.size();
        std::vector<Vec> inputs(all_inputs.end() - static_cast<std::ptrdiff_t>(L),
                                all_inputs.end());
        const Vec h_start =
            steps > L ? all_states[steps - L - 1] : zero_state(H);

        for (std::size_t k = 0; k < params.U.data().size(); ++k) {
            const double fd =
                fd_gradient(params.U.data()[k], params, inputs, h_start, label, lambda);
            report.max_rel_error_U =
                std::max(report.max_rel_error_U, rel_error(analytic.dU.data()[k], fd));
        }
        for (std::size_t k = 0; k < params.R.data().size(); ++k) {
            const double fd =
                fd_gradient(params.R.data()[k], params, inputs, h_start, label, lambda);
            report.max_rel_error_R =
                std::max(report.max_rel_error_R, rel_error(analytic.dR.data()[k], fd));
        }
        for (std::size_t k = 0; k < params.v.size(); ++k) {
            const double fd = fd_gradient(params.v[k], params, inputs, h_start, label, lambda);
            report.max_rel_error_v =
                std::max(report.max_rel_error_v, rel_error(analytic.dv[k], fd));
        }
        for (std::size_t k = 0; k < params.b_h.size(); ++k) {
            const double fd = fd_gradient(params.b_h[k], params, inputs, h_start, label, lambda);
            report.max_rel_error_b_h =
                std::max(report.max_rel_error_b_h, rel_error(analytic.db_h[k], fd));
        }
        const double fd_bo = fd_gradient(params.b_o, params, inputs, h_start, label, lambda);
        report.max_rel_error_b_o = std::max(report.max_rel_error_b_o, rel_error(analytic.db_o, fd_bo));
    }
    return report;
}

GridSearchResult grid_search(ModelKind kind, const std::vector<TrainConfig>& grid,
                             const FeatureSpec& spec,
                             const std::vector<UserSequence>& train_corpus,
                             const std::vector<UserSequence>& val_corpus, std::ostream* diag) {
    if (grid.empty()) throw DataError("grid_search: empty grid");

    GridSearchResult result;
    bool have_best = false;
    double best_rig = 0.0;

    for (const TrainConfig& config : grid) {
        ScoredCorpus scored;
        switch (kind) {
            case ModelKind::Rnn: {
                RnnTrainResult trained = train_rnn(config, spec, train_corpus, diag);
                scored = score_corpus_rnn(trained.params, spec, val_corpus);
                break;
            }
            case ModelKind::Nn: {
                NnTrainResult trained = train_nn(config, spec, train_corpus, diag);
                scored = score_corpus_nn(trained.params, spec, val_corpus);
                break;
            }
            case ModelKind::Lr: {
                LrTrainResult trained = train_lr(config, spec, train_corpus, diag);
                scored = score_corpus_lr(trained.params, spec, val_corpus);
                break;
            }
        }
        GridPointResult point;
        point.config = config;
        point.val_auc = auc(scored.preds, scored.labels);
        point.val_rig = rig(scored.preds, scored.labels);
        result.table.push_back(point);
        if (diag != nullptr) {
            (*diag) << "grid point " << result.table.size() << "/" << grid.size()
                    << " val_rig=" << point.val_rig << " val_auc=" << point.val_auc << "\n";
        }
        if (!have_best || point.val_rig > best_rig) {
            have_best = true;
            best_rig = point.val_rig;
            result.best = config;
        }
    }
    return result;
}

} // namespace seqclick
