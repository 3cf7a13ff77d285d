#pragma once

#include <string>

#include "seqclick/numkernel.hpp"

namespace seqclick {

enum class ModelKind { Lr, Nn, Rnn };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name); // throws DataError

// Recurrent network weights. Row-major x W^T convention: U is HxD
// (input to hidden), R is HxH (previous hidden to hidden), v is the
// hidden-to-output row (1xH), plus hidden and output biases.
struct RnnParams {
    Matrix U;
    Matrix R;
    Vec v;
    Vec b_h;
    double b_o = 0.0;

    std::size_t hidden_size() const { return U.rows(); }
    std::size_t input_size() const { return U.cols(); }
    void check_shapes() const;
};

// One-hidden-layer tanh network sized like the RNN's hidden layer, so the
// recurrent connection is the only structural difference between the two.
struct NnParams {
    Matrix W1;
    Vec b1;
    Vec w2;
    double b2 = 0.0;

    std::size_t hidden_size() const { return W1.rows(); }
    std::size_t input_size() const { return W1.cols(); }
    void check_shapes() const;
};

struct LrParams {
    Vec w;
    double b = 0.0;

    std::size_t input_size() const { return w.size(); }
};

// Hidden state at a sequence head is the zero vector, which makes the first
// recurrent step equal a plain feedforward pass.
Vec zero_state(std::size_t hidden_size);

struct RnnStepResult {
    Vec h;
    double click_prob = 0.0;
};

// h = tanh(x U^T + h_prev R^T + b_h); click_prob = sigmoid(h . v + b_o).
RnnStepResult rnn_step(const RnnParams& p, const Vec& x, const Vec& h_prev);

// Same step writing the new hidden state into `h_out` (may not alias h_prev).
double rnn_step_into(const RnnParams& p, const Vec& x, const Vec& h_prev, Vec& h_out);

double nn_forward(const NnParams& p, const Vec& x);

// Also returns the hidden activations, which backprop needs.
double nn_forward_hidden(const NnParams& p, const Vec& x, Vec& hidden_out);

double lr_forward(const LrParams& p, const Vec& x);

RnnParams init_rnn(std::size_t hidden, std::size_t input, double scale, Rng& rng);
NnParams init_nn(std::size_t hidden, std::size_t input, double scale, Rng& rng);
LrParams init_lr(std::size_t input, double scale, Rng& rng);

} // namespace seqclick
