#include "seqclick/models.hpp"

#include <string>

#include "seqclick/errors.hpp"

namespace seqclick {

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Lr: return "lr";
        case ModelKind::Nn: return "nn";
        case ModelKind::Rnn: return "rnn";
    }
    throw ContractViolation("model_kind_name: bad enum value");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "lr") return ModelKind::Lr;
    if (name == "nn") return ModelKind::Nn;
    if (name == "rnn") return ModelKind::Rnn;
    throw DataError("unknown model kind '" + name + "' (expected lr, nn or rnn)");
}

void RnnParams::check_shapes() const {
    const std::size_t H = U.rows();
    if (R.rows() != H || R.cols() != H || v.size() != H || b_h.size() != H) {
        throw ContractViolation("RnnParams: inconsistent shapes, U " +
                                std::to_string(U.rows()) + "x" + std::to_string(U.cols()) +
                                ", R " + std::to_string(R.rows()) + "x" +
                                std::to_string(R.cols()) + ", v " + std::to_string(v.size()) +
                                ", b_h " + std::to_string(b_h.size()));
    }
}

void NnParams::check_shapes() const {
    const std::size_t H = W1.rows();
    if (b1.size() != H || w2.size() != H) {
        throw ContractViolation("NnParams: inconsistent shapes, W1 " +
                                std::to_string(W1.rows()) + "x" + std::to_string(W1.cols()) +
                                ", b1 " + std::to_string(b1.size()) + ", w2 " +
                                std::to_string(w2.size()));
    }
}

Vec zero_state(std::size_t hidden_size) {
    return Vec(hidden_size, 0.0);
}

double rnn_step_into(const RnnParams& p, const Vec& x, const Vec& h_prev, Vec& h_out) {
    const std::size_t H = p.U.rows();
    const std::size_t D = p.U.cols();
    if (x.size() != D || h_prev.size() != H) {
        throw ContractViolation("rnn_step: shape mismatch, x[" + std::to_string(x.size()) +
                                "] vs D=" + std::to_string(D) + ", h_prev[" +
                                std::to_string(h_prev.size()) + "] vs H=" + std::to_string(H));
    }
    h_out.resize(H);
    for (std::size_t i = 0; i < H; ++i) {
        const double* ur = p.U.row(i);
        const double* rr = p.R.row(i);
        double acc = p.b_h[i];
        for (std::size_t c = 0; c < D; ++c) acc += ur[c] * x[c];
        for (std::size_t j = 0; j < H; ++j) acc += rr[j] * h_prev[j];
        h_out[i] = tanh_scalar(acc);
    }
    return sigmoid(dot(p.v, h_out) + p.b_o);
}

RnnStepResult rnn_step(const RnnParams& p, const Vec& x, const Vec& h_prev) {
    RnnStepResult result;
    result.click_prob = rnn_step_into(p, x, h_prev, result.h);
    return result;
}

double nn_forward_hidden(const NnParams& p, const Vec& x, Vec& hidden_out) {
    const std::size_t H = p.W1.rows();
    const std::size_t D = p.W1.cols();
    if (x.size() != D) {
        throw ContractViolation("nn_forward: shape mismatch, x[" + std::to_string(x.size()) +
                                "] vs D=" + std::to_string(D));
    }
    hidden_out.resize(H);
    for (std::size_t i = 0; i < H; ++i) {
        const double* wr = p.W1.row(i);
        double acc = p.b1[i];
        for (std::size_t c = 0; c < D; ++c) acc += wr[c] * x[c];
        hidden_out[i] = tanh_scalar(acc);
    }
    return sigmoid(dot(p.w2, hidden_out) + p.b2);
}

double nn_forward(const NnParams& p, const Vec& x) {
    Vec hidden;
    return nn_forward_hidden(p, x, hidden);
}

double lr_forward(const LrParams& p, const Vec& x) {
    if (x.size() != p.w.size()) {
        throw ContractViolation("lr_forward: shape mismatch, x[" + std::to_string(x.size()) +
                                "] vs w[" + std::to_string(p.w.size()) + "]");
    }
    return sigmoid(dot(p.w, x) + p.b);
}

RnnParams init_rnn(std::size_t hidden, std::size_t input, double scale, Rng& rng) {
    RnnParams p;
    p.U = init_weights(hidden, input, scale, rng);
    p.R = init_weights(hidden, hidden, scale, rng);
    p.v = init_vector(hidden, scale, rng);
    p.b_h = Vec(hidden, 0.0);
    p.b_o = 0.0;
    return p;
}

NnParams init_nn(std::size_t hidden, std::size_t input, double scale, Rng& rng) {
    NnParams p;
    p.W1 = init_weights(hidden, input, scale, rng);
    p.b1 = Vec(hidden, 0.0);
    p.w2 = init_vector(hidden, scale, rng);
    p.b2 = 0.0;
    return p;
}

LrParams init_lr(std::size_t input, double scale, Rng& rng) {
    LrParams p;
    p.w = init_vector(input, scale, rng);
    p.b = 0.0;
    return p;
}

} // namespace seqclick
