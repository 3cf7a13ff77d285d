#include <cmath>

#include <doctest.h>

#include "seqclick/errors.hpp"
#include "seqclick/models.hpp"

using namespace seqclick;

namespace {

RnnParams random_rnn(std::size_t H, std::size_t D, Rng& rng) {
    RnnParams p;
    p.U = init_weights(H, D, 0.8, rng);
    p.R = init_weights(H, H, 0.8, rng);
    p.v = init_vector(H, 0.8, rng);
    p.b_h = init_vector(H, 0.4, rng);
    p.b_o = rng.uniform(-0.4, 0.4);
    return p;
}

// Independent scalar-loop oracle for one recurrent step.
double oracle_rnn_step(const RnnParams& p, const Vec& x, const Vec& h_prev, Vec& h_out) {
    const std::size_t H = p.U.rows();
    h_out.assign(H, 0.0);
    for (std::size_t i = 0; i < H; ++i) {
        double z = p.b_h[i];
        for (std::size_t c = 0; c < p.U.cols(); ++c) z += p.U(i, c) * x[c];
        for (std::size_t j = 0; j < H; ++j) z += p.R(i, j) * h_prev[j];
        h_out[i] = std::tanh(z);
    }
    double logit = p.b_o;
    for (std::size_t i = 0; i < H; ++i) logit += p.v[i] * h_out[i];
    return 1.0 / (1.0 + std::exp(-logit));
}

} // namespace

TEST_CASE("rnn_step with all-zero parameters predicts one half") {
    RnnParams p;
    p.U = Matrix(3, 4);
    p.R = Matrix(3, 3);
    p.v = Vec(3, 0.0);
    p.b_h = Vec(3, 0.0);
    const RnnStepResult out = rnn_step(p, {1.0, 2.0, 3.0, 4.0}, zero_state(3));
    CHECK(out.click_prob == 0.5);
    CHECK(out.h == Vec{0.0, 0.0, 0.0});
}

TEST_CASE("rnn_step from the zero state ignores the recurrent weights") {
    Rng rng(11);
    RnnParams p = random_rnn(4, 6, rng);
    const Vec x = init_vector(6, 1.0, rng);

    RnnParams no_r = p;
    no_r.R = Matrix(4, 4); // zeroed
    const RnnStepResult with_r = rnn_step(p, x, zero_state(4));
    const RnnStepResult without_r = rnn_step(no_r, x, zero_state(4));
    CHECK(with_r.click_prob == without_r.click_prob);
    CHECK(with_r.h == without_r.h);
}

TEST_CASE("rnn_step matches an independent scalar-loop oracle") {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        RnnParams p = random_rnn(3, 4, rng);
        const Vec x = init_vector(4, 1.0, rng);
        const Vec h_prev = init_vector(3, 0.9, rng);
        const RnnStepResult got = rnn_step(p, x, h_prev);
        Vec want_h;
        const double want_prob = oracle_rnn_step(p, x, h_prev, want_h);
        CHECK(got.click_prob == doctest::Approx(want_prob).epsilon(1e-14));
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(got.h[i] == doctest::Approx(want_h[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("rnn_step output ranges") {
    Rng rng(3);
    RnnParams p = random_rnn(5, 7, rng);
    // exaggerate weights to push the activations toward saturation
    for (double& w : p.U.data()) w *= 40.0;
    const Vec x = init_vector(7, 1.0, rng);
    Vec h = zero_state(5);
    for (int step = 0; step < 8; ++step) {
        const RnnStepResult out = rnn_step(p, x, h);
        CHECK(out.click_prob > 0.0);
        CHECK(out.click_prob < 1.0);
        for (double v : out.h) {
            CHECK(std::abs(v) < 1.0);
        }
        h = out.h;
    }
}

TEST_CASE("rnn_step is deterministic and leaves h_prev untouched") {
    Rng rng(4);
    const RnnParams p = random_rnn(4, 5, rng);
    const Vec x = init_vector(5, 1.0, rng);
    const Vec h_prev = init_vector(4, 0.5, rng);
    const Vec h_copy = h_prev;
    const RnnStepResult a = rnn_step(p, x, h_prev);
    const RnnStepResult b = rnn_step(p, x, h_prev);
    CHECK(a.click_prob == b.click_prob);
    CHECK(a.h == b.h);
    CHECK(h_prev == h_copy);
}

TEST_CASE("click probability increases strictly with the output bias") {
    Rng rng(5);
    RnnParams p = random_rnn(4, 5, rng);
    const Vec x = init_vector(5, 1.0, rng);
    const Vec h_prev = zero_state(4);
    double last = 0.0;
    bool first = true;
    for (double b_o : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        p.b_o = b_o;
        const double prob = rnn_step(p, x, h_prev).click_prob;
        if (!first) CHECK(prob > last);
        last = prob;
        first = false;
    }
}

TEST_CASE("rnn_step rejects mismatched shapes") {
    Rng rng(6);
    const RnnParams p = random_rnn(3, 4, rng);
    CHECK_THROWS_AS(rnn_step(p, {1.0, 2.0}, zero_state(3)), ContractViolation);
    CHECK_THROWS_AS(rnn_step(p, init_vector(4, 1.0, rng), zero_state(2)), ContractViolation);
}

TEST_CASE("nn_forward with zero parameters predicts one half") {
    NnParams p;
    p.W1 = Matrix(3, 4);
    p.b1 = Vec(3, 0.0);
    p.w2 = Vec(3, 0.0);
    CHECK(nn_forward(p, {1.0, -1.0, 2.0, 0.5}) == 0.5);
}

TEST_CASE("an NN built from RNN weights equals rnn_step from the zero state") {
    Rng rng(7);
    const RnnParams rnn = random_rnn(4, 6, rng);
    NnParams nn;
    nn.W1 = rnn.U;
    nn.b1 = rnn.b_h;
    nn.w2 = rnn.v;
    nn.b2 = rnn.b_o;
    const Vec x = init_vector(6, 1.0, rng);
    CHECK(nn_forward(nn, x) == rnn_step(rnn, x, zero_state(4)).click_prob);
}

TEST_CASE("nn_forward matches an independent scalar-loop oracle") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        NnParams p;
        p.W1 = init_weights(3, 5, 0.8, rng);
        p.b1 = init_vector(3, 0.4, rng);
        p.w2 = init_vector(3, 0.8, rng);
        p.b2 = rng.uniform(-0.4, 0.4);
        const Vec x = init_vector(5, 1.0, rng);

        double logit = p.b2;
        for (std::size_t i = 0; i < 3; ++i) {
            double z = p.b1[i];
            for (std::size_t c = 0; c < 5; ++c) z += p.W1(i, c) * x[c];
            logit += p.w2[i] * std::tanh(z);
        }
        const double want = 1.0 / (1.0 + std::exp(-logit));
        CHECK(nn_forward(p, x) == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("lr_forward with zero parameters predicts one half") {
    LrParams p;
    p.w = Vec(4, 0.0);
    CHECK(lr_forward(p, {1.0, 2.0, 3.0, 4.0}) == 0.5);
}

TEST_CASE("scaling x by c and w by 1/c leaves the LR output unchanged") {
    Rng rng(9);
    LrParams p;
    p.w = init_vector(6, 1.0, rng);
    p.b = 0.3;
    Vec x = init_vector(6, 1.0, rng);
    const double base = lr_forward(p, x);

    const double c = 4.0; // power of two: the products are exact
    LrParams scaled = p;
    for (double& w : scaled.w) w /= c;
    Vec scaled_x = x;
    for (double& v : scaled_x) v *= c;
    CHECK(lr_forward(scaled, scaled_x) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("lr_forward matches an independent scalar-loop oracle") {
    Rng rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        LrParams p;
        p.w = init_vector(7, 1.0, rng);
        p.b = rng.uniform(-1.0, 1.0);
        const Vec x = init_vector(7, 1.0, rng);
        double logit = p.b;
        for (std::size_t i = 0; i < 7; ++i) logit += p.w[i] * x[i];
        const double want = 1.0 / (1.0 + std::exp(-logit));
        CHECK(lr_forward(p, x) == doctest::Approx(want).epsilon(1e-15));
    }
}
