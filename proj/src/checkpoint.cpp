#include "seqclick/checkpoint.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "seqclick/errors.hpp"

namespace seqclick {

namespace {

std::string hex_of(double v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, std::bit_cast<std::uint64_t>(v));
    return buf;
}

double double_of_hex(const std::string& token, const std::string& path) {
    if (token.size() != 16) {
        throw DataError("checkpoint '" + path + "': bad weight token '" + token + "'");
    }
    std::uint64_t bits = 0;
    for (char c : token) {
        int digit;
        if (c >= '0' && c <= '9') digit = c - '0';
        else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
        else throw DataError("checkpoint '" + path + "': bad hex digit in '" + token + "'");
        bits = (bits << 4) | static_cast<std::uint64_t>(digit);
    }
    return std::bit_cast<double>(bits);
}

void write_block(std::ostream& out, const char* name, const double* data, std::size_t rows,
                 std::size_t cols) {
    out << "block " << name << ' ' << rows << ' ' << cols << '\n';
    const std::size_t n = rows * cols;
    for (std::size_t i = 0; i < n; ++i) {
        out << hex_of(data[i]);
        out << (((i + 1) % 8 == 0 || i + 1 == n) ? '\n' : ' ');
    }
}

class BlockReader {
public:
    BlockReader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

    void read(const char* name, double* data, std::size_t rows, std::size_t cols) {
        std::string keyword, got_name;
        std::size_t got_rows = 0, got_cols = 0;
        if (!(in_ >> keyword >> got_name >> got_rows >> got_cols) || keyword != "block") {
            throw DataError("checkpoint '" + path_ + "': expected block header for '" +
                            std::string(name) + "'");
        }
        if (got_name != name || got_rows != rows || got_cols != cols) {
            throw DataError("checkpoint '" + path_ + "': block mismatch, expected " +
                            std::string(name) + " " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", got " + got_name + " " +
                            std::to_string(got_rows) + "x" + std::to_string(got_cols));
        }
        std::string token;
        for (std::size_t i = 0; i < rows * cols; ++i) {
            if (!(in_ >> token)) {
                throw DataError("checkpoint '" + path_ + "': block '" + std::string(name) +
                                "' truncated at element " + std::to_string(i) + " of " +
                                std::to_string(rows * cols));
            }
            data[i] = double_of_hex(token, path_);
        }
    }

private:
    std::istream& in_;
    const std::string& path_;
};

} // namespace

std::size_t Checkpoint::input_width() const {
    return feature_spec.width();
}

const LrParams& Checkpoint::expect_lr() const {
    if (kind != ModelKind::Lr || !lr.has_value()) {
        throw DataError("checkpoint holds a " + model_kind_name(kind) + " model, not lr");
    }
    return *lr;
}

const NnParams& Checkpoint::expect_nn() const {
    if (kind != ModelKind::Nn || !nn.has_value()) {
        throw DataError("checkpoint holds a " + model_kind_name(kind) + " model, not nn");
    }
    return *nn;
}

const RnnParams& Checkpoint::expect_rnn() const {
    if (kind != ModelKind::Rnn || !rnn.has_value()) {
        throw DataError("checkpoint holds a " + model_kind_name(kind) + " model, not rnn");
    }
    return *rnn;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");

    const TrainConfig& tc = ckpt.train_config;
    out << "seqclick-checkpoint " << Checkpoint::kFormatVersion << '\n';
    out << "kind " << model_kind_name(ckpt.kind) << '\n';
    out << "feature_buckets " << ckpt.feature_spec.hash_buckets_per_field << '\n';
    out << "input_width " << ckpt.input_width() << '\n';
    out << "config alpha " << hex_of(tc.alpha) << '\n';
    out << "config l2_lambda " << hex_of(tc.l2_lambda) << '\n';
    out << "config epochs " << tc.epochs << '\n';
    out << "config hidden_size " << tc.hidden_size << '\n';
    out << "config unfold_T " << tc.unfold_T << '\n';
    out << "config seed " << tc.seed << '\n';
    out << "config lr_decay_per_epoch " << hex_of(tc.lr_decay_per_epoch) << '\n';
    out << "config init_scale " << hex_of(tc.init_scale) << '\n';
    out << "config clip_gradients " << (tc.clip_gradients ? 1 : 0) << '\n';
    out << "config clip_norm " << hex_of(tc.clip_norm) << '\n';

    const std::size_t D = ckpt.input_width();
    switch (ckpt.kind) {
        case ModelKind::Lr: {
            const LrParams& p = ckpt.expect_lr();
            if (p.w.size() != D) throw DataError("checkpoint: lr width inconsistent with spec");
            write_block(out, "w", p.w.data(), 1, p.w.size());
            write_block(out, "b", &p.b, 1, 1);
            break;
        }
        case ModelKind::Nn: {
            const NnParams& p = ckpt.expect_nn();
            p.check_shapes();
            if (p.W1.cols() != D) throw DataError("checkpoint: nn width inconsistent with spec");
            write_block(out, "W1", p.W1.data().data(), p.W1.rows(), p.W1.cols());
            write_block(out, "b1", p.b1.data(), 1, p.b1.size());
            write_block(out, "w2", p.w2.data(), 1, p.w2.size());
            write_block(out, "b2", &p.b2, 1, 1);
            break;
        }
        case ModelKind::Rnn: {
            const RnnParams& p = ckpt.expect_rnn();
            p.check_shapes();
            if (p.U.cols() != D) throw DataError("checkpoint: rnn width inconsistent with spec");
            write_block(out, "U", p.U.data().data(), p.U.rows(), p.U.cols());
            write_block(out, "R", p.R.data().data(), p.R.rows(), p.R.cols());
            write_block(out, "v", p.v.data(), 1, p.v.size());
            write_block(out, "b_h", p.b_h.data(), 1, p.b_h.size());
            write_block(out, "b_o", &p.b_o, 1, 1);
            break;
        }
    }
    out << "end\n";
    out.flush();
    if (!out) throw DataError("checkpoint write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");

    std::string magic;
    std::uint32_t version = 0;
    if (!(in >> magic >> version) || magic != "seqclick-checkpoint") {
        throw DataError("checkpoint '" + path + "': not a checkpoint file");
    }
    if (version != Checkpoint::kFormatVersion) {
        throw DataError("checkpoint '" + path + "': format version " + std::to_string(version) +
                        " unsupported (expected " +
                        std::to_string(Checkpoint::kFormatVersion) + ")");
    }

    Checkpoint ckpt;
    std::string keyword, value;
    if (!(in >> keyword >> value) || keyword != "kind") {
        throw DataError("checkpoint '" + path + "': missing kind");
    }
    ckpt.kind = model_kind_from_name(value);

    auto read_header_uint = [&](const char* name) -> std::uint64_t {
        std::uint64_t v = 0;
        if (!(in >> keyword >> v) || keyword != name) {
            throw DataError("checkpoint '" + path + "': missing header field '" +
                            std::string(name) + "'");
        }
        return v;
    };
    ckpt.feature_spec.hash_buckets_per_field = read_header_uint("feature_buckets");
    const std::uint64_t input_width = read_header_uint("input_width");
    if (input_width != ckpt.feature_spec.width()) {
        throw DataError("checkpoint '" + path + "': input_width " + std::to_string(input_width) +
                        " does not match feature layout width " +
                        std::to_string(ckpt.feature_spec.width()));
    }

    TrainConfig& tc = ckpt.train_config;
    auto read_config = [&](const char* name) -> std::string {
        std::string field;
        if (!(in >> keyword >> field >> value) || keyword != "config" || field != name) {
            throw DataError("checkpoint '" + path + "': missing config field '" +
                            std::string(name) + "'");
        }
        return value;
    };
    tc.alpha = double_of_hex(read_config("alpha"), path);
    tc.l2_lambda = double_of_hex(read_config("l2_lambda"), path);
    tc.epochs = std::stoull(read_config("epochs"));
    tc.hidden_size = std::stoull(read_config("hidden_size"));
    tc.unfold_T = std::stoull(read_config("unfold_T"));
    tc.seed = std::stoull(read_config("seed"));
    tc.lr_decay_per_epoch = double_of_hex(read_config("lr_decay_per_epoch"), path);
    tc.init_scale = double_of_hex(read_config("init_scale"), path);
    tc.clip_gradients = read_config("clip_gradients") == "1";
    tc.clip_norm = double_of_hex(read_config("clip_norm"), path);

    const std::size_t D = ckpt.feature_spec.width();
    const std::size_t H = tc.hidden_size;
    BlockReader reader(in, path);
    switch (ckpt.kind) {
        case ModelKind::Lr: {
            LrParams p;
            p.w.resize(D);
            reader.read("w", p.w.data(), 1, D);
            reader.read("b", &p.b, 1, 1);
            ckpt.lr = std::move(p);
            break;
        }
        case ModelKind::Nn: {
            NnParams p;
            p.W1 = Matrix(H, D);
            p.b1.resize(H);
            p.w2.resize(H);
            reader.read("W1", p.W1.data().data(), H, D);
            reader.read("b1", p.b1.data(), 1, H);
            reader.read("w2", p.w2.data(), 1, H);
            reader.read("b2", &p.b2, 1, 1);
            ckpt.nn = std::move(p);
            break;
        }
        case ModelKind::Rnn: {
            RnnParams p;
            p.U = Matrix(H, D);
            p.R = Matrix(H, H);
            p.v.resize(H);
            p.b_h.resize(H);
            reader.read("U", p.U.data().data(), H, D);
            reader.read("R", p.R.data().data(), H, H);
            reader.read("v", p.v.data(), 1, H);
            reader.read("b_h", p.b_h.data(), 1, H);
            reader.read("b_o", &p.b_o, 1, 1);
            ckpt.rnn = std::move(p);
            break;
        }
    }
    std::string tail;
    if (!(in >> tail) || tail != "end") {
        throw DataError("checkpoint '" + path + "': missing end marker (file truncated?)");
    }
    return ckpt;
}

} // namespace seqclick
