#pragma once

#include <optional>
#include <string>

#include "seqclick/datamodel.hpp"
#include "seqclick/learning.hpp"
#include "seqclick/models.hpp"

namespace seqclick {

// On-disk model snapshot: human-readable header, weights written as 16-hex-
// digit IEEE-754 bit patterns so save/load round-trips bitwise.
struct Checkpoint {
    static constexpr std::uint32_t kFormatVersion = 1;

    ModelKind kind = ModelKind::Lr;
    FeatureSpec feature_spec;
    TrainConfig train_config;

    std::optional<LrParams> lr;
    std::optional<NnParams> nn;
    std::optional<RnnParams> rnn;

    std::size_t input_width() const;

    // Typed access; throws DataError when the stored kind differs.
    const LrParams& expect_lr() const;
    const NnParams& expect_nn() const;
    const RnnParams& expect_rnn() const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace seqclick
