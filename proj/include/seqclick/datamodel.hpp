#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seqclick/numkernel.hpp"

namespace seqclick {

enum class PositionClass : std::uint8_t { TopFirst, Mainline, Sidebar };

char position_code(PositionClass p);                // 'T' / 'M' / 'S'
PositionClass position_from_code(char c);

// One logged ad view. dwell_seconds > 0 implies clicked; a click may still
// have zero recorded dwell.
struct ImpressionRecord {
    std::uint64_t user_id = 0;
    std::int64_t timestamp = 0;     // seconds since epoch
    std::uint64_t session_id = 0;
    PositionClass position = PositionClass::Mainline;
    std::uint32_t slot = 1;         // 0 for TopFirst, >= 1 otherwise
    std::uint64_t ad_id = 0;
    std::uint32_t query_topic = 0;
    double relevance = 0.0;         // in [0, 1]
    bool clicked = false;
    double dwell_seconds = 0.0;

    bool operator==(const ImpressionRecord& other) const = default;
};

// Time-ordered impressions of a single user; the unit all sequential
// training and inference walks over.
struct UserSequence {
    std::uint64_t user_id = 0;
    std::vector<ImpressionRecord> impressions;
};

// Feature layout. Three hashed one-hot blocks (ad id, user id, query topic)
// followed by a fixed dense block:
//   [position one-hot T/M/S (3), slot (1), relevance (1),
//    log1p time interval (1), log1p last click dwell (1),
//    quick-back-last-click flag (1), head-of-sequence flag (1)]
struct FeatureSpec {
    std::size_t hash_buckets_per_field = 64;

    static constexpr std::size_t kDenseWidth = 9;
    static constexpr double kQuickBackSeconds = 20.0;

    std::size_t width() const { return 3 * hash_buckets_per_field + kDenseWidth; }
    std::size_t bucket_of(std::uint32_t field_tag, std::uint64_t id) const;
};

// Fills `out` (resized to spec.width()) with the features of `record`.
// `predecessor` is the same user's immediately prior impression, if any.
void featurize(const FeatureSpec& spec, const ImpressionRecord& record,
               const ImpressionRecord* predecessor, Vec& out);

Vec featurize(const FeatureSpec& spec, const ImpressionRecord& record,
              const ImpressionRecord* predecessor);

// Log file I/O. UTF-8 CSV with the fixed header below; reals printed with
// six decimals; parse errors carry 1-based line numbers.
extern const char* const kLogHeader;

std::vector<ImpressionRecord> parse_log(std::istream& in);
std::vector<ImpressionRecord> parse_log_file(const std::string& path);
void write_log(const std::vector<ImpressionRecord>& records, std::ostream& out);
void write_log_file(const std::vector<ImpressionRecord>& records, const std::string& path);

// Groups records by user and orders each user's impressions by
// (timestamp, session, mainline-before-sidebar, slot); TopFirst ranks as
// mainline slot 0. Sequences come back sorted by user id.
std::vector<UserSequence> build_sequences(const std::vector<ImpressionRecord>& records);

} // namespace seqclick
