#include "seqclick/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "seqclick/errors.hpp"

namespace seqclick {

const char* const kLogHeader =
    "user_id,timestamp,session_id,position,slot,ad_id,query_topic,relevance,clicked,dwell_seconds";

char position_code(PositionClass p) {
    switch (p) {
        case PositionClass::TopFirst: return 'T';
        case PositionClass::Mainline: return 'M';
        case PositionClass::Sidebar: return 'S';
    }
    throw ContractViolation("position_code: bad enum value");
}

PositionClass position_from_code(char c) {
    switch (c) {
        case 'T': return PositionClass::TopFirst;
        case 'M': return PositionClass::Mainline;
        case 'S': return PositionClass::Sidebar;
        default: throw DataError(std::string("unknown position code '") + c + "'");
    }
}

std::size_t FeatureSpec::bucket_of(std::uint32_t field_tag, std::uint64_t id) const {
    // Portable hash: the splitmix64 finalizer over (tag, id).
    const std::uint64_t h = mix64(mix64(static_cast<std::uint64_t>(field_tag)) ^ id);
    return static_cast<std::size_t>(h % hash_buckets_per_field);
}

void featurize(const FeatureSpec& spec, const ImpressionRecord& record,
               const ImpressionRecord* predecessor, Vec& out) {
    const std::size_t B = spec.hash_buckets_per_field;
    out.assign(spec.width(), 0.0);

    out[spec.bucket_of(1, record.ad_id)] = 1.0;
    out[B + spec.bucket_of(2, record.user_id)] = 1.0;
    out[2 * B + spec.bucket_of(3, static_cast<std::uint64_t>(record.query_topic))] = 1.0;

    double* dense = out.data() + 3 * B;
    switch (record.position) {
        case PositionClass::TopFirst: dense[0] = 1.0; break;
        case PositionClass::Mainline: dense[1] = 1.0; break;
        case PositionClass::Sidebar: dense[2] = 1.0; break;
    }
    dense[3] = static_cast<double>(record.slot);
    dense[4] = record.relevance;

    if (predecessor == nullptr) {
        dense[8] = 1.0; // head of sequence; sequential scalars stay zero
        return;
    }
    if (predecessor->timestamp > record.timestamp) {
        throw ContractViolation("featurize: predecessor timestamp " +
                                std::to_string(predecessor->timestamp) +
                                " exceeds record timestamp " +
                                std::to_string(record.timestamp));
    }
    const double dt = static_cast<double>(record.timestamp - predecessor->timestamp);
    dense[5] = std::log1p(dt);
    dense[6] = predecessor->clicked ? std::log1p(predecessor->dwell_seconds) : 0.0;
    dense[7] = (predecessor->clicked &&
                predecessor->dwell_seconds < FeatureSpec::kQuickBackSeconds)
                   ? 1.0
                   : 0.0;
}

Vec featurize(const FeatureSpec& spec, const ImpressionRecord& record,
              const ImpressionRecord* predecessor) {
    Vec out;
    featurize(spec, record, predecessor, out);
    return out;
}

namespace {

void format_record(const ImpressionRecord& r, std::string& line) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%llu,%lld,%llu,%c,%u,%llu,%u,%.6f,%d,%.6f",
                  static_cast<unsigned long long>(r.user_id),
                  static_cast<long long>(r.timestamp),
                  static_cast<unsigned long long>(r.session_id),
                  position_code(r.position), r.slot,
                  static_cast<unsigned long long>(r.ad_id), r.query_topic,
                  r.relevance, r.clicked ? 1 : 0, r.dwell_seconds);
    line = buf;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw DataError("log parse error at line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_number(const std::string& field, std::size_t line_no, const char* name) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        parse_fail(line_no, std::string("non-numeric ") + name + " field '" + field + "'");
    }
    return value;
}

double parse_real(const std::string& field, std::size_t line_no, const char* name) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        parse_fail(line_no, std::string("non-numeric ") + name + " field '" + field + "'");
    }
    return value;
}

ImpressionRecord parse_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (fields.size() != 10) {
        parse_fail(line_no, "expected 10 fields, got " + std::to_string(fields.size()));
    }

    ImpressionRecord r;
    r.user_id = parse_number<std::uint64_t>(fields[0], line_no, "user_id");
    r.timestamp = parse_number<std::int64_t>(fields[1], line_no, "timestamp");
    r.session_id = parse_number<std::uint64_t>(fields[2], line_no, "session_id");
    if (fields[3].size() != 1) parse_fail(line_no, "position field must be one of T/M/S");
    try {
        r.position = position_from_code(fields[3][0]);
    } catch (const DataError& e) {
        parse_fail(line_no, e.what());
    }
    r.slot = parse_number<std::uint32_t>(fields[4], line_no, "slot");
    r.ad_id = parse_number<std::uint64_t>(fields[5], line_no, "ad_id");
    r.query_topic = parse_number<std::uint32_t>(fields[6], line_no, "query_topic");
    r.relevance = parse_real(fields[7], line_no, "relevance");
    const int clicked = parse_number<int>(fields[8], line_no, "clicked");
    if (clicked != 0 && clicked != 1) parse_fail(line_no, "clicked must be 0 or 1");
    r.clicked = clicked == 1;
    r.dwell_seconds = parse_real(fields[9], line_no, "dwell_seconds");

    if (r.timestamp < 0) parse_fail(line_no, "negative timestamp");
    if (r.relevance < 0.0 || r.relevance > 1.0) parse_fail(line_no, "relevance outside [0,1]");
    if (r.dwell_seconds < 0.0) parse_fail(line_no, "negative dwell_seconds");
    if (r.dwell_seconds > 0.0 && !r.clicked) {
        parse_fail(line_no, "positive dwell_seconds on an unclicked impression");
    }
    if (r.position == PositionClass::TopFirst) {
        if (r.slot != 0) parse_fail(line_no, "TopFirst impressions must have slot 0");
    } else if (r.slot < 1) {
        parse_fail(line_no, "mainline/sidebar slot must be >= 1");
    }
    return r;
}

} // namespace

std::vector<ImpressionRecord> parse_log(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("log parse error: empty input, header missing");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kLogHeader) {
        throw DataError("log parse error at line 1: header mismatch, expected '" +
                        std::string(kLogHeader) + "'");
    }
    std::vector<ImpressionRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        records.push_back(parse_line(line, line_no));
    }
    return records;
}

std::vector<ImpressionRecord> parse_log_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open log file '" + path + "'");
    return parse_log(in);
}

void write_log(const std::vector<ImpressionRecord>& records, std::ostream& out) {
    out << kLogHeader << '\n';
    std::string line;
    for (const ImpressionRecord& r : records) {
        format_record(r, line);
        out << line << '\n';
    }
    if (!out) throw DataError("log write failed (stream error)");
}

void write_log_file(const std::vector<ImpressionRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_log(records, out);
    out.flush();
    if (!out) throw DataError("log write to '" + path + "' failed");
}

namespace {

// Within a page, TopFirst acts as mainline slot 0; mainline precedes sidebar.
std::uint64_t within_page_rank(const ImpressionRecord& r) {
    const std::uint64_t side = r.position == PositionClass::Sidebar ? 1 : 0;
    const std::uint64_t slot = r.position == PositionClass::TopFirst ? 0 : r.slot;
    return (side << 32) | slot;
}

} // namespace

std::vector<UserSequence> build_sequences(const std::vector<ImpressionRecord>& records) {
    std::map<std::uint64_t, UserSequence> by_user;
    for (const ImpressionRecord& r : records) {
        UserSequence& seq = by_user[r.user_id];
        seq.user_id = r.user_id;
        seq.impressions.push_back(r);
    }
    std::vector<UserSequence> out;
    out.reserve(by_user.size());
    for (auto& [uid, seq] : by_user) {
        std::stable_sort(seq.impressions.begin(), seq.impressions.end(),
                         [](const ImpressionRecord& a, const ImpressionRecord& b) {
                             if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                             if (a.session_id != b.session_id) return a.session_id < b.session_id;
                             return within_page_rank(a) < within_page_rank(b);
                         });
        out.push_back(std::move(seq));
    }
    return out;
}

} // namespace seqclick
