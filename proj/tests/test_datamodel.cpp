#include <algorithm>
#include <cmath>
#include <sstream>

#include <doctest.h>

#include "seqclick/datamodel.hpp"
#include "seqclick/errors.hpp"

using namespace seqclick;

namespace {

ImpressionRecord make_record(std::uint64_t user, std::int64_t ts, std::uint64_t session,
                             PositionClass pos, std::uint32_t slot, std::uint64_t ad,
                             std::uint32_t topic, double rel, bool clicked, double dwell) {
    ImpressionRecord r;
    r.user_id = user;
    r.timestamp = ts;
    r.session_id = session;
    r.position = pos;
    r.slot = slot;
    r.ad_id = ad;
    r.query_topic = topic;
    r.relevance = rel;
    r.clicked = clicked;
    r.dwell_seconds = dwell;
    return r;
}

double quantize6(double v) {
    return std::round(v * 1e6) / 1e6;
}

std::vector<ImpressionRecord> random_records(Rng& rng, std::size_t n) {
    std::vector<ImpressionRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
        const int pos = static_cast<int>(rng.next_below(3));
        const bool clicked = rng.next_double() < 0.3;
        records.push_back(make_record(
            1 + rng.next_below(50), 1000000 + static_cast<std::int64_t>(rng.next_below(100000)),
            1 + rng.next_below(10), static_cast<PositionClass>(pos),
            pos == 0 ? 0 : 1 + static_cast<std::uint32_t>(rng.next_below(3)),
            1 + rng.next_below(100), static_cast<std::uint32_t>(rng.next_below(20)),
            quantize6(rng.next_double()), clicked,
            clicked ? quantize6(rng.uniform(0.0, 400.0)) : 0.0));
    }
    return records;
}

} // namespace

TEST_CASE("parse_log of a header-only file yields no records") {
    std::istringstream in(std::string(kLogHeader) + "\n");
    CHECK(parse_log(in).empty());
}

TEST_CASE("parse_log rejects a bad header") {
    std::istringstream in("user,click\n");
    CHECK_THROWS_AS(parse_log(in), DataError);
}

TEST_CASE("write_log of an empty list is a header-only file") {
    std::ostringstream out;
    write_log({}, out);
    CHECK(out.str() == std::string(kLogHeader) + "\n");
}

TEST_CASE("a one-line file round-trips bit-identically") {
    const std::vector<ImpressionRecord> records = {
        make_record(7, 1234, 1, PositionClass::Mainline, 2, 42, 5, 0.125, true, 33.5)};
    std::ostringstream out;
    write_log(records, out);
    std::istringstream in(out.str());
    CHECK(parse_log(in) == records);
}

TEST_CASE("random records survive the write/parse round trip") {
    Rng rng(31337);
    const std::vector<ImpressionRecord> records = random_records(rng, 500);
    std::ostringstream out;
    write_log(records, out);
    std::istringstream in(out.str());
    CHECK(parse_log(in) == records);
}

TEST_CASE("write_log is byte-stable across runs") {
    Rng rng(5);
    const std::vector<ImpressionRecord> records = random_records(rng, 50);
    std::ostringstream a, b;
    write_log(records, a);
    write_log(records, b);
    CHECK(a.str() == b.str());
}

TEST_CASE("parse errors carry the offending line number") {
    const std::string good =
        "7,1234,1,M,2,42,5,0.125000,1,33.500000";

    SUBCASE("field count") {
        std::istringstream in(std::string(kLogHeader) + "\n" + good + "\n7,1234,1\n");
        CHECK_THROWS_WITH_AS(parse_log(in), doctest::Contains("line 3"), DataError);
    }
    SUBCASE("non-numeric field") {
        std::istringstream in(std::string(kLogHeader) + "\n7,abc,1,M,2,42,5,0.1,1,3.0\n");
        CHECK_THROWS_WITH_AS(parse_log(in), doctest::Contains("line 2"), DataError);
    }
    SUBCASE("unknown position code") {
        std::istringstream in(std::string(kLogHeader) + "\n7,1,1,X,2,42,5,0.1,1,3.0\n");
        CHECK_THROWS_WITH_AS(parse_log(in), doctest::Contains("line 2"), DataError);
    }
    SUBCASE("dwell without click") {
        std::istringstream in(std::string(kLogHeader) + "\n7,1,1,M,2,42,5,0.1,0,3.0\n");
        CHECK_THROWS_WITH_AS(parse_log(in), doctest::Contains("line 2"), DataError);
    }
}

TEST_CASE("build_sequences of a single record is one sequence of length one") {
    const auto records = std::vector<ImpressionRecord>{
        make_record(9, 100, 1, PositionClass::TopFirst, 0, 1, 1, 0.5, false, 0.0)};
    const std::vector<UserSequence> seqs = build_sequences(records);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].user_id == 9);
    CHECK(seqs[0].impressions.size() == 1);
}

TEST_CASE("mainline precedes sidebar within the same page") {
    // Sidebar slot 1 appears first in the file, mainline slot 2 second.
    const std::vector<ImpressionRecord> records = {
        make_record(1, 100, 1, PositionClass::Sidebar, 1, 10, 1, 0.5, false, 0.0),
        make_record(1, 100, 1, PositionClass::Mainline, 2, 11, 1, 0.5, false, 0.0)};
    const std::vector<UserSequence> seqs = build_sequences(records);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].impressions[0].position == PositionClass::Mainline);
    CHECK(seqs[0].impressions[1].position == PositionClass::Sidebar);
}

TEST_CASE("top-first ranks as mainline slot zero") {
    const std::vector<ImpressionRecord> records = {
        make_record(1, 100, 1, PositionClass::Mainline, 1, 10, 1, 0.5, false, 0.0),
        make_record(1, 100, 1, PositionClass::TopFirst, 0, 11, 1, 0.5, false, 0.0)};
    const std::vector<UserSequence> seqs = build_sequences(records);
    CHECK(seqs[0].impressions[0].position == PositionClass::TopFirst);
}

TEST_CASE("a shuffled known-ordered log rebuilds the original order") {
    // canonical order: two pages for one user plus another user
    std::vector<ImpressionRecord> ordered = {
        make_record(1, 100, 1, PositionClass::TopFirst, 0, 1, 1, 0.5, false, 0.0),
        make_record(1, 100, 1, PositionClass::Mainline, 1, 2, 1, 0.5, true, 44.0),
        make_record(1, 100, 1, PositionClass::Sidebar, 1, 3, 1, 0.5, false, 0.0),
        make_record(1, 100, 1, PositionClass::Sidebar, 2, 4, 1, 0.5, false, 0.0),
        make_record(1, 900, 2, PositionClass::Mainline, 1, 2, 2, 0.5, false, 0.0),
        make_record(2, 50, 1, PositionClass::Mainline, 1, 9, 3, 0.5, false, 0.0)};

    Rng rng(17);
    std::vector<ImpressionRecord> shuffled = ordered;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
    }

    const std::vector<UserSequence> seqs = build_sequences(shuffled);
    REQUIRE(seqs.size() == 2);
    std::vector<ImpressionRecord> flat;
    for (const UserSequence& s : seqs) {
        for (const ImpressionRecord& r : s.impressions) flat.push_back(r);
    }
    CHECK(flat == ordered);
}

TEST_CASE("build_sequences output is a permutation of its input") {
    Rng rng(404);
    std::vector<ImpressionRecord> records = random_records(rng, 300);
    const std::vector<UserSequence> seqs = build_sequences(records);

    std::vector<ImpressionRecord> flat;
    for (const UserSequence& s : seqs) {
        std::int64_t last_ts = -1;
        for (const ImpressionRecord& r : s.impressions) {
            CHECK(r.user_id == s.user_id);
            CHECK(r.timestamp >= last_ts);
            last_ts = r.timestamp;
            flat.push_back(r);
        }
    }
    REQUIRE(flat.size() == records.size());
    auto key = [](const ImpressionRecord& r) {
        return std::make_tuple(r.user_id, r.timestamp, r.session_id, r.ad_id, r.slot,
                               r.clicked, r.dwell_seconds);
    };
    std::sort(records.begin(), records.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::sort(flat.begin(), flat.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    CHECK(flat == records);
}

TEST_CASE("featurize marks sequence heads") {
    const FeatureSpec spec;
    const ImpressionRecord rec =
        make_record(1, 100, 1, PositionClass::Mainline, 1, 5, 3, 0.7, false, 0.0);
    const Vec x = featurize(spec, rec, nullptr);
    REQUIRE(x.size() == spec.width());
    const std::size_t dense = 3 * spec.hash_buckets_per_field;
    CHECK(x[dense + 8] == 1.0); // head flag
    CHECK(x[dense + 5] == 0.0); // time interval
    CHECK(x[dense + 6] == 0.0); // last dwell
    CHECK(x[dense + 7] == 0.0); // quick-back flag
}

TEST_CASE("a predecessor click under 20 seconds raises the quick-back flag") {
    const FeatureSpec spec;
    const ImpressionRecord prev =
        make_record(1, 100, 1, PositionClass::Mainline, 1, 5, 3, 0.7, true, 15.0);
    const ImpressionRecord rec =
        make_record(1, 160, 1, PositionClass::Mainline, 1, 5, 3, 0.7, false, 0.0);
    const Vec x = featurize(spec, rec, &prev);
    const std::size_t dense = 3 * spec.hash_buckets_per_field;
    CHECK(x[dense + 7] == 1.0);
    CHECK(x[dense + 8] == 0.0);
    CHECK(x[dense + 5] == doctest::Approx(std::log1p(60.0)).epsilon(1e-15));
    CHECK(x[dense + 6] == doctest::Approx(std::log1p(15.0)).epsilon(1e-15));

    // satisfied click: flag stays down
    ImpressionRecord prev_long = prev;
    prev_long.dwell_seconds = 25.0;
    const Vec y = featurize(spec, rec, &prev_long);
    CHECK(y[dense + 7] == 0.0);

    // unclicked predecessor: no dwell carry
    ImpressionRecord prev_unclicked = prev;
    prev_unclicked.clicked = false;
    prev_unclicked.dwell_seconds = 0.0;
    const Vec z = featurize(spec, rec, &prev_unclicked);
    CHECK(z[dense + 6] == 0.0);
    CHECK(z[dense + 7] == 0.0);
}

TEST_CASE("hashed blocks each carry exactly one active bucket") {
    const FeatureSpec spec;
    Rng rng(777);
    const std::vector<ImpressionRecord> records = random_records(rng, 200);
    const ImpressionRecord* prev = nullptr;
    for (const ImpressionRecord& rec : records) {
        const Vec x = featurize(spec, rec, nullptr);
        double hashed_sum = 0.0;
        for (std::size_t i = 0; i < 3 * spec.hash_buckets_per_field; ++i) hashed_sum += x[i];
        CHECK(hashed_sum == 3.0);
        prev = &rec;
    }
    (void)prev;
}

TEST_CASE("featurize is pure and width is constant") {
    const FeatureSpec spec;
    Rng rng(12);
    const std::vector<ImpressionRecord> records = random_records(rng, 20);
    for (std::size_t i = 1; i < records.size(); ++i) {
        ImpressionRecord rec = records[i];
        ImpressionRecord prev = records[i - 1];
        prev.user_id = rec.user_id;
        if (prev.timestamp > rec.timestamp) std::swap(prev.timestamp, rec.timestamp);
        const Vec a = featurize(spec, rec, &prev);
        const Vec b = featurize(spec, rec, &prev);
        CHECK(a == b);
        CHECK(a.size() == spec.width());
    }
}

TEST_CASE("featurize rejects a predecessor from the future") {
    const FeatureSpec spec;
    const ImpressionRecord prev =
        make_record(1, 500, 1, PositionClass::Mainline, 1, 5, 3, 0.7, false, 0.0);
    const ImpressionRecord rec =
        make_record(1, 100, 1, PositionClass::Mainline, 1, 5, 3, 0.7, false, 0.0);
    CHECK_THROWS_AS(featurize(spec, rec, &prev), ContractViolation);
}

TEST_CASE("exactly the first featurized impression of a sequence has the head flag") {
    const FeatureSpec spec;
    Rng rng(90);
    const std::vector<UserSequence> seqs = build_sequences(random_records(rng, 120));
    const std::size_t dense = 3 * spec.hash_buckets_per_field;
    for (const UserSequence& seq : seqs) {
        const ImpressionRecord* prev = nullptr;
        for (std::size_t t = 0; t < seq.impressions.size(); ++t) {
            const Vec x = featurize(spec, seq.impressions[t], prev);
            CHECK(x[dense + 8] == (t == 0 ? 1.0 : 0.0));
            prev = &seq.impressions[t];
        }
    }
}
