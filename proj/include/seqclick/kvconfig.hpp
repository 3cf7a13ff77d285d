#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace seqclick {

// Plain-text key=value config files. '#' starts a comment, blank lines are
// skipped, duplicate keys are an error. Keys are tracked as they are read
// so unknown (misspelled) keys can be rejected by name.
class KvConfig {
public:
    static KvConfig from_file(const std::string& path);
    static KvConfig from_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key);
    std::string get_string(const std::string& key, const std::string& fallback);
    double get_real(const std::string& key, double fallback);
    std::int64_t get_int(const std::string& key, std::int64_t fallback);
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);

    // Comma-separated lists.
    std::vector<std::uint64_t> get_uint_list(const std::string& key,
                                             const std::vector<std::uint64_t>& fallback);
    std::vector<std::string> get_string_list(const std::string& key,
                                             const std::vector<std::string>& fallback);

    // Throws DataError naming the first key that was never requested.
    void reject_unknown_keys() const;

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::set<std::string> touched_;

    const std::string* lookup(const std::string& key);
};

} // namespace seqclick
