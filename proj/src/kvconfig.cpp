#include "seqclick/kvconfig.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seqclick/errors.hpp"

namespace seqclick {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

} // namespace

KvConfig KvConfig::from_string(const std::string& text, const std::string& origin) {
    KvConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError(origin + ":" + std::to_string(line_no) +
                            ": expected key=value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw DataError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (!cfg.values_.emplace(key, value).second) {
            throw DataError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                            "'");
        }
    }
    return cfg;
}

KvConfig KvConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

bool KvConfig::has(const std::string& key) const {
    return values_.count(key) > 0;
}

const std::string* KvConfig::lookup(const std::string& key) {
    touched_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

std::string KvConfig::get_string(const std::string& key) {
    const std::string* v = lookup(key);
    if (v == nullptr) throw DataError(origin_ + ": missing required key '" + key + "'");
    return *v;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) {
    const std::string* v = lookup(key);
    return v == nullptr ? fallback : *v;
}

double KvConfig::get_real(const std::string& key, double fallback) {
    const std::string* v = lookup(key);
    if (v == nullptr) return fallback;
    double out = 0.0;
    const char* last = v->data() + v->size();
    auto [ptr, ec] = std::from_chars(v->data(), last, out);
    if (ec != std::errc{} || ptr != last || !std::isfinite(out)) {
        throw DataError(origin_ + ": key '" + key + "': invalid real '" + *v + "'");
    }
    return out;
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) {
    const std::string* v = lookup(key);
    if (v == nullptr) return fallback;
    std::int64_t out = 0;
    const char* last = v->data() + v->size();
    auto [ptr, ec] = std::from_chars(v->data(), last, out);
    if (ec != std::errc{} || ptr != last) {
        throw DataError(origin_ + ": key '" + key + "': invalid integer '" + *v + "'");
    }
    return out;
}

std::uint64_t KvConfig::get_uint(const std::string& key, std::uint64_t fallback) {
    const std::string* v = lookup(key);
    if (v == nullptr) return fallback;
    std::uint64_t out = 0;
    const char* last = v->data() + v->size();
    auto [ptr, ec] = std::from_chars(v->data(), last, out);
    if (ec != std::errc{} || ptr != last) {
        throw DataError(origin_ + ": key '" + key + "': invalid unsigned integer '" + *v + "'");
    }
    return out;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) {
    const std::string* v = lookup(key);
    if (v == nullptr) return fallback;
    if (*v == "1" || *v == "true") return true;
    if (*v == "0" || *v == "false") return false;
    throw DataError(origin_ + ": key '" + key + "': invalid boolean '" + *v + "'");
}

std::vector<std::uint64_t> KvConfig::get_uint_list(const std::string& key,
                                                   const std::vector<std::uint64_t>& fallback) {
    const std::string* v = lookup(key);
    if (v == nullptr) return fallback;
    std::vector<std::uint64_t> out;
    for (const std::string& part : split_commas(*v)) {
        std::uint64_t value = 0;
        const char* last = part.data() + part.size();
        auto [ptr, ec] = std::from_chars(part.data(), last, value);
        if (ec != std::errc{} || ptr != last) {
            throw DataError(origin_ + ": key '" + key + "': invalid list entry '" + part + "'");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<std::string> KvConfig::get_string_list(const std::string& key,
                                                   const std::vector<std::string>& fallback) {
    const std::string* v = lookup(key);
    if (v == nullptr) return fallback;
    return split_commas(*v);
}

void KvConfig::reject_unknown_keys() const {
    for (const auto& [key, value] : values_) {
        if (touched_.count(key) == 0) {
            throw DataError(origin_ + ": unknown key '" + key + "'");
        }
    }
}

} // namespace seqclick
