#pragma once

#include <stdexcept>
#include <string>

namespace seqclick {

// Broken precondition or shape contract (programming error at the call site).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Malformed input: log files, configs, checkpoints. Carries enough context
// (line numbers, key names) to fix the offending file.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf detected during training or scoring.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Metric requested on a degenerate input (e.g. AUC with one class).
class UndefinedMetricError : public DataError {
public:
    explicit UndefinedMetricError(const std::string& what) : DataError(what) {}
};

} // namespace seqclick
