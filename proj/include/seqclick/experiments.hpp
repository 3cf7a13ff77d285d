#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "seqclick/datamodel.hpp"
#include "seqclick/learning.hpp"
#include "seqclick/synthgen.hpp"

namespace seqclick {

// Train/test split at the midpoint of the corpus time range, mirroring a
// week-on-week split: records strictly before the midpoint train, the rest
// test. Both sides come back as built sequences.
struct CorpusSplit {
    std::vector<UserSequence> train;
    std::vector<UserSequence> test;
    std::int64_t midpoint = 0;
};
CorpusSplit split_by_time(const std::vector<ImpressionRecord>& records);

// Control corpus: permutes each user's impression payloads (ad, topic,
// relevance, position, click, dwell) across that user's time slots, keeping
// timestamps and sessions in place. Destroys the planted sequential
// dependencies while preserving marginals and valid time order.
std::vector<UserSequence> shuffle_payloads(const std::vector<UserSequence>& sequences, Rng& rng);

// Flat result table; one row per (experiment, seed, model, segment, metric).
struct ResultRow {
    std::string experiment;
    std::string seed; // numeric, or "median"
    std::string model;
    std::string segment;
    std::string metric;
    double value = 0.0;
};
using ResultTable = std::vector<ResultRow>;

void write_result_table(const ResultTable& table, std::ostream& out);

double median(std::vector<double> values);

// Pulls one value out of a table; throws DataError when absent.
double table_value(const ResultTable& table, const std::string& seed, const std::string& model,
                   const std::string& segment, const std::string& metric);

struct TrainFileConfig {
    TrainConfig train;
    FeatureSpec features;
};
TrainFileConfig load_train_config(const std::string& path);

struct ExperimentSpec {
    std::string kind; // overall | positions | ablation | history | unfold-sweep
    std::string gen_config_path;    // generate a corpus per seed ...
    std::string corpus_path;        // ... or reuse one fixed log file
    std::string train_config_path;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> models = {"lr", "nn", "rnn"};
    std::vector<std::size_t> accumulation_thresholds = {0, 10, 40};
    std::size_t unfold_min = 1;
    std::size_t unfold_max = 6;
    bool include_oracle = false;
    bool shuffle = false; // run on the payload-shuffled control corpora
};
ExperimentSpec load_experiment_spec(const std::string& path);

// Runs one experiment over all its seeds and appends per-seed rows plus
// seed="median" rows for every (model, segment, metric).
ResultTable run_experiment(const ExperimentSpec& spec, std::ostream* diag = nullptr);

} // namespace seqclick
