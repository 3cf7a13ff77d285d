#include "seqclick/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "seqclick/errors.hpp"
#include "seqclick/inference.hpp"
#include "seqclick/kvconfig.hpp"
#include "seqclick/metrics.hpp"

namespace seqclick {

CorpusSplit split_by_time(const std::vector<ImpressionRecord>& records) {
    if (records.empty()) throw DataError("split_by_time: empty corpus");
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const ImpressionRecord& r : records) {
        lo = std::min(lo, r.timestamp);
        hi = std::max(hi, r.timestamp);
    }
    CorpusSplit split;
    split.midpoint = lo + (hi - lo) / 2;
    std::vector<ImpressionRecord> train_records, test_records;
    for (const ImpressionRecord& r : records) {
        (r.timestamp < split.midpoint ? train_records : test_records).push_back(r);
    }
    split.train = build_sequences(train_records);
    split.test = build_sequences(test_records);
    return split;
}

std::vector<UserSequence> shuffle_payloads(const std::vector<UserSequence>& sequences, Rng& rng) {
    std::vector<UserSequence> out = sequences;
    for (std::size_t s = 0; s < out.size(); ++s) {
        const std::vector<ImpressionRecord>& original = sequences[s].impressions;
        const std::size_t n = original.size();
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.next_below(i)]);
        }
        std::vector<ImpressionRecord> shuffled(n);
        for (std::size_t i = 0; i < n; ++i) {
            shuffled[i] = original[perm[i]];        // payload moves
            shuffled[i].user_id = original[i].user_id;
            shuffled[i].timestamp = original[i].timestamp; // timeline stays
            shuffled[i].session_id = original[i].session_id;
        }
        out[s].impressions = std::move(shuffled);
    }
    return out;
}

void write_result_table(const ResultTable& table, std::ostream& out) {
    out << "experiment\tseed\tmodel\tsegment\tmetric\tvalue\n";
    char buf[32];
    for (const ResultRow& row : table) {
        std::snprintf(buf, sizeof(buf), "%.6f", row.value);
        out << row.experiment << '\t' << row.seed << '\t' << row.model << '\t' << row.segment
            << '\t' << row.metric << '\t' << buf << '\n';
    }
}

double median(std::vector<double> values) {
    if (values.empty()) throw ContractViolation("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double table_value(const ResultTable& table, const std::string& seed, const std::string& model,
                   const std::string& segment, const std::string& metric) {
    for (const ResultRow& row : table) {
        if (row.seed == seed && row.model == model && row.segment == segment &&
            row.metric == metric) {
            return row.value;
        }
    }
    throw DataError("result table has no row (" + seed + ", " + model + ", " + segment + ", " +
                    metric + ")");
}

TrainFileConfig load_train_config(const std::string& path) {
    KvConfig kv = KvConfig::from_file(path);
    TrainFileConfig out;
    out.train.alpha = kv.get_real("alpha", out.train.alpha);
    out.train.l2_lambda = kv.get_real("l2_lambda", out.train.l2_lambda);
    out.train.epochs = kv.get_uint("epochs", out.train.epochs);
    out.train.hidden_size = kv.get_uint("hidden_size", out.train.hidden_size);
    out.train.unfold_T = kv.get_uint("unfold_T", out.train.unfold_T);
    out.train.seed = kv.get_uint("seed", out.train.seed);
    out.train.lr_decay_per_epoch = kv.get_real("lr_decay_per_epoch", out.train.lr_decay_per_epoch);
    out.train.init_scale = kv.get_real("init_scale", out.train.init_scale);
    out.train.clip_gradients = kv.get_bool("clip_gradients", out.train.clip_gradients);
    out.train.clip_norm = kv.get_real("clip_norm", out.train.clip_norm);
    out.features.hash_buckets_per_field =
        kv.get_uint("feature_buckets", out.features.hash_buckets_per_field);
    kv.reject_unknown_keys();
    out.train.validate();
    if (out.features.hash_buckets_per_field == 0) {
        throw DataError(path + ": feature_buckets must be positive");
    }
    return out;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    KvConfig kv = KvConfig::from_file(path);
    ExperimentSpec spec;
    spec.kind = kv.get_string("kind");
    spec.gen_config_path = kv.get_string("gen_config", "");
    spec.corpus_path = kv.get_string("corpus", "");
    spec.train_config_path = kv.get_string("train_config", "");
    spec.seeds = kv.get_uint_list("seeds", {});
    spec.models = kv.get_string_list("models", spec.models);
    const std::vector<std::uint64_t> thresholds =
        kv.get_uint_list("thresholds", {0, 10, 40});
    spec.accumulation_thresholds.assign(thresholds.begin(), thresholds.end());
    spec.unfold_min = kv.get_uint("unfold_min", spec.unfold_min);
    spec.unfold_max = kv.get_uint("unfold_max", spec.unfold_max);
    spec.include_oracle = kv.get_bool("oracle", spec.include_oracle);
    spec.shuffle = kv.get_bool("shuffle", spec.shuffle);
    kv.reject_unknown_keys();

    static const std::set<std::string> kinds = {"overall", "positions", "ablation", "history",
                                                "unfold-sweep"};
    if (kinds.count(spec.kind) == 0) {
        throw DataError(path + ": unknown experiment kind '" + spec.kind + "'");
    }
    if (spec.seeds.empty()) throw DataError(path + ": seeds must be non-empty");
    if (spec.gen_config_path.empty() == spec.corpus_path.empty()) {
        throw DataError(path + ": exactly one of gen_config or corpus must be set");
    }
    if (spec.train_config_path.empty()) throw DataError(path + ": train_config is required");
    for (const std::string& m : spec.models) model_kind_from_name(m); // validates
    if (spec.kind == "unfold-sweep" &&
        (spec.unfold_min == 0 || spec.unfold_max < spec.unfold_min)) {
        throw DataError(path + ": invalid unfold range");
    }
    return spec;
}

namespace {

std::string segment_name(PositionClass p) {
    switch (p) {
        case PositionClass::TopFirst: return "top";
        case PositionClass::Mainline: return "mainline";
        case PositionClass::Sidebar: return "sidebar";
    }
    return "?";
}

void append_metrics(ResultTable& table, const std::string& experiment, const std::string& seed,
                    const std::string& model, const std::string& segment,
                    const MetricsResult& m) {
    if (m.auc.has_value()) {
        table.push_back({experiment, seed, model, segment, "auc", *m.auc});
    }
    if (m.rig.has_value()) {
        table.push_back({experiment, seed, model, segment, "rig", *m.rig});
    }
    table.push_back({experiment, seed, model, segment, "log_loss", m.mean_log_loss});
    table.push_back({experiment, seed, model, segment, "n", static_cast<double>(m.n_samples)});
    table.push_back({experiment, seed, model, segment, "ctr", m.base_rate});
}

void append_scored(ResultTable& table, const std::string& experiment, const std::string& seed,
                   const std::string& model, const ScoredCorpus& scored, bool by_position) {
    if (by_position) {
        std::vector<std::string> segs(scored.positions.size());
        for (std::size_t i = 0; i < segs.size(); ++i) segs[i] = segment_name(scored.positions[i]);
        const EvalReport report = evaluate(scored.preds, scored.labels, segs);
        append_metrics(table, experiment, seed, model, "overall", report.overall);
        for (const auto& [name, m] : report.segments) {
            append_metrics(table, experiment, seed, model, name, m);
        }
    } else {
        const EvalReport report = evaluate(scored.preds, scored.labels);
        append_metrics(table, experiment, seed, model, "overall", report.overall);
    }
}

// Per-seed corpora: generated fresh (seed overrides the gen config seed) or
// loaded once from a fixed log.
struct SeedCorpora {
    CorpusSplit split;
    std::vector<UserSequence> full; // unshuffled, for the oracle replay
    GenConfig gen;                  // populated when generated, for the oracle
    bool has_gen = false;
};

SeedCorpora corpora_for_seed(const ExperimentSpec& spec, std::uint64_t seed,
                             bool keep_full, std::ostream* diag) {
    SeedCorpora out;
    std::vector<ImpressionRecord> records;
    if (!spec.gen_config_path.empty()) {
        out.gen = load_gen_config(spec.gen_config_path);
        out.gen.seed = seed;
        out.has_gen = true;
        records = generate(out.gen);
    } else {
        records = parse_log_file(spec.corpus_path);
    }
    if (diag != nullptr) {
        (*diag) << "seed " << seed << ": corpus " << records.size() << " impressions\n";
    }
    if (keep_full) out.full = build_sequences(records);
    out.split = split_by_time(records);
    if (spec.shuffle) {
        Rng shuffle_rng(mix64(seed ^ 0x53485546ULL)); // "SHUF"
        out.split.train = shuffle_payloads(out.split.train, shuffle_rng);
        out.split.test = shuffle_payloads(out.split.test, shuffle_rng);
    }
    return out;
}

void append_medians(ResultTable& table, const std::string& experiment) {
    // median over all numeric seeds for each (model, segment, metric)
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> groups;
    std::vector<std::tuple<std::string, std::string, std::string>> order;
    for (const ResultRow& row : table) {
        if (row.experiment != experiment || row.seed == "median") continue;
        const auto key = std::make_tuple(row.model, row.segment, row.metric);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(row.value);
    }
    for (const auto& key : order) {
        table.push_back({experiment, "median", std::get<0>(key), std::get<1>(key),
                         std::get<2>(key), median(groups[key])});
    }
}

} // namespace

ResultTable run_experiment(const ExperimentSpec& spec, std::ostream* diag) {
    const TrainFileConfig tf = load_train_config(spec.train_config_path);
    ResultTable table;

    if (spec.include_oracle && spec.shuffle) {
        throw DataError("oracle rows are not meaningful on shuffled control corpora");
    }
    for (const std::uint64_t seed : spec.seeds) {
        SeedCorpora corpora = corpora_for_seed(spec, seed, spec.include_oracle, diag);
        const std::string seed_str = std::to_string(seed);
        TrainConfig tc = tf.train;
        tc.seed = seed;

        if (spec.kind == "overall" || spec.kind == "positions") {
            const bool by_position = spec.kind == "positions";
            for (const std::string& model : spec.models) {
                ScoredCorpus scored;
                switch (model_kind_from_name(model)) {
                    case ModelKind::Rnn: {
                        RnnTrainResult r = train_rnn(tc, tf.features, corpora.split.train, diag);
                        scored = score_corpus_rnn(r.params, tf.features, corpora.split.test);
                        break;
                    }
                    case ModelKind::Nn: {
                        NnTrainResult r = train_nn(tc, tf.features, corpora.split.train, diag);
                        scored = score_corpus_nn(r.params, tf.features, corpora.split.test);
                        break;
                    }
                    case ModelKind::Lr: {
                        LrTrainResult r = train_lr(tc, tf.features, corpora.split.train, diag);
                        scored = score_corpus_lr(r.params, tf.features, corpora.split.test);
                        break;
                    }
                }
                append_scored(table, spec.kind, seed_str, model, scored, by_position);
            }
            if (spec.include_oracle) {
                if (!corpora.has_gen) {
                    throw DataError("oracle rows require a generated corpus (gen_config)");
                }
                ScoredCorpus scored;
                scored.preds =
                    oracle_scores(corpora.gen, corpora.full, corpora.split.midpoint);
                for (const UserSequence& seq : corpora.split.test) {
                    for (const ImpressionRecord& rec : seq.impressions) {
                        scored.labels.push_back(rec.clicked ? 1 : 0);
                        scored.positions.push_back(rec.position);
                        scored.user_ids.push_back(seq.user_id);
                    }
                }
                append_scored(table, spec.kind, seed_str, "oracle", scored, by_position);
            }
        } else if (spec.kind == "ablation") {
            RnnTrainResult r = train_rnn(tc, tf.features, corpora.split.train, diag);
            ScoredCorpus stateful = score_corpus_rnn(r.params, tf.features, corpora.split.test);
            ScoredCorpus ablated =
                score_corpus_rnn(r.params, tf.features, corpora.split.test, true);
            append_scored(table, spec.kind, seed_str, "rnn", stateful, false);
            append_scored(table, spec.kind, seed_str, "rnn-ablated", ablated, false);
        } else if (spec.kind == "history") {
            RnnTrainResult rnn = train_rnn(tc, tf.features, corpora.split.train, diag);
            NnTrainResult nn = train_nn(tc, tf.features, corpora.split.train, diag);
            for (const std::size_t t_acc : spec.accumulation_thresholds) {
                std::vector<UserSequence> selected;
                for (const UserSequence& seq : corpora.split.test) {
                    if (seq.impressions.size() > t_acc) selected.push_back(seq);
                }
                if (selected.empty()) {
                    throw DataError("history experiment: no test sequence longer than " +
                                    std::to_string(t_acc));
                }
                const std::string segment = "tacc=" + std::to_string(t_acc);
                const ScoredCorpus rnn_scored =
                    score_corpus_rnn(rnn.params, tf.features, selected, false, t_acc);
                const ScoredCorpus nn_scored =
                    score_corpus_nn(nn.params, tf.features, selected, t_acc);
                append_metrics(table, spec.kind, seed_str, "rnn", segment,
                               evaluate(rnn_scored.preds, rnn_scored.labels).overall);
                append_metrics(table, spec.kind, seed_str, "nn", segment,
                               evaluate(nn_scored.preds, nn_scored.labels).overall);
            }
        } else if (spec.kind == "unfold-sweep") {
            for (std::size_t T = spec.unfold_min; T <= spec.unfold_max; ++T) {
                TrainConfig swept = tc;
                swept.unfold_T = T;
                RnnTrainResult r = train_rnn(swept, tf.features, corpora.split.train, diag);
                ScoredCorpus scored = score_corpus_rnn(r.params, tf.features, corpora.split.test);
                const EvalReport report = evaluate(scored.preds, scored.labels);
                append_metrics(table, spec.kind, seed_str, "rnn", "unfold=" + std::to_string(T),
                               report.overall);
            }
        }
    }

    append_medians(table, spec.kind);
    return table;
}

} // namespace seqclick
