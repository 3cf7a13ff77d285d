#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqclick/checkpoint.hpp"
#include "seqclick/errors.hpp"
#include "seqclick/experiments.hpp"
#include "seqclick/inference.hpp"
#include "seqclick/kvconfig.hpp"
#include "seqclick/metrics.hpp"
#include "seqclick/synthgen.hpp"

namespace {

using namespace seqclick;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

int cmd_generate(const std::string& config_path, const std::string& out_path,
                 std::uint64_t seed_override, bool has_seed) {
    GenConfig config = load_gen_config(config_path);
    if (has_seed) config.seed = seed_override;
    const std::vector<ImpressionRecord> records = generate(config);
    write_log_file(records, out_path);

    std::size_t clicks = 0;
    for (const ImpressionRecord& r : records) clicks += r.clicked ? 1 : 0;
    std::cout << "wrote " << out_path << ": " << records.size() << " impressions, " << clicks
              << " clicks, ctr=" << static_cast<double>(clicks) / records.size() << "\n";
    return 0;
}

int cmd_train(const std::string& model, const std::string& corpus_path,
              const std::string& config_path, const std::string& out_path,
              std::uint64_t seed_override, bool has_seed) {
    TrainFileConfig tf = load_train_config(config_path);
    if (has_seed) tf.train.seed = seed_override;
    const std::vector<UserSequence> sequences = build_sequences(parse_log_file(corpus_path));

    Checkpoint ckpt;
    ckpt.kind = model_kind_from_name(model);
    ckpt.feature_spec = tf.features;
    ckpt.train_config = tf.train;
    switch (ckpt.kind) {
        case ModelKind::Rnn:
            ckpt.rnn = train_rnn(tf.train, tf.features, sequences, &std::cout).params;
            break;
        case ModelKind::Nn:
            ckpt.nn = train_nn(tf.train, tf.features, sequences, &std::cout).params;
            break;
        case ModelKind::Lr:
            ckpt.lr = train_lr(tf.train, tf.features, sequences, &std::cout).params;
            break;
    }
    save_checkpoint(ckpt, out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

ScoredCorpus score_with_checkpoint(const Checkpoint& ckpt,
                                   const std::vector<UserSequence>& sequences,
                                   bool ablate_recurrent, std::size_t accumulation) {
    switch (ckpt.kind) {
        case ModelKind::Rnn:
            return score_corpus_rnn(ckpt.expect_rnn(), ckpt.feature_spec, sequences,
                                    ablate_recurrent, accumulation);
        case ModelKind::Nn:
            if (ablate_recurrent) throw DataError("--ablate-recurrent requires an rnn checkpoint");
            return score_corpus_nn(ckpt.expect_nn(), ckpt.feature_spec, sequences, accumulation);
        case ModelKind::Lr:
            if (ablate_recurrent) throw DataError("--ablate-recurrent requires an rnn checkpoint");
            return score_corpus_lr(ckpt.expect_lr(), ckpt.feature_spec, sequences, accumulation);
    }
    throw ContractViolation("score_with_checkpoint: bad model kind");
}

std::string position_segment(PositionClass p) {
    switch (p) {
        case PositionClass::TopFirst: return "top";
        case PositionClass::Mainline: return "mainline";
        case PositionClass::Sidebar: return "sidebar";
    }
    return "?";
}

void print_metrics_table(const EvalReport& report, const std::string& model, std::ostream& out) {
    ResultTable table;
    auto push = [&](const std::string& segment, const MetricsResult& m) {
        if (m.auc.has_value()) table.push_back({"evaluate", "-", model, segment, "auc", *m.auc});
        if (m.rig.has_value()) table.push_back({"evaluate", "-", model, segment, "rig", *m.rig});
        table.push_back({"evaluate", "-", model, segment, "log_loss", m.mean_log_loss});
        table.push_back(
            {"evaluate", "-", model, segment, "n", static_cast<double>(m.n_samples)});
        table.push_back({"evaluate", "-", model, segment, "ctr", m.base_rate});
    };
    push("overall", report.overall);
    for (const auto& [name, m] : report.segments) push(name, m);
    write_result_table(table, out);
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& corpus_path, bool by_position,
                 bool ablate_recurrent, std::size_t accumulation,
                 const std::string& warm_start_path, const std::string& out_path) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    std::vector<UserSequence> sequences = build_sequences(parse_log_file(corpus_path));

    ScoredCorpus scored;
    if (!warm_start_path.empty()) {
        // Build per-user state from the warm-start corpus first, then keep
        // scoring the evaluation corpus with the same scorer.
        if (ckpt.kind != ModelKind::Rnn) {
            throw DataError("--warm-start-corpus requires an rnn checkpoint");
        }
        if (ablate_recurrent) {
            throw DataError("--warm-start-corpus cannot be combined with --ablate-recurrent");
        }
        ScorerState state(ckpt.expect_rnn());
        Vec x;
        for (const UserSequence& seq : build_sequences(parse_log_file(warm_start_path))) {
            const ImpressionRecord* prev = nullptr;
            for (const ImpressionRecord& rec : seq.impressions) {
                featurize(ckpt.feature_spec, rec, prev, x);
                state.score_next(seq.user_id, x);
                prev = &rec;
            }
        }
        for (const UserSequence& seq : sequences) {
            const ImpressionRecord* prev = nullptr;
            std::size_t t = 0;
            for (const ImpressionRecord& rec : seq.impressions) {
                featurize(ckpt.feature_spec, rec, prev, x);
                const double pred = state.score_next(seq.user_id, x);
                if (t >= accumulation) {
                    scored.preds.push_back(pred);
                    scored.labels.push_back(rec.clicked ? 1 : 0);
                    scored.positions.push_back(rec.position);
                    scored.user_ids.push_back(seq.user_id);
                }
                prev = &rec;
                ++t;
            }
        }
    } else {
        scored = score_with_checkpoint(ckpt, sequences, ablate_recurrent, accumulation);
    }

    EvalReport report;
    if (by_position) {
        std::vector<std::string> segments(scored.positions.size());
        for (std::size_t i = 0; i < segments.size(); ++i) {
            segments[i] = position_segment(scored.positions[i]);
        }
        report = evaluate(scored.preds, scored.labels, segments);
    } else {
        report = evaluate(scored.preds, scored.labels);
    }

    const std::string model = model_kind_name(ckpt.kind) + (ablate_recurrent ? "-ablated" : "");
    if (out_path.empty()) {
        print_metrics_table(report, model, std::cout);
    } else {
        std::ofstream out = open_out(out_path);
        print_metrics_table(report, model, out);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_experiment(const std::string& spec_path, const std::string& out_path, bool quiet) {
    const ExperimentSpec spec = load_experiment_spec(spec_path);
    const ResultTable table = run_experiment(spec, quiet ? nullptr : &std::cerr);
    if (out_path.empty()) {
        write_result_table(table, std::cout);
    } else {
        std::ofstream out = open_out(out_path);
        write_result_table(table, out);
        std::cout << "wrote " << out_path << " (" << table.size() << " rows)\n";
    }
    return 0;
}

int cmd_gradcheck(std::size_t instances, std::uint64_t seed) {
    Rng rng(seed);
    const GradCheckReport report = gradient_check(instances, rng);
    std::cout << "instances " << report.instances << "\n"
              << "max_rel_error_U " << report.max_rel_error_U << "\n"
              << "max_rel_error_R " << report.max_rel_error_R << "\n"
              << "max_rel_error_v " << report.max_rel_error_v << "\n"
              << "max_rel_error_b_h " << report.max_rel_error_b_h << "\n"
              << "max_rel_error_b_o " << report.max_rel_error_b_o << "\n"
              << "max_rel_error " << report.max_rel_error() << "\n";
    if (report.max_rel_error() >= 1e-4) {
        std::cerr << "gradient check FAILED (tolerance 1e-4)\n";
        return kExitNumeric;
    }
    std::cout << "gradient check passed (tolerance 1e-4)\n";
    return 0;
}

std::vector<TrainConfig> expand_grid(const std::string& grid_path, const TrainConfig& base) {
    KvConfig kv = KvConfig::from_file(grid_path);
    auto reals = [&](const char* key, double fallback) {
        std::vector<std::string> parts = kv.get_string_list(key, {});
        std::vector<double> out;
        if (parts.empty()) {
            out.push_back(fallback);
        } else {
            for (const std::string& p : parts) out.push_back(std::stod(p));
        }
        return out;
    };
    auto uints = [&](const char* key, std::size_t fallback) {
        std::vector<std::uint64_t> parts = kv.get_uint_list(key, {});
        std::vector<std::size_t> out;
        if (parts.empty()) {
            out.push_back(fallback);
        } else {
            out.assign(parts.begin(), parts.end());
        }
        return out;
    };
    const std::vector<double> alphas = reals("alpha", base.alpha);
    const std::vector<double> lambdas = reals("l2_lambda", base.l2_lambda);
    const std::vector<std::size_t> epochs = uints("epochs", base.epochs);
    const std::vector<std::size_t> hiddens = uints("hidden_size", base.hidden_size);
    const std::vector<std::size_t> unfolds = uints("unfold_T", base.unfold_T);
    kv.reject_unknown_keys();

    std::vector<TrainConfig> grid;
    for (double a : alphas)
        for (double l : lambdas)
            for (std::size_t e : epochs)
                for (std::size_t h : hiddens)
                    for (std::size_t t : unfolds) {
                        TrainConfig c = base;
                        c.alpha = a;
                        c.l2_lambda = l;
                        c.epochs = e;
                        c.hidden_size = h;
                        c.unfold_T = t;
                        c.validate();
                        grid.push_back(c);
                    }
    return grid;
}

int cmd_gridsearch(const std::string& model, const std::string& train_path,
                   const std::string& val_path, const std::string& config_path,
                   const std::string& grid_path, const std::string& out_path, bool quiet) {
    const TrainFileConfig tf = load_train_config(config_path);
    const std::vector<TrainConfig> grid = expand_grid(grid_path, tf.train);
    const std::vector<UserSequence> train_corpus = build_sequences(parse_log_file(train_path));
    const std::vector<UserSequence> val_corpus = build_sequences(parse_log_file(val_path));

    const GridSearchResult result =
        grid_search(model_kind_from_name(model), grid, tf.features, train_corpus, val_corpus,
                    quiet ? nullptr : &std::cerr);

    ResultTable table;
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        const GridPointResult& point = result.table[i];
        const std::string segment = "alpha=" + std::to_string(point.config.alpha) +
                                    ",l2=" + std::to_string(point.config.l2_lambda) +
                                    ",epochs=" + std::to_string(point.config.epochs) +
                                    ",H=" + std::to_string(point.config.hidden_size) +
                                    ",T=" + std::to_string(point.config.unfold_T);
        table.push_back({"gridsearch", std::to_string(i), model, segment, "auc", point.val_auc});
        table.push_back({"gridsearch", std::to_string(i), model, segment, "rig", point.val_rig});
    }
    if (out_path.empty()) {
        write_result_table(table, std::cout);
    } else {
        std::ofstream out = open_out(out_path);
        write_result_table(table, out);
    }
    std::cout << "best: alpha=" << result.best.alpha << " l2_lambda=" << result.best.l2_lambda
              << " epochs=" << result.best.epochs << " hidden_size=" << result.best.hidden_size
              << " unfold_T=" << result.best.unfold_T << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential click prediction: synthetic logs, LR/NN/RNN training, evaluation"};
    app.require_subcommand(1);

    std::string config_path, out_path, corpus_path, model, ckpt_path, spec_path;
    std::string train_path, val_path, grid_path, warm_start_path;
    std::uint64_t seed = 0;
    bool by_position = false, ablate = false, quiet = false;
    std::size_t instances = 100, accumulation = 0;

    CLI::App* generate = app.add_subcommand("generate", "generate a synthetic click log");
    generate->add_option("--config", config_path, "generator key=value config")->required();
    generate->add_option("--out", out_path, "output log path")->required();
    CLI::Option* gen_seed = generate->add_option("--seed", seed, "override the config seed");

    CLI::App* train = app.add_subcommand("train", "train a model on a click log");
    train->add_option("--model", model, "lr, nn or rnn")->required();
    train->add_option("--corpus", corpus_path, "training log path")->required();
    train->add_option("--config", config_path, "training key=value config")->required();
    train->add_option("--out", out_path, "checkpoint output path")->required();
    CLI::Option* train_seed = train->add_option("--seed", seed, "override the config seed");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a log with a checkpoint");
    evaluate->add_option("--checkpoint", ckpt_path)->required();
    evaluate->add_option("--corpus", corpus_path)->required();
    evaluate->add_flag("--by-position", by_position, "segment metrics by ad position");
    evaluate->add_flag("--ablate-recurrent", ablate, "score with the hidden state forced to zero");
    evaluate->add_option("--accumulation", accumulation,
                         "per-user impressions scored but excluded from metrics");
    evaluate->add_option("--warm-start-corpus", warm_start_path,
                         "replay this log through the scorer before evaluating");
    evaluate->add_option("--out", out_path, "report path (stdout when omitted)");

    CLI::App* experiment = app.add_subcommand("experiment", "run a multi-seed experiment");
    experiment->add_option("--spec", spec_path, "experiment spec file")->required();
    experiment->add_option("--out", out_path, "result table path (stdout when omitted)");
    experiment->add_flag("--quiet", quiet, "suppress progress diagnostics");

    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    gradcheck->add_option("--instances", instances, "random instances (default 100)");
    gradcheck->add_option("--seed", seed, "rng seed")->default_val(7);

    CLI::App* gridsearch = app.add_subcommand("gridsearch", "grid search by validation RIG");
    gridsearch->add_option("--model", model, "lr, nn or rnn")->required();
    gridsearch->add_option("--train", train_path, "training log")->required();
    gridsearch->add_option("--val", val_path, "validation log")->required();
    gridsearch->add_option("--config", config_path, "base training config")->required();
    gridsearch->add_option("--grid", grid_path, "grid file with comma-separated values")
        ->required();
    gridsearch->add_option("--out", out_path, "result table path (stdout when omitted)");
    gridsearch->add_flag("--quiet", quiet, "suppress progress diagnostics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (generate->parsed()) {
            return cmd_generate(config_path, out_path, seed, !gen_seed->empty());
        }
        if (train->parsed()) {
            return cmd_train(model, corpus_path, config_path, out_path, seed,
                             !train_seed->empty());
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(ckpt_path, corpus_path, by_position, ablate, accumulation,
                                warm_start_path, out_path);
        }
        if (experiment->parsed()) {
            return cmd_experiment(spec_path, out_path, quiet);
        }
        if (gradcheck->parsed()) {
            return cmd_gradcheck(instances, seed);
        }
        if (gridsearch->parsed()) {
            return cmd_gridsearch(model, train_path, val_path, config_path, grid_path, out_path,
                                  quiet);
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const seqclick::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
