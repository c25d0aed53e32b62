// mfstl: synthesize traces, train and run the flow-graph anomaly detector,
// and sweep its parameters.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfstl/eval.hpp"
#include "mfstl/pipeline.hpp"
#include "mfstl/synth.hpp"

namespace fs = std::filesystem;
using namespace mfstl;

namespace {

/// Configuration problems surface as exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    return out;
}

fs::path ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("cannot create directory '" + dir + "'");
    return dir;
}

/// Run-config flags shared by train, detect and sweep. Values are only
/// applied when given, so a config file or a model's stored config can sit
/// underneath.
class ConfigFlags {
public:
    void attach(CLI::App* app) {
        app->add_option("--config", config_file_, "JSON file with run-config keys; flags win")
            ->check(CLI::ExistingFile);
        add(app, "--dt", dt_, "sample duration, seconds", [this](RunConfig& c) { c.dt = dt_; });
        add(app, "--dw", dw_, "temporal locality window, seconds", [this](RunConfig& c) { c.dw = dw_; });
        add(app, "--rc", rc_, "critical similarity threshold", [this](RunConfig& c) { c.rc = rc_; });
        add(app, "--m", m_, "clustering intervals per characteristic", [this](RunConfig& c) { c.m = m_; });
        add(app, "--alpha", alpha_, "boundary hesitation", [this](RunConfig& c) { c.alpha = alpha_; });
        add(app, "--beta", beta_, "Yager complement exponent", [this](RunConfig& c) { c.beta = beta_; });
        add(app, "--tau-c", tau_c_, "distinction index cutoff", [this](RunConfig& c) { c.tau_c = tau_c_; });
        add(app, "--epsilon", epsilon_, "Gaussian baseline false-alarm rate",
            [this](RunConfig& c) { c.epsilon = epsilon_; });
        add(app, "--split", split_, "chronological train fraction", [this](RunConfig& c) { c.split = split_; });
        add(app, "--seed", seed_, "random seed", [this](RunConfig& c) { c.seed = seed_; });
        add(app, "--port-map", port_map_, "service port map file", [this](RunConfig& c) { c.port_map = port_map_; })
            ->check(CLI::ExistingFile);
        add(app, "--node-mode", node_mode_, "five-tuple | two-tuple",
            [this](RunConfig& c) { c.node_mode = node_mode_from_string(node_mode_); })
            ->check(CLI::IsMember({"five-tuple", "two-tuple"}));
        add(app, "--edge-mode", edge_mode_, "WE | UWE",
            [this](RunConfig& c) { c.edge_mode = edge_mode_from_string(edge_mode_); })
            ->check(CLI::IsMember({"WE", "UWE"}));
        add(app, "--collapse", collapse_, "ifwa | max-membership",
            [this](RunConfig& c) { c.collapse = collapse_mode_from_string(collapse_); })
            ->check(CLI::IsMember({"ifwa", "max-membership"}));
        add(app, "--label-threshold", label_threshold_, "abnormal flow fraction that marks a sample",
            [this](RunConfig& c) { c.label_threshold = label_threshold_; });
        add(app, "--pair-cap", pair_cap_, "flow pairs sampled for entropy weights",
            [this](RunConfig& c) { c.pair_cap = pair_cap_; });
    }

    /// base <- config file <- explicit flags.
    RunConfig resolve(RunConfig base) const {
        if (!config_file_.empty()) {
            std::ifstream in(config_file_);
            nlohmann::json j;
            try {
                in >> j;
                base.merge_json(j);
            } catch (const std::exception& e) {
                throw UsageError("config file '" + config_file_ + "': " + e.what());
            }
        }
        for (const auto& [opt, apply] : setters_)
            if (opt->count() > 0) apply(base);
        return base;
    }

private:
    template <typename T>
    CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& help,
                     std::function<void(RunConfig&)> apply) {
        auto* opt = app->add_option(name, target, help);
        setters_.emplace_back(opt, std::move(apply));
        return opt;
    }

    std::string config_file_;
    double dt_ = 0, dw_ = 0, rc_ = 0, alpha_ = 0, beta_ = 0, tau_c_ = 0, epsilon_ = 0, split_ = 0,
           label_threshold_ = 0;
    std::size_t m_ = 0, pair_cap_ = 0;
    std::uint64_t seed_ = 0;
    std::string port_map_, node_mode_, edge_mode_, collapse_;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters_;
};

RunConfig checked(RunConfig cfg) {
    try {
        cfg.validate();
        cfg.build_params().validate();
        cfg.ifs_params().validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

ServicePortMap port_map_of(const RunConfig& cfg) {
    try {
        return cfg.load_port_map();
    } catch (const std::exception& e) {
        throw UsageError(std::string("port map: ") + e.what());
    }
}

std::vector<FlowRecord> read_trace(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw UsageError("cannot read '" + path + "'");
    return read_flow_file(path);
}

AttackWindow parse_attack(const std::string& text) {
    AttackWindow a;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(text);
    if (!(in >> a.start >> sep1 >> a.duration >> sep2 >> a.rate) || sep1 != ':' || sep2 != ':' ||
        !(in >> std::ws).eof())
        throw UsageError("attack must be START:DURATION:RATE, got '" + text + "'");
    return a;
}

void print_summary(const DetectionReport& report, std::ostream& out) {
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %7s %7s %7s %7s\n", "detector", "Acc", "Pre", "Rec", "F1");
    out << line;
    for (const auto& s : report.summaries) {
        std::snprintf(line, sizeof line, "%-28s %7.4f %7.4f %7.4f %7.4f\n", s.detector.c_str(),
                      s.score.accuracy, s.score.precision, s.score.recall, s.score.f1);
        out << line;
    }
}

void export_graphs(const fs::path& dir, const std::vector<SamplePartition>& samples, const RunConfig& cfg,
                   const SimilarityWeights& w, const ServicePortMap& map) {
    const auto params = cfg.build_params();
    for (const auto& s : samples) {
        const auto g = build_mfstl(s, params, w, map);
        const auto stem = "sample_" + std::to_string(s.index);
        auto edges = open_out(dir / (stem + ".edges.tsv"));
        auto nodes = open_out(dir / (stem + ".nodes.txt"));
        export_edge_list(g, edges, nodes);
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("bad number '" + item + "' in list '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flow-interaction graph anomaly detector"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "write a labeled synthetic flow trace");
    std::string synth_out;
    SynthConfig sc;
    std::vector<std::string> attacks;
    synth->add_option("--out", synth_out, "output CSV")->required();
    synth->add_option("--duration", sc.duration, "trace length, seconds")->capture_default_str();
    synth->add_option("--rate", sc.background_rate, "background flows per second")->capture_default_str();
    synth->add_option("--attack", attacks, "scan window START:DURATION:RATE (repeatable)");
    synth->add_option("--seed", sc.seed, "random seed")->capture_default_str();
    synth->add_option("--clients", sc.clients, "client pool size")->capture_default_str();
    synth->add_option("--servers", sc.servers, "server pool size")->capture_default_str();

    // train
    auto* train_cmd = app.add_subcommand("train", "fit the detector on the training split");
    ConfigFlags train_flags;
    std::string train_input, train_model, train_outdir, train_graphs;
    train_cmd->add_option("--input", train_input, "labeled flow CSV")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--model", train_model, "model file to write")->required();
    train_cmd->add_option("--output-dir", train_outdir, "write characteristics.csv here");
    train_cmd->add_option("--export-graphs", train_graphs, "write per-sample edge lists here");
    train_flags.attach(train_cmd);

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "classify the test split with a trained model");
    ConfigFlags detect_flags;
    std::string detect_input, detect_model, detect_outdir;
    detect_cmd->add_option("--input", detect_input, "labeled flow CSV")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--model", detect_model, "trained model file")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--output-dir", detect_outdir, "write report.csv and summary.csv here")->required();
    detect_flags.attach(detect_cmd);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "graph-parameter and interval-count sweeps");
    ConfigFlags sweep_flags;
    std::string sweep_input, sweep_outdir, sweep_windows, sweep_thresholds, sweep_ms;
    sweep_cmd->add_option("--input", sweep_input, "labeled flow CSV")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--output-dir", sweep_outdir, "write sweep.csv and cluster_sweep.csv here")->required();
    sweep_cmd->add_option("--windows", sweep_windows, "comma-separated dw values");
    sweep_cmd->add_option("--thresholds", sweep_thresholds, "comma-separated rc values");
    sweep_cmd->add_option("--m-list", sweep_ms, "comma-separated interval counts")->default_str("2,...,12");
    sweep_flags.attach(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            for (const auto& a : attacks) sc.attacks.push_back(parse_attack(a));
            std::vector<FlowRecord> trace;
            try {
                trace = synth_trace(sc);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            auto out = open_out(synth_out);
            write_flows(out, trace);
            std::cerr << "wrote " << trace.size() << " flows to " << synth_out << '\n';
            return 0;
        }

        if (train_cmd->parsed()) {
            RunConfig base;
            base.input = train_input;
            base.model = train_model;
            base.output_dir = train_outdir;
            const auto cfg = checked(train_flags.resolve(base));
            const auto map = port_map_of(cfg);
            auto model_out = open_out(cfg.model);
            const auto data = prepare(read_trace(cfg.input), cfg, map);
            const auto model = train(data, cfg);
            model_out << serialize_model(model);
            if (!cfg.output_dir.empty()) {
                auto out = open_out(ensure_dir(cfg.output_dir) / "characteristics.csv");
                std::vector<SamplePartition> all = data.train;
                all.insert(all.end(), data.test.begin(), data.test.end());
                auto labels = data.train_labels;
                labels.insert(labels.end(), data.test_labels.begin(), data.test_labels.end());
                auto series = data.train_series;
                series.insert(series.end(), data.test_series.begin(), data.test_series.end());
                write_characteristics_csv(out, all, labels, series);
            }
            if (!train_graphs.empty()) {
                const auto dir = ensure_dir(train_graphs);
                export_graphs(dir, data.train, cfg, data.weights, map);
                export_graphs(dir, data.test, cfg, data.weights, map);
            }
            std::cerr << "trained on " << data.train.size() << " samples; ensemble uses "
                      << model.ensemble.selected.size() << " characteristics\n";
            return 0;
        }

        if (detect_cmd->parsed()) {
            TrainedModel model;
            try {
                model = load_model(detect_model);
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            RunConfig requested = model.config;
            requested.input = detect_input;
            requested.model = detect_model;
            requested.output_dir = detect_outdir;
            requested = checked(detect_flags.resolve(requested));
            const auto diff = config_mismatches(model.config, requested);
            if (!diff.empty()) {
                std::string names;
                for (const auto& d : diff) names += (names.empty() ? "" : ", ") + d;
                throw UsageError("settings differ from the trained model: " + names);
            }
            const auto map = port_map_of(requested);
            const auto dir = ensure_dir(requested.output_dir);
            auto report_out = open_out(dir / "report.csv");
            auto summary_out = open_out(dir / "summary.csv");
            const auto data = prepare_with_weights(read_trace(requested.input), requested, map, model.weights);
            const auto report = detect(model, data.test, data.test_labels, data.test_series);
            write_report_csv(report_out, report);
            write_summary_csv(summary_out, report);
            print_summary(report, std::cout);
            return 0;
        }

        if (sweep_cmd->parsed()) {
            RunConfig base;
            base.input = sweep_input;
            base.output_dir = sweep_outdir;
            const auto cfg = checked(sweep_flags.resolve(base));
            const auto map = port_map_of(cfg);
            const auto windows = sweep_windows.empty() ? kDefaultSweepWindows : parse_list(sweep_windows);
            const auto thresholds = sweep_thresholds.empty() ? kDefaultSweepThresholds : parse_list(sweep_thresholds);
            for (double w : windows)
                if (!(w >= 0.0)) throw UsageError("sweep windows must be non-negative");
            for (double r : thresholds)
                if (!(r >= 0.0 && r <= 1.0)) throw UsageError("sweep thresholds must be in [0,1]");
            std::vector<std::size_t> ms;
            if (sweep_ms.empty()) {
                for (std::size_t m = 2; m <= 12; ++m) ms.push_back(m);
            } else {
                for (double v : parse_list(sweep_ms)) {
                    if (!(v >= 2.0 && v <= 24.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
                        throw UsageError("interval counts must be integers in [2,24]");
                    ms.push_back(static_cast<std::size_t>(v));
                }
            }
            const auto dir = ensure_dir(cfg.output_dir);
            auto sweep_out = open_out(dir / "sweep.csv");
            auto cluster_out = open_out(dir / "cluster_sweep.csv");
            const auto data = prepare(read_trace(cfg.input), cfg, map);
            const auto grid = param_sweep(data.train, windows, thresholds, data.weights, map, cfg.build_params(),
                                          cfg.metric_options());
            write_sweep_csv(sweep_out, grid);
            const auto rows = cluster_sweep(data.train_series, data.train_labels, data.test_series,
                                            data.test_labels, ms, cfg.ifs_params(), cfg.tau_c, cfg.collapse);
            write_cluster_sweep_csv(cluster_out, rows);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "mfstl: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "mfstl: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
