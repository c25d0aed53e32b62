#include "mfstl/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mfstl {

namespace {

std::string_view mdr_to_string(MdrDenominator d) noexcept {
    return d == MdrDenominator::DegreeSum ? "degree-sum" : "nodes-minus-one";
}

MdrDenominator mdr_from_string(std::string_view s) {
    if (s == "nodes-minus-one") return MdrDenominator::NodesMinusOne;
    if (s == "degree-sum") return MdrDenominator::DegreeSum;
    throw std::invalid_argument("unknown mdr denominator '" + std::string(s) + "'");
}

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    require(std::isfinite(dw) && dw >= 0.0, "dw must be non-negative");
    require(rc >= 0.0 && rc <= 1.0, "rc must be in [0,1]");
    require(m >= 2 && m <= 24, "m must be in [2,24]");
    require(alpha >= 0.0 && alpha < 1.0, "alpha must be in [0,1)");
    require(beta > 0.0 && beta <= 1.0, "beta must be in (0,1]");
    require(tau_c >= 0.0 && tau_c <= 1.0, "tau-c must be in [0,1]");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)");
    require(split > 0.0 && split < 1.0, "split must be in (0,1)");
    require(label_threshold > 0.0 && label_threshold <= 1.0, "label threshold must be in (0,1]");
    require(margin_fraction > 0.0, "margin fraction must be positive");
    require(pair_cap >= 2, "pair cap must be at least 2");
}

BuildParams RunConfig::build_params() const {
    BuildParams p;
    p.window = dw;
    p.threshold = rc;
    p.node_mode = node_mode;
    p.edge_mode = edge_mode;
    return p;
}

IfsParams RunConfig::ifs_params() const {
    IfsParams p;
    p.intervals = m;
    p.alpha = alpha;
    p.beta = beta;
    p.margin_fraction = margin_fraction;
    return p;
}

MetricOptions RunConfig::metric_options() const { return MetricOptions{mdr}; }

ServicePortMap RunConfig::load_port_map() const {
    return port_map.empty() ? ServicePortMap::defaults() : ServicePortMap::load(port_map);
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["model"] = model;
    j["output_dir"] = output_dir;
    j["port_map"] = port_map;
    j["dt"] = dt;
    j["dw"] = dw;
    j["rc"] = rc;
    j["m"] = m;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["tau_c"] = tau_c;
    j["epsilon"] = epsilon;
    j["split"] = split;
    j["node_mode"] = std::string(to_string(node_mode));
    j["edge_mode"] = std::string(to_string(edge_mode));
    j["seed"] = seed;
    j["label_threshold"] = label_threshold;
    j["margin_fraction"] = margin_fraction;
    j["pair_cap"] = pair_cap;
    j["collapse"] = std::string(to_string(collapse));
    j["mdr"] = std::string(mdr_to_string(mdr));
    return j;
}

void RunConfig::merge_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "input") input = v.get<std::string>();
        else if (key == "model") model = v.get<std::string>();
        else if (key == "output_dir") output_dir = v.get<std::string>();
        else if (key == "port_map") port_map = v.get<std::string>();
        else if (key == "dt") dt = v.get<double>();
        else if (key == "dw") dw = v.get<double>();
        else if (key == "rc") rc = v.get<double>();
        else if (key == "m") m = v.get<std::size_t>();
        else if (key == "alpha") alpha = v.get<double>();
        else if (key == "beta") beta = v.get<double>();
        else if (key == "tau_c") tau_c = v.get<double>();
        else if (key == "epsilon") epsilon = v.get<double>();
        else if (key == "split") split = v.get<double>();
        else if (key == "node_mode") node_mode = node_mode_from_string(v.get<std::string>());
        else if (key == "edge_mode") edge_mode = edge_mode_from_string(v.get<std::string>());
        else if (key == "seed") seed = v.get<std::uint64_t>();
        else if (key == "label_threshold") label_threshold = v.get<double>();
        else if (key == "margin_fraction") margin_fraction = v.get<double>();
        else if (key == "pair_cap") pair_cap = v.get<std::size_t>();
        else if (key == "collapse") collapse = collapse_mode_from_string(v.get<std::string>());
        else if (key == "mdr") mdr = mdr_from_string(v.get<std::string>());
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

std::vector<std::string> config_mismatches(const RunConfig& a, const RunConfig& b) {
    std::vector<std::string> out;
    const auto check = [&](bool same, const char* name) {
        if (!same) out.emplace_back(name);
    };
    check(a.port_map == b.port_map, "port_map");
    check(a.dt == b.dt, "dt");
    check(a.dw == b.dw, "dw");
    check(a.rc == b.rc, "rc");
    check(a.m == b.m, "m");
    check(a.alpha == b.alpha, "alpha");
    check(a.beta == b.beta, "beta");
    check(a.tau_c == b.tau_c, "tau_c");
    check(a.epsilon == b.epsilon, "epsilon");
    check(a.split == b.split, "split");
    check(a.node_mode == b.node_mode, "node_mode");
    check(a.edge_mode == b.edge_mode, "edge_mode");
    check(a.label_threshold == b.label_threshold, "label_threshold");
    check(a.margin_fraction == b.margin_fraction, "margin_fraction");
    check(a.pair_cap == b.pair_cap, "pair_cap");
    check(a.collapse == b.collapse, "collapse");
    check(a.mdr == b.mdr, "mdr");
    return out;
}

void split_samples(const std::vector<FlowRecord>& records, const RunConfig& cfg, PreparedData& out) {
    if (records.empty()) throw std::invalid_argument("trace holds no flow records");
    auto samples = partition_samples(records, cfg.dt);
    for (auto& s : samples) s.label = label_sample(s, cfg.label_threshold);
    auto split = split_chronological(std::move(samples), cfg.split);
    out.train = std::move(split.train);
    out.test = std::move(split.test);
    out.train_labels.clear();
    out.test_labels.clear();
    for (const auto& s : out.train) out.train_labels.push_back(*s.label);
    for (const auto& s : out.test) out.test_labels.push_back(*s.label);
}

PreparedData prepare_with_weights(const std::vector<FlowRecord>& records, const RunConfig& cfg,
                                  const ServicePortMap& map, const SimilarityWeights& weights) {
    cfg.validate();
    PreparedData d;
    split_samples(records, cfg, d);
    d.weights = weights;
    const auto params = cfg.build_params();
    d.test_series = characteristic_series(d.test, params, d.weights, map, cfg.metric_options());
    return d;
}

PreparedData prepare(const std::vector<FlowRecord>& records, const RunConfig& cfg, const ServicePortMap& map) {
    cfg.validate();
    PreparedData d;
    split_samples(records, cfg, d);
    const auto params = cfg.build_params();
    const auto pairs = window_pair_similarities(d.train, params, map, cfg.pair_cap);
    // Too few candidate pairs to estimate entropies: keep equal weights.
    d.weights = pairs.size() >= 2 ? entropy_weights(pairs) : SimilarityWeights::uniform();
    d.train_series = characteristic_series(d.train, params, d.weights, map, cfg.metric_options());
    d.test_series = characteristic_series(d.test, params, d.weights, map, cfg.metric_options());
    return d;
}

TrainedModel train(const PreparedData& data, const RunConfig& cfg) {
    cfg.validate();
    TrainedModel tm;
    tm.config = cfg;
    tm.weights = data.weights;
    tm.ensemble = select_and_weight(train_models(data.train_series, data.train_labels, cfg.ifs_params()),
                                    cfg.tau_c, cfg.collapse);
    std::vector<double> column(data.train_series.size());
    for (std::size_t c = 0; c < kCharacteristicCount; ++c) {
        for (std::size_t i = 0; i < column.size(); ++i) column[i] = data.train_series[i][c];
        tm.baselines[c] = GaussianBaseline::fit(column, data.train_labels, cfg.epsilon);
    }
    return tm;
}

namespace {

nlohmann::ordered_json model_json(const CharacteristicModel& m) {
    nlohmann::ordered_json j;
    j["centers"] = m.centers;
    j["bounds"] = m.bounds;
    j["margin_low"] = m.margin_low;
    j["margin_high"] = m.margin_high;
    j["alpha"] = m.alpha;
    j["beta"] = m.beta;
    j["abnormal_set"] = m.abnormal_set;
    j["normal_set"] = m.normal_set;
    j["tau"] = m.tau;
    auto tallies = nlohmann::ordered_json::array();
    for (const auto& t : m.tallies) tallies.push_back({t.abnormal, t.normal});
    j["tallies"] = std::move(tallies);
    j["degenerate"] = m.degenerate;
    return j;
}

CharacteristicModel model_of(const nlohmann::json& j) {
    CharacteristicModel m;
    j.at("centers").get_to(m.centers);
    j.at("bounds").get_to(m.bounds);
    j.at("margin_low").get_to(m.margin_low);
    j.at("margin_high").get_to(m.margin_high);
    j.at("alpha").get_to(m.alpha);
    j.at("beta").get_to(m.beta);
    j.at("abnormal_set").get_to(m.abnormal_set);
    j.at("normal_set").get_to(m.normal_set);
    j.at("tau").get_to(m.tau);
    for (const auto& t : j.at("tallies")) m.tallies.push_back({t.at(0).get<std::uint64_t>(), t.at(1).get<std::uint64_t>()});
    j.at("degenerate").get_to(m.degenerate);
    if (!m.degenerate) {
        if (m.centers.size() < 2 || m.bounds.size() != m.centers.size() + 1 ||
            m.tallies.size() != m.centers.size())
            throw std::invalid_argument("characteristic model has inconsistent interval arrays");
        for (auto i : m.abnormal_set)
            if (i >= m.centers.size()) throw std::invalid_argument("interval index out of range");
        for (auto i : m.normal_set)
            if (i >= m.centers.size()) throw std::invalid_argument("interval index out of range");
    }
    return m;
}

}  // namespace

nlohmann::ordered_json model_to_json(const TrainedModel& model) {
    nlohmann::ordered_json j;
    j["format"] = "mfstl-model/1";
    // Output locations would make otherwise identical models differ.
    auto cfg = model.config.to_json();
    cfg.erase("model");
    cfg.erase("output_dir");
    j["config"] = std::move(cfg);
    const auto w = model.weights;
    j["similarity_weights"] = {{"address", w.address}, {"port", w.port}, {"protocol", w.protocol},
                               {"payload", w.payload}};
    const auto& em = model.ensemble;
    auto chars = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kCharacteristicCount; ++c) {
        auto entry = model_json(em.models.at(c));
        const auto& g = model.baselines[c];
        entry["gaussian"] = {{"mean", g.mean}, {"stddev", g.stddev}, {"lambda", g.lambda}};
        chars[std::string(kCharacteristicNames[c])] = std::move(entry);
    }
    j["characteristics"] = std::move(chars);
    nlohmann::ordered_json ens;
    auto names = nlohmann::ordered_json::array();
    for (auto i : em.selected) names.push_back(std::string(kCharacteristicNames[i]));
    ens["selected"] = std::move(names);
    ens["weights"] = em.weights;
    ens["tau_threshold"] = em.tau_threshold;
    ens["collapse"] = std::string(to_string(em.collapse));
    ens["degenerate"] = em.degenerate;
    j["ensemble"] = std::move(ens);
    return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "mfstl-model/1") throw std::invalid_argument("not an mfstl model file");
    TrainedModel tm;
    tm.config.merge_json(j.at("config"));
    const auto& w = j.at("similarity_weights");
    tm.weights = {w.at("address").get<double>(), w.at("port").get<double>(), w.at("protocol").get<double>(),
                  w.at("payload").get<double>()};
    tm.weights.validate();
    const auto& chars = j.at("characteristics");
    auto& em = tm.ensemble;
    for (std::size_t c = 0; c < kCharacteristicCount; ++c) {
        const auto& entry = chars.at(std::string(kCharacteristicNames[c]));
        em.models.push_back(model_of(entry));
        const auto& g = entry.at("gaussian");
        tm.baselines[c] = {g.at("mean").get<double>(), g.at("stddev").get<double>(),
                           g.at("lambda").get<double>()};
    }
    const auto& ens = j.at("ensemble");
    for (const auto& name : ens.at("selected")) {
        const auto s = name.get<std::string>();
        std::size_t idx = kCharacteristicCount;
        for (std::size_t c = 0; c < kCharacteristicCount; ++c)
            if (kCharacteristicNames[c] == s) idx = c;
        if (idx == kCharacteristicCount) throw std::invalid_argument("unknown characteristic '" + s + "'");
        em.selected.push_back(idx);
    }
    ens.at("weights").get_to(em.weights);
    if (em.selected.empty() || em.weights.size() != em.selected.size())
        throw std::invalid_argument("ensemble selection and weights disagree");
    ens.at("tau_threshold").get_to(em.tau_threshold);
    em.collapse = collapse_mode_from_string(ens.at("collapse").get<std::string>());
    ens.at("degenerate").get_to(em.degenerate);
    return tm;
}

std::string serialize_model(const TrainedModel& model) { return model_to_json(model).dump(2) + "\n"; }

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model file '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

DetectionReport detect(const TrainedModel& model, const std::vector<SamplePartition>& samples,
                       const std::vector<Label>& truths, const std::vector<CharacteristicVector>& series) {
    if (samples.size() != truths.size() || samples.size() != series.size())
        throw std::invalid_argument("samples/truths/series length mismatch");
    const auto& em = model.ensemble;
    DetectionReport report;
    report.rows.resize(samples.size());
    std::vector<Label> ensemble_verdicts(samples.size());
    std::vector<std::vector<Label>> single(kCharacteristicCount, std::vector<Label>(samples.size()));
    std::vector<std::vector<Label>> gauss(kCharacteristicCount, std::vector<Label>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto& row = report.rows[i];
        row.sample_index = samples[i].index;
        row.truth = truths[i];
        row.decision = ifse_ad_classify(series[i], em);
        ensemble_verdicts[i] = row.decision.verdict;
        for (std::size_t c = 0; c < kCharacteristicCount; ++c) {
            single[c][i] = ifs_ad_classify(series[i][c], em.models[c]);
            gauss[c][i] = model.baselines[c].detect(series[i][c]);
        }
    }
    report.summaries.push_back({"IFSE-AD", score_detector(ensemble_verdicts, truths)});
    for (std::size_t c = 0; c < kCharacteristicCount; ++c)
        report.summaries.push_back({"IFS-AD:" + std::string(kCharacteristicNames[c]), score_detector(single[c], truths)});
    for (std::size_t c = 0; c < kCharacteristicCount; ++c)
        report.summaries.push_back({"Gaussian:" + std::string(kCharacteristicNames[c]), score_detector(gauss[c], truths)});
    return report;
}

void write_report_csv(std::ostream& out, const DetectionReport& report) {
    out << "sample_index,truth,verdict,S_abnormal,S_normal,H_abnormal,H_normal\n";
    for (const auto& r : report.rows) {
        const auto& d = r.decision;
        out << r.sample_index << ',' << to_string(r.truth) << ',' << to_string(d.verdict) << ','
            << fmt(d.score_abnormal) << ',' << fmt(d.score_normal) << ',' << fmt(d.precision_abnormal) << ','
            << fmt(d.precision_normal) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const DetectionReport& report) {
    out << "detector,tp,tn,fp,fn,acc,pre,rec,f1\n";
    for (const auto& s : report.summaries) {
        const auto& c = s.score.counts;
        out << s.detector << ',' << c.tp << ',' << c.tn << ',' << c.fp << ',' << c.fn << ','
            << fmt(s.score.accuracy) << ',' << fmt(s.score.precision) << ',' << fmt(s.score.recall) << ','
            << fmt(s.score.f1) << '\n';
    }
}

void write_characteristics_csv(std::ostream& out, const std::vector<SamplePartition>& samples,
                               const std::vector<Label>& labels,
                               const std::vector<CharacteristicVector>& series) {
    if (samples.size() != labels.size() || samples.size() != series.size())
        throw std::invalid_argument("samples/labels/series length mismatch");
    out << "sample_index,label";
    for (auto name : kCharacteristicNames) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << samples[i].index << ',' << to_string(labels[i]);
        for (double v : series[i].values) out << ',' << fmt(v);
        out << '\n';
    }
}

}  // namespace mfstl
