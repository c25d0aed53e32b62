#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfstl/ensemble.hpp"
#include "mfstl/eval.hpp"
#include "mfstl/flow.hpp"
#include "mfstl/graph.hpp"
#include "mfstl/metrics.hpp"
#include "mfstl/similarity.hpp"

namespace mfstl {

/// Every knob of a train/detect run.
struct RunConfig {
    std::string input;       // flow CSV
    std::string model;       // model file
    std::string output_dir;  // reports and exports
    std::string port_map;    // empty: built-in defaults

    double dt = 60.0;
    double dw = 0.1;
    double rc = 0.65;
    std::size_t m = 10;
    double alpha = 0.2;
    double beta = 0.8;
    double tau_c = 0.5;
    double epsilon = 0.1;
    double split = 0.75;
    NodeMode node_mode = NodeMode::FiveTuple;
    EdgeMode edge_mode = EdgeMode::Weighted;
    std::uint64_t seed = 42;

    double label_threshold = kDefaultLabelThreshold;
    double margin_fraction = 0.05;
    std::size_t pair_cap = 100000;
    CollapseMode collapse = CollapseMode::WeightedAverage;
    MdrDenominator mdr = MdrDenominator::NodesMinusOne;

    /// Throws std::invalid_argument naming the first bad field.
    void validate() const;

    BuildParams build_params() const;
    IfsParams ifs_params() const;
    MetricOptions metric_options() const;
    ServicePortMap load_port_map() const;

    nlohmann::ordered_json to_json() const;
    /// Applies the keys present in `j` on top of `*this`; unknown keys throw.
    void merge_json(const nlohmann::json& j);
};

/// Names of the model-affecting fields on which two configs differ. Paths
/// and the seed are ignored.
std::vector<std::string> config_mismatches(const RunConfig& trained, const RunConfig& requested);

/// Partitioned, labeled and split samples with their characteristic series.
struct PreparedData {
    std::vector<SamplePartition> train;
    std::vector<SamplePartition> test;
    std::vector<Label> train_labels;
    std::vector<Label> test_labels;
    SimilarityWeights weights;
    std::vector<CharacteristicVector> train_series;
    std::vector<CharacteristicVector> test_series;
};

/// Partition, label and split. Throws on unlabeled records.
void split_samples(const std::vector<FlowRecord>& records, const RunConfig& cfg, PreparedData& out);

/// Full preparation: split, entropy weights over the training pairs, and
/// characteristics for both sides.
PreparedData prepare(const std::vector<FlowRecord>& records, const RunConfig& cfg,
                     const ServicePortMap& map);

/// Split plus the test-side series under fixed similarity weights, for
/// detection against a trained model. `train_series` stays empty.
PreparedData prepare_with_weights(const std::vector<FlowRecord>& records, const RunConfig& cfg,
                                  const ServicePortMap& map, const SimilarityWeights& weights);

struct TrainedModel {
    RunConfig config;
    SimilarityWeights weights;
    EnsembleModel ensemble;
    std::array<GaussianBaseline, kCharacteristicCount> baselines{};
};

TrainedModel train(const PreparedData& data, const RunConfig& cfg);

nlohmann::ordered_json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
/// Pretty-printed JSON with a trailing newline; stable for equal models.
std::string serialize_model(const TrainedModel& model);
TrainedModel load_model(const std::string& path);

struct ReportRow {
    std::size_t sample_index = 0;
    Label truth = Label::Normal;
    StateDecision decision;
};

struct DetectorSummary {
    std::string detector;
    DetectorScore score;
};

struct DetectionReport {
    std::vector<ReportRow> rows;
    /// IFSE-AD first, then IFS-AD and Gaussian per characteristic.
    std::vector<DetectorSummary> summaries;
};

DetectionReport detect(const TrainedModel& model, const std::vector<SamplePartition>& samples,
                       const std::vector<Label>& truths,
                       const std::vector<CharacteristicVector>& series);

/// `sample_index,truth,verdict,S_abnormal,S_normal,H_abnormal,H_normal`.
void write_report_csv(std::ostream& out, const DetectionReport& report);
/// `detector,tp,tn,fp,fn,acc,pre,rec,f1`.
void write_summary_csv(std::ostream& out, const DetectionReport& report);
/// `sample_index,label,<characteristic names>`.
void write_characteristics_csv(std::ostream& out, const std::vector<SamplePartition>& samples,
                               const std::vector<Label>& labels,
                               const std::vector<CharacteristicVector>& series);

}  // namespace mfstl
