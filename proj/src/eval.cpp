#include "mfstl/eval.hpp"

#include <cstdio>
#include <stdexcept>

#include "mfstl/parallel.hpp"

namespace mfstl {

DetectorScore score_counts(const ConfusionCounts& c) noexcept {
    DetectorScore s;
    s.counts = c;
    const auto ratio = [](std::uint64_t num, std::uint64_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    s.accuracy = ratio(c.tp + c.tn, c.total());
    s.precision = ratio(c.tp, c.tp + c.fp);
    s.recall = ratio(c.tp, c.tp + c.fn);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

DetectorScore score_detector(std::span<const Label> verdicts, std::span<const Label> truths) {
    if (verdicts.size() != truths.size()) throw std::invalid_argument("verdict/truth length mismatch");
    if (verdicts.empty()) throw std::invalid_argument("nothing to score");
    ConfusionCounts c;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const bool predicted = verdicts[i] == Label::Abnormal;
        const bool actual = truths[i] == Label::Abnormal;
        if (predicted && actual)
            ++c.tp;
        else if (!predicted && !actual)
            ++c.tn;
        else if (predicted)
            ++c.fp;
        else
            ++c.fn;
    }
    return score_counts(c);
}

SweepGrid param_sweep(const std::vector<SamplePartition>& samples, const std::vector<double>& windows,
                      const std::vector<double>& thresholds, const SimilarityWeights& w,
                      const ServicePortMap& map, const BuildParams& base, const MetricOptions& opts) {
    if (windows.empty() || thresholds.empty()) throw std::invalid_argument("empty sweep grid");
    SweepGrid grid;
    grid.windows = windows;
    grid.thresholds = thresholds;
    grid.cells.resize(windows.size() * thresholds.size());
    parallel_for(grid.cells.size(), [&](std::size_t cell) {
        BuildParams params = base;
        params.window = windows[cell / thresholds.size()];
        params.threshold = thresholds[cell % thresholds.size()];
        CharacteristicVector mean;
        for (const auto& s : samples) {
            const auto c = characteristics(build_mfstl(s, params, w, map), opts);
            for (std::size_t k = 0; k < kCharacteristicCount; ++k) mean[k] += c[k];
        }
        if (!samples.empty())
            for (auto& v : mean.values) v /= static_cast<double>(samples.size());
        grid.cells[cell] = mean;
    });
    return grid;
}

void write_sweep_csv(std::ostream& out, const SweepGrid& grid) {
    out << "dw,rc,metric,name,value\n";
    char buf[64];
    for (std::size_t wi = 0; wi < grid.windows.size(); ++wi)
        for (std::size_t ri = 0; ri < grid.thresholds.size(); ++ri) {
            const auto& cell = grid.at(wi, ri);
            for (std::size_t k = 0; k < kCharacteristicCount; ++k) {
                std::snprintf(buf, sizeof buf, "%.17g", cell[k]);
                out << grid.windows[wi] << ',' << grid.thresholds[ri] << ',' << k << ','
                    << kCharacteristicNames[k] << ',' << buf << '\n';
            }
        }
}

std::vector<ClusterSweepRow> cluster_sweep(std::span<const CharacteristicVector> train,
                                           std::span<const Label> train_labels,
                                           std::span<const CharacteristicVector> test,
                                           std::span<const Label> test_labels,
                                           const std::vector<std::size_t>& interval_counts,
                                           const IfsParams& base, double tau_c, CollapseMode collapse) {
    if (test.size() != test_labels.size()) throw std::invalid_argument("test/labels length mismatch");
    std::vector<ClusterSweepRow> rows;
    rows.reserve(interval_counts.size());
    for (auto m : interval_counts) {
        if (m < 2) throw std::invalid_argument("interval count must be at least 2");
        IfsParams params = base;
        params.intervals = m;
        const auto em = select_and_weight(train_models(train, train_labels, params), tau_c, collapse);
        std::vector<Label> verdicts;
        verdicts.reserve(test.size());
        for (const auto& obs : test) verdicts.push_back(ifse_ad_classify(obs, em).verdict);
        rows.push_back({m, score_detector(verdicts, test_labels).accuracy});
    }
    return rows;
}

void write_cluster_sweep_csv(std::ostream& out, const std::vector<ClusterSweepRow>& rows) {
    out << "m,acc\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.accuracy);
        out << r.intervals << ',' << buf << '\n';
    }
}

}  // namespace mfstl
