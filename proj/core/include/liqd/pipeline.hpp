#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "liqd/config.hpp"
#include "liqd/corpus.hpp"
#include "liqd/dataengine.hpp"
#include "liqd/diffseg.hpp"
#include "liqd/features.hpp"
#include "liqd/mlp.hpp"

namespace liqd {

/// A frame after mask compensation, masking and grayscale conversion.
struct PreparedFrame {
    BinaryMask mask;      // compensated container mask
    RasterImage gray;     // masked, 1 channel
    double fill = 0.0;    // estimated fill fraction
    double level = 0.0;   // estimated first liquid row
};

struct PreparedSequence {
    std::string name;
    std::vector<PreparedFrame> frames;
    std::optional<SequenceTruth> truth;
};

/// Liquid surface read from one masked grayscale frame: the per-row median
/// over mask pixels is split into a bright upper and a dark lower run by
/// least squares. fill = dark rows / mask box height.
struct SurfaceEstimate {
    double level_row = 0.0;
    double fill = 0.0;
};
SurfaceEstimate estimate_surface(const RasterImage& gray, const BinaryMask& mask);

PreparedFrame prepare_frame(const RasterImage& rgb, const BinaryMask& raw_mask, const PipelineConfig& config);
PreparedSequence prepare_sequence(const CorpusSequence& seq, const PipelineConfig& config);
PreparedSequence prepare_sequence(const Sequence& seq, const PipelineConfig& config, std::string name = {});
std::vector<PreparedSequence> prepare_corpus(const Corpus& corpus, const PipelineConfig& config);

struct PairAnalysis {
    DiffResult diff;
    BinaryMask feature_mask;  // prev mask & curr mask
    FeatureVector features;
    ChangeBand band;
    double prev_fill = 0.0;
};

PairAnalysis analyze_pair(const PreparedFrame& prev, const PreparedFrame& curr, const DiffParams& params);

/// Trained model when one is loaded, otherwise the rule-based classifier
/// (confidence 1).
class PairClassifier {
public:
    explicit PairClassifier(std::size_t noise_floor = 20) : noise_floor_(noise_floor) {}
    PairClassifier(MlpModel model, std::size_t noise_floor) : model_(std::move(model)), noise_floor_(noise_floor) {}

    static PairClassifier from_config(const PipelineConfig& config);

    Prediction classify(const PairAnalysis& pair) const;
    bool uses_model() const noexcept { return model_.has_value(); }

private:
    std::optional<MlpModel> model_;
    std::size_t noise_floor_;
};

struct PairRecord {
    std::string pair_id;
    std::size_t prev = 0;
    std::size_t curr = 0;
    LevelState label = LevelState::LowStatic;
    double confidence = 0.0;
    std::size_t white_count = 0;
    std::size_t mask_area = 0;
    ChangeBand band;
    double level_estimate = 0.0;
    std::optional<LevelState> truth_label;
    std::optional<double> truth_level;
};

/// Pairs (k, k + stride) for k = 0, stride, 2 stride, ...
std::vector<std::pair<std::size_t, std::size_t>> frame_pairs(std::size_t frame_count, int stride);

/// When dump_dir is given, the sequence's masks, grayscale frames and
/// difference planes are written below dump_dir / seq.name.
std::vector<PairRecord> run_sequence(const PreparedSequence& seq, const PipelineConfig& config,
                                     const PairClassifier& classifier,
                                     const std::optional<std::filesystem::path>& dump_dir = std::nullopt);

/// All records in corpus order; sequences are processed on config.jobs threads.
std::vector<PairRecord> run_prepared(const std::vector<PreparedSequence>& seqs, const PipelineConfig& config,
                                     const PairClassifier& classifier,
                                     const std::optional<std::filesystem::path>& dump_dir = std::nullopt);

/// Opens the corpus, prepares it and classifies every pair.
std::vector<PairRecord> run_pipeline(const PipelineConfig& config, const std::filesystem::path& corpus_dir,
                                     const std::optional<std::filesystem::path>& dump_dir = std::nullopt);

/// {pair_id, label, confidence, white_count, band{top, bottom, centroid, sign_balance}}
std::string to_ndjson(const std::vector<PairRecord>& records);

struct Evaluation {
    ClassificationReport classes;
    RegressionErrors level_errors;
    MetricsReport metrics;
    double white_pixel_rate = 0.0;  // mean white pixels per pair / feature-mask area
    std::size_t pairs = 0;
};

/// Scores records that carry truth. Throws when none do.
Evaluation score_records(const std::vector<PairRecord>& records);

Evaluation evaluate(const PipelineConfig& config, const std::filesystem::path& corpus_dir);

std::string evaluation_table(const Evaluation& eval);
std::string evaluation_json(const Evaluation& eval);

struct SweepRow {
    int threshold = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double white_pixel_rate = 0.0;
};

std::vector<SweepRow> sweep_prepared(const std::vector<PreparedSequence>& seqs, const PipelineConfig& config,
                                     const PairClassifier& classifier, const std::vector<int>& thresholds);
std::vector<SweepRow> sweep_threshold(const PipelineConfig& config, const std::filesystem::path& corpus_dir,
                                      const std::vector<int>& thresholds);

/// threshold,accuracy,macro_f1,white_pixel_rate
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// {20, 25, ..., 60}
std::vector<int> default_threshold_grid();

/// One labeled feature vector per pair at config's threshold and stride.
std::vector<TrainingExample> training_examples(const std::vector<PreparedSequence>& seqs,
                                               const PipelineConfig& config);

}  // namespace liqd
