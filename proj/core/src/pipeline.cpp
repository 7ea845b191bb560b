#include "liqd/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "liqd/image_io.hpp"
#include "parallel.hpp"

namespace liqd {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

ordered_json optional_json(const std::optional<int>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }
ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

void dump_pair(const fs::path& dir, const PreparedSequence& seq, std::size_t prev, std::size_t curr,
               const PairAnalysis& pair) {
    fs::create_directories(dir);
    for (std::size_t k : {prev, curr}) {
        write_png(dir / ("mask_" + frame_file_name(k)), seq.frames[k].mask.to_image());
        write_png(dir / ("gray_" + frame_file_name(k)), seq.frames[k].gray);
    }
    char stem[48];
    std::snprintf(stem, sizeof stem, "%04zu-%04zu.png", prev, curr);
    write_png(dir / (std::string("diff_") + stem), pair.diff.abs_plane.to_image());
    write_png(dir / (std::string("pos_") + stem), pair.diff.pos_plane.to_image());
    write_png(dir / (std::string("neg_") + stem), pair.diff.neg_plane.to_image());
}

}  // namespace

SurfaceEstimate estimate_surface(const RasterImage& gray, const BinaryMask& mask) {
    if (gray.channels() != 1) throw std::invalid_argument("surface estimate needs a grayscale frame");
    if (gray.width() != mask.width() || gray.height() != mask.height()) {
        throw std::invalid_argument("frame and mask differ in size");
    }
    const BoundingBox box = bounding_box(mask);
    if (box.empty()) return {};
    const int h = box.height();

    std::vector<double> profile(static_cast<std::size_t>(h), 0.0);
    std::vector<int> row;
    double last = 0.0;
    for (int i = 0; i < h; ++i) {
        const int y = box.top + i;
        row.clear();
        for (int x = box.left; x <= box.right; ++x) {
            if (mask.at(x, y)) row.push_back(gray.at(x, y, 0));
        }
        if (!row.empty()) {
            auto mid = row.begin() + static_cast<std::ptrdiff_t>(row.size() / 2);
            std::nth_element(row.begin(), mid, row.end());
            last = *mid;
        }
        profile[static_cast<std::size_t>(i)] = last;
    }

    std::vector<double> s1(static_cast<std::size_t>(h) + 1, 0.0);
    std::vector<double> s2(static_cast<std::size_t>(h) + 1, 0.0);
    for (int i = 0; i < h; ++i) {
        const double v = profile[static_cast<std::size_t>(i)];
        s1[i + 1] = s1[i] + v;
        s2[i + 1] = s2[i] + v * v;
    }
    auto sse = [&](int a, int b) {
        if (b <= a) return 0.0;
        const double n = b - a;
        const double sum = s1[b] - s1[a];
        return (s2[b] - s2[a]) - sum * sum / n;
    };
    auto mean = [&](int a, int b) { return (s1[b] - s1[a]) / (b - a); };

    int best = h;
    double best_cost = sse(0, h);
    for (int s = 1; s < h; ++s) {
        if (mean(0, s) < mean(s, h)) continue;  // bright run must sit on top
        const double cost = sse(0, s) + sse(s, h);
        if (cost < best_cost) {
            best_cost = cost;
            best = s;
        }
    }
    return {static_cast<double>(box.top + best), static_cast<double>(h - best) / h};
}

PreparedFrame prepare_frame(const RasterImage& rgb, const BinaryMask& raw_mask, const PipelineConfig& config) {
    if (rgb.channels() != 3) throw std::invalid_argument("frames must be RGB");
    BinaryMask mask = compensate(raw_mask, ellipse_se(config.se_size));
    RasterImage gray = to_grayscale(apply_mask(rgb, mask), config.gray);
    const SurfaceEstimate s = estimate_surface(gray, mask);
    return PreparedFrame{std::move(mask), std::move(gray), s.fill, s.level_row};
}

PreparedSequence prepare_sequence(const CorpusSequence& seq, const PipelineConfig& config) {
    PreparedSequence out;
    out.name = seq.name;
    out.truth = seq.truth;
    for (std::size_t k = 0; k < seq.frame_count; ++k) {
        const RasterImage frame = load_frame(seq, k);
        const BinaryMask mask = load_mask(seq, k);
        if (frame.width() != mask.width() || frame.height() != mask.height()) {
            throw CorpusError(seq.mask_path(k), "mask size differs from its frame");
        }
        if (frame.channels() != 3) throw CorpusError(seq.frame_path(k), "frames must be RGB");
        out.frames.push_back(prepare_frame(frame, mask, config));
    }
    return out;
}

PreparedSequence prepare_sequence(const Sequence& seq, const PipelineConfig& config, std::string name) {
    PreparedSequence out;
    out.name = std::move(name);
    for (std::size_t k = 0; k < seq.frames.size(); ++k) out.frames.push_back(prepare_frame(seq.frames[k], seq.masks[k], config));
    out.truth = SequenceTruth{seq.levels, seq.labels, std::nullopt, std::nullopt};
    return out;
}

std::vector<PreparedSequence> prepare_corpus(const Corpus& corpus, const PipelineConfig& config) {
    std::vector<PreparedSequence> out(corpus.sequences.size());
    detail::parallel_for(out.size(), config.jobs,
                         [&](std::size_t i) { out[i] = prepare_sequence(corpus.sequences[i], config); });
    return out;
}

PairAnalysis analyze_pair(const PreparedFrame& prev, const PreparedFrame& curr, const DiffParams& params) {
    PairAnalysis a{frame_diff(prev.gray, curr.gray, params), prev.mask & curr.mask, {}, {}, prev.fill};
    if (a.feature_mask.empty()) a.feature_mask = prev.mask | curr.mask;
    a.features = extract_features(a.diff, a.feature_mask, std::clamp(prev.fill, 0.0, 1.0));
    a.band = change_band(a.diff);
    return a;
}

PairClassifier PairClassifier::from_config(const PipelineConfig& config) {
    if (config.classifier_path.empty()) return PairClassifier(config.noise_floor);
    return PairClassifier(MlpModel::load(config.classifier_path), config.noise_floor);
}

Prediction PairClassifier::classify(const PairAnalysis& pair) const {
    if (model_) return predict(*model_, pair.features.span());
    Prediction p;
    p.label = heuristic_classify(pair.features, pair.diff.white_count, pair.prev_fill, noise_floor_);
    p.confidence = 1.0;
    p.probabilities[index_of(p.label)] = 1.0;
    return p;
}

std::vector<std::pair<std::size_t, std::size_t>> frame_pairs(std::size_t frame_count, int stride) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const auto s = static_cast<std::size_t>(stride);
    for (std::size_t k = 0; k + s < frame_count; k += s) pairs.emplace_back(k, k + s);
    return pairs;
}

std::vector<PairRecord> run_sequence(const PreparedSequence& seq, const PipelineConfig& config,
                                     const PairClassifier& classifier, const std::optional<fs::path>& dump_dir) {
    std::vector<PairRecord> records;
    for (auto [prev, curr] : frame_pairs(seq.frames.size(), config.stride)) {
        const PairAnalysis a = analyze_pair(seq.frames[prev], seq.frames[curr], config.diff);
        const Prediction p = classifier.classify(a);
        PairRecord r;
        char id[32];
        std::snprintf(id, sizeof id, "/%04zu-%04zu", prev, curr);
        r.pair_id = seq.name + id;
        r.prev = prev;
        r.curr = curr;
        r.label = p.label;
        r.confidence = p.confidence;
        r.white_count = a.diff.white_count;
        r.mask_area = a.feature_mask.count();
        r.band = a.band;
        const bool moving = p.label == LevelState::Rising || p.label == LevelState::Falling;
        r.level_estimate = moving && a.band.centroid_row ? *a.band.centroid_row
                                                         : 0.5 * (seq.frames[prev].level + seq.frames[curr].level);
        if (seq.truth) {
            r.truth_label = seq.truth->labels[prev];
            r.truth_level = 0.5 * (seq.truth->levels[prev] + seq.truth->levels[curr]);
        }
        if (dump_dir) dump_pair(*dump_dir / seq.name, seq, prev, curr, a);
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<PairRecord> run_prepared(const std::vector<PreparedSequence>& seqs, const PipelineConfig& config,
                                     const PairClassifier& classifier, const std::optional<fs::path>& dump_dir) {
    std::vector<std::vector<PairRecord>> per_seq(seqs.size());
    detail::parallel_for(seqs.size(), config.jobs,
                         [&](std::size_t i) { per_seq[i] = run_sequence(seqs[i], config, classifier, dump_dir); });
    std::vector<PairRecord> all;
    for (auto& v : per_seq) {
        for (auto& r : v) all.push_back(std::move(r));
    }
    return all;
}

std::vector<PairRecord> run_pipeline(const PipelineConfig& config, const fs::path& corpus_dir,
                                     const std::optional<fs::path>& dump_dir) {
    config.validate();
    const PairClassifier classifier = PairClassifier::from_config(config);
    const Corpus corpus = open_corpus(corpus_dir);
    return run_prepared(prepare_corpus(corpus, config), config, classifier, dump_dir);
}

std::string to_ndjson(const std::vector<PairRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        ordered_json band;
        band["top"] = optional_json(r.band.top_row);
        band["bottom"] = optional_json(r.band.bottom_row);
        band["centroid"] = optional_json(r.band.centroid_row);
        band["sign_balance"] = r.band.sign_balance;
        ordered_json j;
        j["pair_id"] = r.pair_id;
        j["label"] = std::string(to_string(r.label));
        j["confidence"] = r.confidence;
        j["white_count"] = r.white_count;
        j["band"] = std::move(band);
        out += j.dump();
        out += '\n';
    }
    return out;
}

Evaluation score_records(const std::vector<PairRecord>& records) {
    std::vector<LevelState> predicted;
    std::vector<LevelState> truth;
    std::vector<double> level_est;
    std::vector<double> level_true;
    double white_rate = 0.0;
    for (const auto& r : records) {
        if (!r.truth_label) continue;
        predicted.push_back(r.label);
        truth.push_back(*r.truth_label);
        level_est.push_back(r.level_estimate);
        level_true.push_back(*r.truth_level);
        white_rate += r.mask_area ? static_cast<double>(r.white_count) / static_cast<double>(r.mask_area) : 0.0;
    }
    if (predicted.empty()) throw std::invalid_argument("no pairs with ground truth to score");
    Evaluation e;
    e.pairs = predicted.size();
    e.classes = classification_metrics(predicted, truth);
    e.level_errors = regression_errors(level_est, level_true);
    e.metrics = {e.classes.accuracy, e.classes.precision, e.classes.recall, e.classes.f1, e.level_errors.mae,
                 e.level_errors.mse};
    e.white_pixel_rate = white_rate / static_cast<double>(e.pairs);
    return e;
}

Evaluation evaluate(const PipelineConfig& config, const fs::path& corpus_dir) {
    config.validate();
    const PairClassifier classifier = PairClassifier::from_config(config);
    const Corpus corpus = open_corpus(corpus_dir, true);
    return score_records(run_prepared(prepare_corpus(corpus, config), config, classifier));
}

std::string evaluation_table(const Evaluation& eval) {
    std::ostringstream out;
    out << format_metrics_table(eval.metrics, "pipeline");
    out << "\nconfusion (rows: truth, columns: predicted)\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-16s", "");
    out << buf;
    for (LevelState s : kAllLevelStates) {
        std::snprintf(buf, sizeof buf, "%16s", std::string(to_string(s)).c_str());
        out << buf;
    }
    out << '\n';
    for (LevelState t : kAllLevelStates) {
        std::snprintf(buf, sizeof buf, "%-16s", std::string(to_string(t)).c_str());
        out << buf;
        for (LevelState p : kAllLevelStates) {
            std::snprintf(buf, sizeof buf, "%16zu", eval.classes.confusion[index_of(t)][index_of(p)]);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string evaluation_json(const Evaluation& eval) {
    ordered_json j;
    j["acc"] = eval.metrics.acc;
    j["precision"] = eval.metrics.precision;
    j["recall"] = eval.metrics.recall;
    j["f1"] = eval.metrics.f1;
    j["mae"] = eval.metrics.mae;
    j["mse"] = eval.metrics.mse;
    j["pairs"] = eval.pairs;
    j["white_pixel_rate"] = eval.white_pixel_rate;
    ordered_json labels = ordered_json::array();
    ordered_json confusion = ordered_json::array();
    ordered_json per_class = ordered_json::object();
    for (LevelState t : kAllLevelStates) {
        const std::size_t i = index_of(t);
        const std::string name(to_string(t));
        labels.push_back(name);
        confusion.push_back(eval.classes.confusion[i]);
        if (eval.classes.class_present[i]) {
            per_class[name] = {{"precision", eval.classes.class_precision[i]},
                               {"recall", eval.classes.class_recall[i]},
                               {"f1", eval.classes.class_f1[i]}};
        }
    }
    j["labels"] = std::move(labels);
    j["confusion"] = std::move(confusion);
    j["per_class"] = std::move(per_class);
    return j.dump(2) + "\n";
}

std::vector<int> default_threshold_grid() { return {20, 25, 30, 35, 40, 45, 50, 55, 60}; }

std::vector<SweepRow> sweep_prepared(const std::vector<PreparedSequence>& seqs, const PipelineConfig& config,
                                     const PairClassifier& classifier, const std::vector<int>& thresholds) {
    if (thresholds.empty()) throw std::invalid_argument("threshold list is empty");
    std::vector<SweepRow> rows;
    for (int t : thresholds) {
        PipelineConfig c = config;
        c.diff.threshold = t;
        c.validate();
        const Evaluation e = score_records(run_prepared(seqs, c, classifier));
        rows.push_back({t, e.classes.accuracy, e.classes.f1, e.white_pixel_rate});
    }
    return rows;
}

std::vector<SweepRow> sweep_threshold(const PipelineConfig& config, const fs::path& corpus_dir,
                                      const std::vector<int>& thresholds) {
    config.validate();
    const PairClassifier classifier = PairClassifier::from_config(config);
    const Corpus corpus = open_corpus(corpus_dir, true);
    return sweep_prepared(prepare_corpus(corpus, config), config, classifier, thresholds);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "threshold,accuracy,macro_f1,white_pixel_rate\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f\n", r.threshold, r.accuracy, r.macro_f1, r.white_pixel_rate);
        out += buf;
    }
    return out;
}

std::vector<TrainingExample> training_examples(const std::vector<PreparedSequence>& seqs,
                                               const PipelineConfig& config) {
    std::vector<std::vector<TrainingExample>> per_seq(seqs.size());
    detail::parallel_for(seqs.size(), config.jobs, [&](std::size_t i) {
        const PreparedSequence& seq = seqs[i];
        if (!seq.truth) throw std::invalid_argument("sequence '" + seq.name + "' has no ground truth");
        for (auto [prev, curr] : frame_pairs(seq.frames.size(), config.stride)) {
            const PairAnalysis a = analyze_pair(seq.frames[prev], seq.frames[curr], config.diff);
            per_seq[i].push_back({std::vector<double>(a.features.values.begin(), a.features.values.end()),
                                  seq.truth->labels[prev]});
        }
    });
    std::vector<TrainingExample> out;
    for (auto& v : per_seq) {
        for (auto& e : v) out.push_back(std::move(e));
    }
    return out;
}

}  // namespace liqd
