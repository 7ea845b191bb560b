// liqd: command-line front end for the liquid-level pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liqd/config.hpp"
#include "liqd/corpus.hpp"
#include "liqd/dataengine.hpp"
#include "liqd/image_io.hpp"
#include "liqd/mlp.hpp"
#include "liqd/morphology.hpp"
#include "liqd/pipeline.hpp"
#include "liqd/scorer.hpp"
#include "liqd/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace liqd;

namespace {

struct GlobalFlags {
    std::string config;
    std::string out;
    bool dump = false;
    ConfigLayer cli;
};

PipelineConfig resolve(const GlobalFlags& g) {
    std::optional<fs::path> file;
    if (!g.config.empty()) {
        file = g.config;
    } else if (const char* env = std::getenv("LIQD_CONFIG")) {
        file = env;
    }
    return resolve_config(file, process_environment(), g.cli);
}

// Writes to --out/<name> when --out is set, otherwise to stdout.
void emit(const GlobalFlags& g, const std::string& name, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(g.out);
    const fs::path path = fs::path(g.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    std::cerr << "wrote " << path.string() << "\n";
}

fs::path require_out(const GlobalFlags& g, const char* cmd) {
    if (g.out.empty()) throw std::runtime_error(std::string(cmd) + " needs --out");
    fs::create_directories(g.out);
    return g.out;
}

BinaryMask read_mask(const std::string& path) { return BinaryMask::from_image(read_image(path)); }

std::vector<int> parse_thresholds(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

// Example layout (dataset manifest): one {pair_id, features_path, label} per line.
std::vector<TrainingExample> read_dataset(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error("cannot open " + manifest.string());
    std::vector<TrainingExample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto rec = nlohmann::json::parse(line);
        fs::path fp = rec.at("features_path").get<std::string>();
        if (fp.is_relative()) fp = manifest.parent_path() / fp;
        std::ifstream fin(fp);
        if (!fin) throw std::runtime_error("cannot open " + fp.string());
        out.push_back({nlohmann::json::parse(fin).get<std::vector<double>>(),
                       parse_level_state(rec.at("label").get<std::string>())});
    }
    return out;
}

void write_dataset(const fs::path& dir, const std::vector<TrainingExample>& examples) {
    fs::create_directories(dir / "features");
    std::ofstream manifest(dir / "dataset.ndjson", std::ios::binary);
    for (std::size_t i = 0; i < examples.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.json", i);
        std::ofstream(dir / "features" / name) << nlohmann::json(examples[i].features).dump() << "\n";
        ordered_json rec;
        rec["pair_id"] = i;
        rec["features_path"] = (fs::path("features") / name).string();
        rec["label"] = std::string(to_string(examples[i].label));
        manifest << rec.dump() << "\n";
    }
}

std::vector<BinaryMask> read_masks(const std::vector<std::string>& paths) {
    std::vector<BinaryMask> masks;
    for (const auto& p : paths) masks.push_back(read_mask(p));
    return masks;
}

ordered_json features_json(const MaskQualityFeatures& f) {
    ordered_json j;
    j["fill_ratio"] = f.fill_ratio;
    j["component_count"] = f.component_count;
    j["solidity"] = f.solidity;
    j["compactness"] = f.compactness;
    j["bce_vs_consensus"] = f.bce_vs_consensus;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Container liquid-level detection pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    auto layer_opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(flag, [&g, key](const std::string& v) { g.cli[key] = v; }, help);
    };
    app.add_option("--config", g.config, "JSON config file (also LIQD_CONFIG)");
    layer_opt("--seed", "seed", "Seed for synthesis, corruption and training");
    layer_opt("--jobs", "jobs", "Worker threads");
    layer_opt("--alpha", "alpha", "Weight of the YUV intensity");
    layer_opt("--beta", "beta", "Weight of the normalized-rgb intensity");
    layer_opt("--threshold", "threshold", "Difference threshold T");
    layer_opt("--se-size", "se_size", "Elliptical structuring element size (odd)");
    layer_opt("--block-size", "block_size", "Motion block size in pixels");
    layer_opt("--stride", "stride", "Frame distance between compared frames");
    layer_opt("--classifier", "classifier", "Trained model file");
    layer_opt("--noise-floor", "noise_floor", "White pixel count treated as no change");
    app.add_option("--out", g.out, "Output directory");
    app.add_flag("--dump-intermediates", g.dump, "Write masks, grayscale frames and difference planes");

    // synth
    auto* synth = app.add_subcommand("synth", "Render a synthetic corpus");
    std::size_t synth_count = 200;
    std::string synth_kind;
    int synth_frames = 0;
    double synth_noise = -1.0;
    synth->add_option("--count", synth_count, "Number of sequences")->check(CLI::PositiveNumber);
    synth->add_option("--kind", synth_kind, "Render only this kind (LowStatic, Rising, ...)");
    synth->add_option("--frames", synth_frames, "Frames per sequence (default: drawn per sequence)");
    synth->add_option("--noise", synth_noise, "Noise sigma override");

    // corrupt
    auto* corrupt = app.add_subcommand("corrupt", "Damage a mask with holes and breaks");
    std::string corrupt_in;
    int holes = 3, radius = 2, breaks = 1;
    corrupt->add_option("mask", corrupt_in, "Input mask")->required();
    corrupt->add_option("--holes", holes)->check(CLI::NonNegativeNumber);
    corrupt->add_option("--radius", radius)->check(CLI::NonNegativeNumber);
    corrupt->add_option("--breaks", breaks)->check(CLI::NonNegativeNumber);

    // compensate
    auto* comp = app.add_subcommand("compensate", "Repair a mask (closing + hole filling)");
    std::string comp_mask, comp_image;
    comp->add_option("mask", comp_mask, "Input mask")->required();
    comp->add_option("--image", comp_image, "Also write the image fused with the repaired mask");

    // diff
    auto* diff = app.add_subcommand("diff", "Threshold difference of two frames");
    std::string diff_prev, diff_curr, diff_mask;
    diff->add_option("prev", diff_prev)->required();
    diff->add_option("curr", diff_curr)->required();
    diff->add_option("--mask", diff_mask, "Container mask applied to both frames");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the pair classifier");
    std::string train_corpus, train_dataset, export_dataset;
    TrainOptions topt;
    train_cmd->add_option("--corpus", train_corpus, "Corpus with ground truth");
    train_cmd->add_option("--dataset", train_dataset, "Dataset manifest (NDJSON) instead of a corpus");
    train_cmd->add_option("--export-dataset", export_dataset, "Write the extracted features as a dataset");
    train_cmd->add_option("--epochs", topt.epochs);
    train_cmd->add_option("--lr", topt.learn_rate);
    train_cmd->add_option("--batch", topt.batch_size)->check(CLI::PositiveNumber);
    train_cmd->add_option("--hidden", topt.hidden)->check(CLI::PositiveNumber);

    // classify
    auto* classify = app.add_subcommand("classify", "Classify one frame pair");
    std::string cls_prev, cls_curr, cls_prev_mask, cls_curr_mask;
    classify->add_option("prev", cls_prev)->required();
    classify->add_option("curr", cls_curr)->required();
    classify->add_option("--prev-mask", cls_prev_mask)->required();
    classify->add_option("--curr-mask", cls_curr_mask, "Defaults to --prev-mask");

    // score-masks
    auto* score = app.add_subcommand("score-masks", "Score candidate masks against their consensus");
    std::vector<std::string> score_masks;
    std::string score_scorer, score_reference, score_fit;
    score->add_option("masks", score_masks, "Candidate masks")->required();
    score->add_option("--scorer", score_scorer, "Scorer JSON used for scoring");
    score->add_option("--reference", score_reference, "Reference mask; reports IoU");
    score->add_option("--fit", score_fit, "Fit a scorer on IoU vs --reference and save it here");

    // filter
    auto* filter = app.add_subcommand("filter", "Keep candidate masks scoring at least tau");
    std::vector<std::string> filter_paths;
    std::string filter_scorer;
    double filter_tau = -1.0;
    filter->add_option("masks", filter_paths, "Candidate masks")->required();
    filter->add_option("--scorer", filter_scorer)->required();
    filter->add_option("--tau", filter_tau, "Override the scorer's tau");

    // sweep / evaluate / pipeline
    auto* sweep = app.add_subcommand("sweep", "Accuracy over a threshold grid");
    std::string sweep_corpus, sweep_grid;
    sweep->add_option("corpus", sweep_corpus)->required();
    sweep->add_option("--thresholds", sweep_grid, "Comma-separated list (default 20..60 step 5)");

    auto* eval = app.add_subcommand("evaluate", "Metrics report against ground truth");
    std::string eval_corpus;
    eval->add_option("corpus", eval_corpus)->required();

    auto* pipe = app.add_subcommand("pipeline", "Classify every frame pair of a corpus");
    std::string pipe_corpus;
    pipe->add_option("corpus", pipe_corpus)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const PipelineConfig cfg = resolve(g);

        if (synth->parsed()) {
            const fs::path root = require_out(g, "synth");
            std::vector<CorpusEntry> entries = standard_corpus(synth_count, cfg.seed);
            for (std::size_t i = 0; i < entries.size(); ++i) {
                auto& e = entries[i];
                if (!synth_kind.empty()) e.scenario = standard_scenario(parse_level_state(synth_kind), e.spec.seed);
                if (synth_frames > 0) e.scenario.frames = synth_frames;
                if (synth_noise >= 0.0) e.spec.noise_sigma = synth_noise;
            }
            write_corpus(root, entries, cfg.jobs);
            std::cerr << "wrote " << entries.size() << " sequences to " << root.string() << "\n";
        } else if (corrupt->parsed()) {
            const BinaryMask out = corrupt_mask(read_mask(corrupt_in), holes, radius, breaks, cfg.seed);
            write_png(require_out(g, "corrupt") / fs::path(corrupt_in).filename(), out.to_image());
        } else if (comp->parsed()) {
            const fs::path dir = require_out(g, "compensate");
            const BinaryMask fixed = compensate(read_mask(comp_mask), ellipse_se(cfg.se_size));
            write_png(dir / fs::path(comp_mask).filename(), fixed.to_image());
            if (!comp_image.empty()) {
                write_png(dir / ("fused_" + fs::path(comp_image).filename().string()),
                          apply_mask(read_image(comp_image), fixed));
            }
        } else if (diff->parsed()) {
            RasterImage a = read_image(diff_prev);
            RasterImage b = read_image(diff_curr);
            if (!diff_mask.empty()) {
                const BinaryMask m = compensate(read_mask(diff_mask), ellipse_se(cfg.se_size));
                a = apply_mask(a, m);
                b = apply_mask(b, m);
            }
            if (a.channels() == 3) a = to_grayscale(a, cfg.gray);
            if (b.channels() == 3) b = to_grayscale(b, cfg.gray);
            const DiffResult r = frame_diff(a, b, cfg.diff);
            const ChangeBand band = change_band(r);
            if (!g.out.empty()) {
                const fs::path dir = require_out(g, "diff");
                write_png(dir / "pos.png", r.pos_plane.to_image());
                write_png(dir / "neg.png", r.neg_plane.to_image());
                write_png(dir / "abs.png", r.abs_plane.to_image());
            }
            ordered_json j;
            j["white_count"] = r.white_count;
            j["pos_count"] = r.pos_count;
            j["neg_count"] = r.neg_count;
            j["motion_blocks"] = r.block_map.motion_count();
            j["sign_balance"] = band.sign_balance;
            std::cout << j.dump() << "\n";
        } else if (train_cmd->parsed()) {
            std::vector<TrainingExample> data;
            if (!train_dataset.empty()) {
                data = read_dataset(train_dataset);
            } else if (!train_corpus.empty()) {
                data = training_examples(prepare_corpus(open_corpus(train_corpus, true), cfg), cfg);
            } else {
                throw std::runtime_error("train needs --corpus or --dataset");
            }
            if (!export_dataset.empty()) write_dataset(export_dataset, data);
            topt.seed = cfg.seed;
            const TrainResult result = train(data, topt);
            const fs::path dir = require_out(g, "train");
            result.model.save(dir / "model.bin");
            std::string trace = "epoch,loss\n";
            for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
                char line[64];
                std::snprintf(line, sizeof line, "%zu,%.10f\n", e, result.loss_trace[e]);
                trace += line;
            }
            emit(g, "loss.csv", trace);
        } else if (classify->parsed()) {
            const BinaryMask pm = read_mask(cls_prev_mask);
            const BinaryMask cm = cls_curr_mask.empty() ? pm : read_mask(cls_curr_mask);
            PreparedSequence seq;
            seq.name = "pair";
            seq.frames.push_back(prepare_frame(read_image(cls_prev), pm, cfg));
            seq.frames.push_back(prepare_frame(read_image(cls_curr), cm, cfg));
            PipelineConfig single = cfg;
            single.stride = 1;
            std::cout << to_ndjson(run_sequence(seq, single, PairClassifier::from_config(cfg)));
        } else if (score->parsed()) {
            const std::vector<BinaryMask> masks = read_masks(score_masks);
            const SaliencyMap consensus = consensus_map(masks);
            std::optional<BinaryMask> reference;
            if (!score_reference.empty()) reference = read_mask(score_reference);
            std::optional<LinearScorer> scorer;
            if (!score_scorer.empty()) scorer = LinearScorer::load(score_scorer);
            std::vector<ScorerExample> examples;
            std::string out;
            for (std::size_t i = 0; i < masks.size(); ++i) {
                const MaskQualityFeatures f = mask_features(masks[i], consensus);
                ordered_json j;
                j["path"] = score_masks[i];
                j["features"] = features_json(f);
                if (scorer) j["score"] = scorer->score(f);
                if (reference) {
                    const double iou = mask_iou(masks[i], *reference);
                    j["iou"] = iou;
                    examples.push_back({f, iou});
                }
                out += j.dump() + "\n";
            }
            if (!score_fit.empty()) {
                if (!reference) throw std::runtime_error("--fit needs --reference");
                fit_scorer(examples).save(score_fit);
            }
            emit(g, "scores.ndjson", out);
        } else if (filter->parsed()) {
            LinearScorer scorer = LinearScorer::load(filter_scorer);
            if (filter_tau >= 0.0) scorer.tau = filter_tau;
            const std::vector<BinaryMask> masks = read_masks(filter_paths);
            const SaliencyMap consensus = consensus_map(masks);
            std::vector<ScoredMask> candidates;
            for (const auto& m : masks) {
                const MaskQualityFeatures f = mask_features(m, consensus);
                candidates.push_back({m, f, scorer.score(f), false});
            }
            const FilterResult r = filter_masks(candidates, scorer.tau);
            // The partition is stable, so paths line up with candidate order.
            ordered_json j;
            j["tau"] = scorer.tau;
            j["accepted"] = ordered_json::array();
            j["rejected"] = ordered_json::array();
            std::size_t ai = 0, ri = 0;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (ai < r.accepted.size() && candidates[i].score >= scorer.tau) {
                    j["accepted"].push_back({{"path", filter_paths[i]}, {"score", r.accepted[ai++].score}});
                } else {
                    j["rejected"].push_back({{"path", filter_paths[i]}, {"score", r.rejected[ri++].score}});
                }
            }
            emit(g, "filter.json", j.dump(2) + "\n");
        } else if (sweep->parsed()) {
            const std::vector<int> grid = sweep_grid.empty() ? default_threshold_grid() : parse_thresholds(sweep_grid);
            emit(g, "sweep.csv", sweep_csv(sweep_threshold(cfg, sweep_corpus, grid)));
        } else if (eval->parsed()) {
            const Evaluation e = evaluate(cfg, eval_corpus);
            std::cout << evaluation_table(e);
            if (!g.out.empty()) emit(g, "report.json", evaluation_json(e));
        } else if (pipe->parsed()) {
            std::optional<fs::path> dump;
            if (g.dump) dump = require_out(g, "--dump-intermediates") / "intermediates";
            emit(g, "records.ndjson", to_ndjson(run_pipeline(cfg, pipe_corpus, dump)));
        }
    } catch (const std::exception& e) {
        std::cerr << "liqd: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
