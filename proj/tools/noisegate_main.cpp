#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "noisegate/audio_io.hpp"
#include "noisegate/classifiers.hpp"
#include "noisegate/cross_validation.hpp"
#include "noisegate/dataset.hpp"
#include "noisegate/features.hpp"
#include "noisegate/noise_filters.hpp"
#include "noisegate/synth.hpp"

namespace fs = std::filesystem;
using namespace ng;

namespace {

// Exit codes: 0 success, 1 usage/configuration error, 2 partial data failure
// (some inputs failed but the run completed).
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;

// Expands directories and sorts everything by path so row order is canonical
// (file name, then segment index) no matter how inputs were passed.
std::vector<std::string> collect_wavs(const std::vector<std::string>& inputs) {
    std::vector<std::string> out;
    for (const auto& input : inputs) {
        if (fs::is_directory(input)) {
            for (const auto& entry : fs::directory_iterator(input))
                if (entry.is_regular_file() && entry.path().extension() == ".wav")
                    out.push_back(entry.path().string());
        } else {
            out.push_back(input);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct LoadedSegments {
    std::vector<Segment> segments;
    std::vector<std::string> errors;
};

LoadedSegments load_segments(const std::vector<std::string>& paths) {
    LoadedSegments out;
    for (const auto& path : paths) {
        try {
            auto segs = segment_audio(read_wav(path), path);
            if (segs.empty()) throw std::runtime_error("shorter than one 10 s segment");
            out.segments.insert(out.segments.end(), std::make_move_iterator(segs.begin()),
                                std::make_move_iterator(segs.end()));
        } catch (const std::exception& e) {
            out.errors.push_back(path + ": " + e.what());
        }
    }
    return out;
}

// Runs fn(i) for i in [0, n) across jobs threads; any exception is rethrown.
// Callers write results into per-index slots, so output stays order-stable.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::min<unsigned>(jobs, static_cast<unsigned>(n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Manifest lookup keyed by wav basename; needs path, rain and cicada columns,
// located by header name so extra spec columns are fine.
std::map<std::string, std::pair<int, int>> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty labels file");

    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::istringstream row(s);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        return cells;
    };
    const auto header = split(line);
    std::ptrdiff_t path_col = -1, rain_col = -1, cicada_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "path") path_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == "rain") rain_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == "cicada") cicada_col = static_cast<std::ptrdiff_t>(i);
    }
    if (path_col < 0 || rain_col < 0 || cicada_col < 0)
        throw std::runtime_error(path + ": header needs path, rain and cicada columns");

    std::map<std::string, std::pair<int, int>> labels;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line);
        const auto need = static_cast<std::size_t>(std::max({path_col, rain_col, cicada_col}));
        if (cells.size() <= need)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
        labels[fs::path(cells[static_cast<std::size_t>(path_col)]).filename().string()] = {
            std::stoi(cells[static_cast<std::size_t>(rain_col)]),
            std::stoi(cells[static_cast<std::size_t>(cicada_col)])};
    }
    return labels;
}

std::string opt_field(bool present, double value) { return present ? fmt17(value) : ""; }

int cmd_synth(const std::string& out_dir, std::size_t n, std::uint64_t seed, double rain_fraction,
              double cicada_fraction) {
    CorpusSpec spec;
    spec.n = n;
    spec.seed = seed;
    spec.rain_fraction = rain_fraction;
    spec.cicada_fraction = cicada_fraction;
    const auto scenes = gen_corpus(spec);

    fs::create_directories(out_dir);
    std::ofstream manifest(fs::path(out_dir) / "manifest.csv", std::ios::trunc);
    if (!manifest) throw std::runtime_error(out_dir + "/manifest.csv: cannot open for writing");
    manifest << "scene,path,rain,cicada,seed,noise_floor_db,rain_level_db,drops_per_second,"
                "chorus_center_hz,chorus_bandwidth_hz,chorus_level_db,chirp_count,chirp_level_db\n";
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto& sc = scenes[i];
        char name[32];
        std::snprintf(name, sizeof name, "scene_%04zu.wav", i);
        write_wav((fs::path(out_dir) / name).string(), sc.audio);
        manifest << i << ',' << name << ',' << (sc.labels.rain ? 1 : 0) << ','
                 << (sc.labels.cicada ? 1 : 0) << ',' << sc.spec.seed << ','
                 << fmt17(sc.spec.noise_floor_db) << ','
                 << opt_field(sc.spec.rain.has_value(), sc.spec.rain ? sc.spec.rain->level_db : 0)
                 << ','
                 << opt_field(sc.spec.rain.has_value(),
                              sc.spec.rain ? sc.spec.rain->drops_per_second : 0)
                 << ','
                 << opt_field(sc.spec.chorus.has_value(),
                              sc.spec.chorus ? sc.spec.chorus->center_hz : 0)
                 << ','
                 << opt_field(sc.spec.chorus.has_value(),
                              sc.spec.chorus ? sc.spec.chorus->bandwidth_hz : 0)
                 << ','
                 << opt_field(sc.spec.chorus.has_value(),
                              sc.spec.chorus ? sc.spec.chorus->level_db : 0)
                 << ',' << (sc.spec.chirps ? std::to_string(sc.spec.chirps->count) : "") << ','
                 << opt_field(sc.spec.chirps.has_value(),
                              sc.spec.chirps ? sc.spec.chirps->level_db : 0)
                 << '\n';
    }
    if (!manifest) throw std::runtime_error(out_dir + "/manifest.csv: write failed");
    std::cout << "wrote " << scenes.size() << " scenes\n";
    return 0;
}

int cmd_featurize(const std::vector<std::string>& inputs, const std::string& out_path,
                  const std::string& arff_path, const std::string& set_name, bool highpass,
                  bool mmse, const std::string& labels_path, const std::string& label_task,
                  unsigned jobs) {
    const FeatureSet set = feature_set_from_string(set_name);
    if (set == FeatureSet::cfs_subset)
        throw std::runtime_error(
            "CFSSubset has no fixed column list; featurize a base set (for example All) and run "
            "train --cfs first");
    const Preprocess pre{highpass, mmse};

    auto loaded = load_segments(collect_wavs(inputs));
    const auto& segments = loaded.segments;
    std::vector<FeatureVector> rows(segments.size());
    parallel_for(segments.size(), jobs,
                 [&](std::size_t i) { rows[i] = extract_features(segments[i], set, pre); });

    Dataset ds;
    ds.feature_names = feature_names(set, highpass);
    ds.rows.reserve(rows.size());
    for (auto& fv : rows) ds.rows.push_back(std::move(fv.values));

    if (!labels_path.empty() && !segments.empty()) {
        if (label_task != "rain" && label_task != "cicada")
            throw std::runtime_error("--label must be rain or cicada when --labels is given");
        const auto labels = read_labels_csv(labels_path);
        for (const auto& seg : segments) {
            const auto key = fs::path(seg.source).filename().string();
            const auto it = labels.find(key);
            if (it == labels.end())
                throw std::runtime_error(labels_path + ": no row for " + key);
            ds.labels.push_back(label_task == "rain" ? it->second.first : it->second.second);
        }
    }

    write_features_csv(out_path, ds);
    if (!arff_path.empty()) write_arff(arff_path, ds, "noisegate");
    std::cout << "wrote " << ds.rows.size() << " rows, " << ds.feature_names.size()
              << " features\n";
    for (const auto& err : loaded.errors) std::cerr << "error: " << err << '\n';
    return loaded.errors.empty() ? 0 : kExitPartial;
}

TrainerConfig trainer_config(const std::string& classifier, const std::string& set_name,
                             bool highpass, bool mmse, int k, int trees, std::uint64_t seed,
                             bool cfs) {
    TrainerConfig cfg;
    cfg.kind = classifier_from_string(classifier);
    cfg.set = feature_set_from_string(set_name);
    cfg.pre = Preprocess{highpass, mmse};
    cfg.k = k;
    cfg.trees = trees;
    cfg.seed = seed;
    cfg.cfs = cfs;
    return cfg;
}

Dataset load_training_csv(const std::string& path, const TrainerConfig& cfg, bool strict) {
    const Dataset ds = read_features_csv(path);
    const auto expected = feature_names(cfg.set, cfg.pre.highpass);
    if (ds.feature_names != expected) {
        std::string msg = path + ": header does not match feature set '" + to_string(cfg.set) +
                          "'" + (cfg.pre.highpass ? " with high-pass" : "");
        for (std::size_t i = 0; i < std::max(expected.size(), ds.feature_names.size()); ++i) {
            const std::string want = i < expected.size() ? expected[i] : "<none>";
            const std::string got = i < ds.feature_names.size() ? ds.feature_names[i] : "<none>";
            if (want != got) {
                msg += "; first mismatch at column " + std::to_string(i + 1) + ": expected '" +
                       want + "', found '" + got + "'";
                break;
            }
        }
        if (strict) throw std::runtime_error(msg);
        std::cerr << "warning: " << msg << "; using the csv columns as-is\n";
    }
    if (!ds.labeled()) throw std::runtime_error(path + ": training needs a label column");
    std::size_t pos = 0;
    for (int l : ds.labels) pos += (l != 0);
    if (pos == 0 || pos == ds.labels.size())
        throw std::runtime_error(path + ": single-class data; both labels are required");
    return ds;
}

int cmd_train(const std::string& csv_path, const std::string& out_path, const TrainerConfig& cfg) {
    // strict header check: the saved model re-extracts this set from audio later
    const Dataset ds = load_training_csv(csv_path, cfg, true);
    const TrainedModel model = train(ds, cfg);
    save_model(out_path, model);
    std::cout << "trained " << to_string(model.kind) << " on " << ds.rows.size() << " rows, "
              << model.feature_names.size() << " features\n";
    return 0;
}

int cmd_cv(const std::string& csv_path, const TrainerConfig& cfg, int folds, bool sweep_k) {
    // cv never touches audio again, so any labeled csv is evaluable
    const Dataset ds = load_training_csv(csv_path, cfg, false);
    if (sweep_k) {
        if (cfg.kind != ClassifierKind::knn)
            throw std::runtime_error("--sweep-k applies to --classifier knn only");
        int best_k = 1;
        double best_auc = -1.0;
        for (int k = 1; k <= 25; k += 2) {
            TrainerConfig swept = cfg;
            swept.k = k;
            const auto report = cross_validate(ds, swept, folds);
            std::cout << "k " << k << " auc " << fmt(report.auc) << " accuracy@0.5 "
                      << fmt(report.accuracy_at_half) << '\n';
            if (report.auc > best_auc) {
                best_auc = report.auc;
                best_k = k;
            }
        }
        std::cout << "best k " << best_k << " auc " << fmt(best_auc) << '\n';
        return 0;
    }
    const auto report = cross_validate(ds, cfg, folds);
    std::cout << format_report(report);
    return 0;
}

int cmd_gate_rain(const std::vector<std::string>& inputs, const std::string& model_path,
                  double threshold, const std::string& out_dir, unsigned jobs) {
    const TrainedModel model = load_model(model_path);
    auto loaded = load_segments(collect_wavs(inputs));
    const auto& segments = loaded.segments;

    // per-segment slots keep the report order independent of --jobs
    std::vector<double> probabilities(segments.size());
    std::vector<std::string> errors(segments.size());
    parallel_for(segments.size(), jobs, [&](std::size_t i) {
        try {
            const auto fv = extract_features(segments[i], model.base_set, model.pre);
            probabilities[i] = predict_proba(model, fv);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    if (!out_dir.empty()) fs::create_directories(out_dir);
    std::cout << "source,segment,probability,action\n";
    bool failed = !loaded.errors.empty();
    for (const auto& err : loaded.errors) std::cerr << "error: " << err << '\n';
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        const auto write_kept = [&] {
            if (out_dir.empty()) return;
            const auto stem = fs::path(seg.source).stem().string();
            char name[512];
            std::snprintf(name, sizeof name, "%s_seg%03zu.wav", stem.c_str(), seg.index);
            write_wav((fs::path(out_dir) / name).string(), seg.audio);
        };
        if (!errors[i].empty()) {
            // failed predictions keep their audio; dropping data needs evidence
            failed = true;
            std::cerr << "error: " << seg.source << "[" << seg.index << "]: " << errors[i] << '\n';
            write_kept();
            continue;
        }
        const bool drop = probabilities[i] >= threshold;
        std::cout << seg.source << ',' << seg.index << ',' << fmt(probabilities[i]) << ','
                  << (drop ? "drop" : "keep") << '\n';
        if (!drop) write_kept();
    }
    return failed ? kExitPartial : 0;
}

int cmd_filter_cicada(const std::vector<std::string>& inputs, const std::string& model_path,
                      double threshold, const std::string& out_dir, unsigned jobs) {
    const TrainedModel model = load_model(model_path);
    auto loaded = load_segments(collect_wavs(inputs));
    const auto& segments = loaded.segments;

    std::vector<CicadaFilterResult> results(segments.size());
    std::vector<std::string> errors(segments.size());
    parallel_for(segments.size(), jobs, [&](std::size_t i) {
        try {
            results[i] = filter_cicada(segments[i], model, threshold);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    fs::create_directories(out_dir);
    std::cout << "source,segment,probability,filtered,band_low_hz,band_high_hz\n";
    bool failed = !loaded.errors.empty();
    for (const auto& err : loaded.errors) std::cerr << "error: " << err << '\n';
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        if (!errors[i].empty()) {
            failed = true;
            std::cerr << "error: " << seg.source << "[" << seg.index << "]: " << errors[i] << '\n';
            continue;
        }
        const auto& res = results[i];
        std::cout << seg.source << ',' << seg.index << ',' << fmt(res.probability) << ','
                  << (res.filtered ? 1 : 0) << ',';
        if (res.band)
            std::cout << fmt(res.band->low_hz) << ',' << fmt(res.band->high_hz);
        else
            std::cout << ',';
        std::cout << '\n';

        const auto stem = fs::path(seg.source).stem().string();
        char name[512];
        std::snprintf(name, sizeof name, "%s_seg%03zu.wav", stem.c_str(), seg.index);
        write_wav((fs::path(out_dir) / name).string(), res.segment.audio);
    }
    return failed ? kExitPartial : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rain and cicada noise gating for environmental audio"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    std::string synth_out;
    std::size_t synth_n = 200;
    std::uint64_t synth_seed = 0;
    double rain_fraction = 0.3, cicada_fraction = 0.3;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--n", synth_n, "number of 10 s scenes");
    synth->add_option("--seed", synth_seed, "corpus seed");
    synth->add_option("--rain-fraction", rain_fraction, "fraction of rain scenes");
    synth->add_option("--cicada-fraction", cicada_fraction, "fraction of cicada scenes");

    // featurize
    auto* feat = app.add_subcommand("featurize", "extract features from wav files");
    std::vector<std::string> feat_inputs;
    std::string feat_out, feat_arff, feat_set = "All", feat_labels, feat_label = "rain";
    bool feat_highpass = false, feat_mmse = false;
    unsigned feat_jobs = 1;
    feat->add_option("inputs", feat_inputs, "wav files or directories")->required();
    feat->add_option("--out", feat_out, "output features csv")->required();
    feat->add_option("--arff", feat_arff, "also write an ARFF copy");
    feat->add_option("--set", feat_set,
                     "feature set: Indices|FreqIndices|MFCCs|MFCCsNoDelta|All|AllNoDelta");
    feat->add_flag("--highpass", feat_highpass, "1 kHz high-pass before extraction");
    feat->add_flag("--mmse", feat_mmse, "spectral noise reduction before extraction");
    feat->add_option("--labels", feat_labels, "manifest csv with path, rain, cicada columns");
    feat->add_option("--label", feat_label, "which label column to attach: rain|cicada");
    feat->add_option("--jobs", feat_jobs, "worker threads");

    // shared trainer flags
    const auto add_trainer_flags = [](CLI::App* cmd, std::string& csv, std::string& classifier,
                                      std::string& set, bool& highpass, bool& mmse, int& k,
                                      int& trees, std::uint64_t& seed, bool& cfs) {
        cmd->add_option("features", csv, "features csv with label column")->required();
        cmd->add_option("--classifier", classifier, "naive-bayes|knn|tree|random-forest");
        cmd->add_option("--set", set, "feature set the csv was extracted with");
        cmd->add_flag("--highpass", highpass, "csv was extracted with the high-pass");
        cmd->add_flag("--mmse", mmse, "csv was extracted with noise reduction");
        cmd->add_option("--k", k, "k-NN neighbors (odd, 1-25)");
        cmd->add_option("--trees", trees, "forest size");
        cmd->add_option("--seed", seed, "training seed");
        cmd->add_flag("--cfs", cfs, "correlation-based feature selection before training");
    };

    auto* train_cmd = app.add_subcommand("train", "train a detector and save it");
    std::string train_csv, train_classifier = "random-forest", train_set = "All", train_out;
    bool train_highpass = false, train_mmse = false, train_cfs = false;
    int train_k = 5, train_trees = 100;
    std::uint64_t train_seed = 0;
    add_trainer_flags(train_cmd, train_csv, train_classifier, train_set, train_highpass,
                      train_mmse, train_k, train_trees, train_seed, train_cfs);
    train_cmd->add_option("--out", train_out, "model output path")->required();

    auto* cv_cmd = app.add_subcommand("cv", "cross-validate a detector configuration");
    std::string cv_csv, cv_classifier = "random-forest", cv_set = "All";
    bool cv_highpass = false, cv_mmse = false, cv_cfs = false, cv_sweep_k = false;
    int cv_k = 5, cv_trees = 100, cv_folds = 10;
    std::uint64_t cv_seed = 0;
    add_trainer_flags(cv_cmd, cv_csv, cv_classifier, cv_set, cv_highpass, cv_mmse, cv_k, cv_trees,
                      cv_seed, cv_cfs);
    cv_cmd->add_option("--folds", cv_folds, "fold count");
    cv_cmd->add_flag("--sweep-k", cv_sweep_k, "report every odd k from 1 to 25 and the best");

    // gate-rain
    auto* gate = app.add_subcommand("gate-rain", "drop rain-contaminated segments");
    std::vector<std::string> gate_inputs;
    std::string gate_model, gate_out;
    double gate_threshold = 0.5;
    unsigned gate_jobs = 1;
    gate->add_option("inputs", gate_inputs, "wav files or directories")->required();
    gate->add_option("--model", gate_model, "trained rain detector")->required();
    gate->add_option("--threshold", gate_threshold, "drop when probability >= threshold");
    gate->add_option("--out", gate_out, "directory for kept segments");
    gate->add_option("--jobs", gate_jobs, "worker threads");

    // filter-cicada
    auto* cicada = app.add_subcommand("filter-cicada", "band-stop cicada choruses");
    std::vector<std::string> cicada_inputs;
    std::string cicada_model, cicada_out;
    double cicada_threshold = 0.5;
    unsigned cicada_jobs = 1;
    cicada->add_option("inputs", cicada_inputs, "wav files or directories")->required();
    cicada->add_option("--model", cicada_model, "trained cicada detector")->required();
    cicada->add_option("--threshold", cicada_threshold, "filter when probability >= threshold");
    cicada->add_option("--out", cicada_out, "directory for output segments")->required();
    cicada->add_option("--jobs", cicada_jobs, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (synth->parsed())
            return cmd_synth(synth_out, synth_n, synth_seed, rain_fraction, cicada_fraction);
        if (feat->parsed())
            return cmd_featurize(feat_inputs, feat_out, feat_arff, feat_set, feat_highpass,
                                 feat_mmse, feat_labels, feat_label, feat_jobs);
        if (train_cmd->parsed())
            return cmd_train(train_csv, train_out,
                             trainer_config(train_classifier, train_set, train_highpass,
                                            train_mmse, train_k, train_trees, train_seed,
                                            train_cfs));
        if (cv_cmd->parsed())
            return cmd_cv(cv_csv,
                          trainer_config(cv_classifier, cv_set, cv_highpass, cv_mmse, cv_k,
                                         cv_trees, cv_seed, cv_cfs),
                          cv_folds, cv_sweep_k);
        if (gate->parsed())
            return cmd_gate_rain(gate_inputs, gate_model, gate_threshold, gate_out, gate_jobs);
        if (cicada->parsed())
            return cmd_filter_cicada(cicada_inputs, cicada_model, cicada_threshold, cicada_out,
                                     cicada_jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
