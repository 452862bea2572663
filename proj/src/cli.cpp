#include "radlearn/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "radlearn/cluster.hpp"
#include "radlearn/error.hpp"
#include "radlearn/metrics.hpp"
#include "radlearn/random.hpp"
#include "radlearn/stats.hpp"
#include "radlearn/table_io.hpp"

namespace radlearn {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

namespace {

void reject_unknown(const Json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown config key '" + where + "." + key + "'");
        }
    }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
    }
}

template <typename T>
void require_positive(T value, const std::string& name) {
    if (!(value > T{0})) throw ConfigError("config value '" + name + "' must be positive");
}

LossKind parse_loss(const std::string& s) {
    if (s == "bce_logit") return LossKind::BceLogit;
    if (s == "hinge") return LossKind::Hinge;
    throw ConfigError("train.loss must be 'bce_logit' or 'hinge'");
}

OptimizerKind parse_optimizer(const std::string& s) {
    if (s == "adam") return OptimizerKind::Adam;
    if (s == "rmsprop") return OptimizerKind::RmsProp;
    throw ConfigError("train.optimizer must be 'adam' or 'rmsprop'");
}

}  // namespace

PipelineConfig parse_config(const Json& doc) {
    PipelineConfig cfg;
    reject_unknown(doc, {"phantom", "extraction", "filter", "forest", "rfe", "cluster", "train", "diagnose", "seeds"}, "config");

    if (doc.contains("phantom")) {
        const auto& s = doc["phantom"];
        reject_unknown(s, {"n_samples_per_class", "dims", "texture_amplitude", "noise_sigma", "modality"}, "phantom");
        read(s, "n_samples_per_class", cfg.phantom.n_samples_per_class, "phantom");
        if (s.contains("dims")) {
            std::vector<std::size_t> d;
            read(s, "dims", d, "phantom");
            if (d.size() != 3) throw ConfigError("phantom.dims needs 3 entries");
            cfg.phantom.dims = {d[0], d[1], d[2]};
        }
        read(s, "texture_amplitude", cfg.phantom.texture_amplitude, "phantom");
        read(s, "noise_sigma", cfg.phantom.noise_sigma, "phantom");
        read(s, "modality", cfg.phantom.modality, "phantom");
        require_positive(cfg.phantom.n_samples_per_class, "phantom.n_samples_per_class");
    }
    if (doc.contains("extraction")) {
        const auto& s = doc["extraction"];
        reject_unknown(s, {"n_bins", "distance", "alpha"}, "extraction");
        read(s, "n_bins", cfg.extraction.n_bins, "extraction");
        read(s, "distance", cfg.extraction.distance, "extraction");
        read(s, "alpha", cfg.extraction.alpha, "extraction");
        require_positive(cfg.extraction.n_bins, "extraction.n_bins");
        require_positive(cfg.extraction.distance, "extraction.distance");
        if (cfg.extraction.alpha < 0) throw ConfigError("extraction.alpha must be >= 0");
    }
    if (doc.contains("filter")) {
        const auto& s = doc["filter"];
        reject_unknown(s, {"alpha"}, "filter");
        read(s, "alpha", cfg.filter_alpha, "filter");
    }
    if (doc.contains("forest")) {
        const auto& s = doc["forest"];
        reject_unknown(s, {"n_trees", "max_depth", "min_samples_leaf", "features_per_split", "bootstrap"}, "forest");
        read(s, "n_trees", cfg.forest.n_trees, "forest");
        if (s.contains("max_depth") && !s["max_depth"].is_null()) {
            std::size_t d = 0;
            read(s, "max_depth", d, "forest");
            require_positive(d, "forest.max_depth");
            cfg.forest.max_depth = d;
        }
        read(s, "min_samples_leaf", cfg.forest.min_samples_leaf, "forest");
        if (s.contains("features_per_split")) {
            const auto& f = s["features_per_split"];
            if (f.is_string() && f.get<std::string>() == "sqrt") {
                cfg.forest.features_per_split.reset();
            } else if (f.is_number_unsigned() && f.get<std::size_t>() > 0) {
                cfg.forest.features_per_split = f.get<std::size_t>();
            } else {
                throw ConfigError("forest.features_per_split must be \"sqrt\" or a positive integer");
            }
        }
        read(s, "bootstrap", cfg.forest.bootstrap, "forest");
        require_positive(cfg.forest.n_trees, "forest.n_trees");
        require_positive(cfg.forest.min_samples_leaf, "forest.min_samples_leaf");
    }
    if (doc.contains("rfe")) {
        const auto& s = doc["rfe"];
        reject_unknown(s, {"k_folds", "rerank_each_step", "use_significant"}, "rfe");
        read(s, "k_folds", cfg.rfe.k_folds, "rfe");
        read(s, "rerank_each_step", cfg.rfe.rerank_each_step, "rfe");
        read(s, "use_significant", cfg.rfe_use_significant, "rfe");
        require_positive(cfg.rfe.k_folds, "rfe.k_folds");
    }
    if (doc.contains("cluster")) {
        const auto& s = doc["cluster"];
        reject_unknown(s, {"k"}, "cluster");
        read(s, "k", cfg.cluster_k, "cluster");
        require_positive(cfg.cluster_k, "cluster.k");
    }
    if (doc.contains("train")) {
        const auto& s = doc["train"];
        reject_unknown(s, {"height", "width", "conv_channels", "hidden_dense", "init_scale", "loss", "optimizer",
                           "learning_rate", "batch_size", "epochs", "freeze_layers", "n_samples", "noise_sigma",
                           "validation_folds"},
                       "train");
        read(s, "height", cfg.net.height, "train");
        read(s, "width", cfg.net.width, "train");
        read(s, "conv_channels", cfg.net.conv_channels, "train");
        read(s, "hidden_dense", cfg.net.hidden_dense, "train");
        read(s, "init_scale", cfg.net.init_scale, "train");
        std::string loss = "bce_logit", optimizer = "adam";
        read(s, "loss", loss, "train");
        read(s, "optimizer", optimizer, "train");
        cfg.train.loss = parse_loss(loss);
        cfg.train.optimizer = parse_optimizer(optimizer);
        read(s, "learning_rate", cfg.train.learning_rate, "train");
        read(s, "batch_size", cfg.train.batch_size, "train");
        read(s, "epochs", cfg.train.epochs, "train");
        read(s, "freeze_layers", cfg.train.freeze_layers, "train");
        read(s, "n_samples", cfg.train_data.n_samples, "train");
        read(s, "noise_sigma", cfg.train_data.noise_sigma, "train");
        read(s, "validation_folds", cfg.train_data.validation_folds, "train");
        if (cfg.train.learning_rate < 0.0) throw ConfigError("train.learning_rate must be >= 0");
        require_positive(cfg.train.batch_size, "train.batch_size");
        require_positive(cfg.train.epochs, "train.epochs");
        if (cfg.train_data.validation_folds == 1) throw ConfigError("train.validation_folds must be 0 or >= 2");
    }
    if (doc.contains("diagnose")) {
        const auto& s = doc["diagnose"];
        reject_unknown(s, {"static_rel_tol", "dead_abs_tol", "dead_epoch_quorum", "flip_corr_thresh", "flip_amp_thresh",
                           "static_layer_quorum"},
                       "diagnose");
        read(s, "static_rel_tol", cfg.diagnose.static_rel_tol, "diagnose");
        read(s, "dead_abs_tol", cfg.diagnose.dead_abs_tol, "diagnose");
        read(s, "dead_epoch_quorum", cfg.diagnose.dead_epoch_quorum, "diagnose");
        read(s, "flip_corr_thresh", cfg.diagnose.flip_corr_thresh, "diagnose");
        read(s, "flip_amp_thresh", cfg.diagnose.flip_amp_thresh, "diagnose");
        read(s, "static_layer_quorum", cfg.diagnose.static_layer_quorum, "diagnose");
    }
    if (doc.contains("seeds")) {
        const auto& s = doc["seeds"];
        reject_unknown(s, {"phantom", "forest", "cv", "net", "train", "data"}, "seeds");
        read(s, "phantom", cfg.seeds.phantom, "seeds");
        read(s, "forest", cfg.seeds.forest, "seeds");
        read(s, "cv", cfg.seeds.cv, "seeds");
        read(s, "net", cfg.seeds.net, "seeds");
        read(s, "train", cfg.seeds.train, "seeds");
        read(s, "data", cfg.seeds.data, "seeds");
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc);
}

Json config_to_json(const PipelineConfig& c) {
    const auto loss = c.train.loss == LossKind::BceLogit ? "bce_logit" : "hinge";
    const auto opt = c.train.optimizer == OptimizerKind::Adam ? "adam" : "rmsprop";
    Json forest{{"n_trees", c.forest.n_trees},
                {"max_depth", c.forest.max_depth ? Json(*c.forest.max_depth) : Json(nullptr)},
                {"min_samples_leaf", c.forest.min_samples_leaf},
                {"features_per_split", c.forest.features_per_split ? Json(*c.forest.features_per_split) : Json("sqrt")},
                {"bootstrap", c.forest.bootstrap}};
    return Json{
        {"phantom",
         {{"n_samples_per_class", c.phantom.n_samples_per_class},
          {"dims", {c.phantom.dims.x, c.phantom.dims.y, c.phantom.dims.z}},
          {"texture_amplitude", c.phantom.texture_amplitude},
          {"noise_sigma", c.phantom.noise_sigma},
          {"modality", c.phantom.modality}}},
        {"extraction", {{"n_bins", c.extraction.n_bins}, {"distance", c.extraction.distance}, {"alpha", c.extraction.alpha}}},
        {"filter", {{"alpha", c.filter_alpha}}},
        {"forest", forest},
        {"rfe", {{"k_folds", c.rfe.k_folds}, {"rerank_each_step", c.rfe.rerank_each_step}, {"use_significant", c.rfe_use_significant}}},
        {"cluster", {{"k", c.cluster_k}}},
        {"train",
         {{"height", c.net.height},
          {"width", c.net.width},
          {"conv_channels", c.net.conv_channels},
          {"hidden_dense", c.net.hidden_dense},
          {"init_scale", c.net.init_scale},
          {"loss", loss},
          {"optimizer", opt},
          {"learning_rate", c.train.learning_rate},
          {"batch_size", c.train.batch_size},
          {"epochs", c.train.epochs},
          {"freeze_layers", c.train.freeze_layers},
          {"n_samples", c.train_data.n_samples},
          {"noise_sigma", c.train_data.noise_sigma},
          {"validation_folds", c.train_data.validation_folds}}},
        {"diagnose",
         {{"static_rel_tol", c.diagnose.static_rel_tol},
          {"dead_abs_tol", c.diagnose.dead_abs_tol},
          {"dead_epoch_quorum", c.diagnose.dead_epoch_quorum},
          {"flip_corr_thresh", c.diagnose.flip_corr_thresh},
          {"flip_amp_thresh", c.diagnose.flip_amp_thresh},
          {"static_layer_quorum", c.diagnose.static_layer_quorum}}},
        {"seeds",
         {{"phantom", c.seeds.phantom},
          {"forest", c.seeds.forest},
          {"cv", c.seeds.cv},
          {"net", c.seeds.net},
          {"train", c.seeds.train},
          {"data", c.seeds.data}}},
    };
}

void override_seeds(PipelineConfig& cfg, std::uint64_t seed) {
    cfg.seeds.phantom = derive_seed(seed, 0);
    cfg.seeds.forest = derive_seed(seed, 1);
    cfg.seeds.cv = derive_seed(seed, 2);
    cfg.seeds.net = derive_seed(seed, 3);
    cfg.seeds.train = derive_seed(seed, 4);
    cfg.seeds.data = derive_seed(seed, 5);
}

// ---------------------------------------------------------------- subcommands

namespace {

struct Invocation {
    PipelineConfig cfg;
    std::vector<std::string> inputs;
    fs::path out;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void require_inputs(const Invocation& inv, std::size_t min, const char* usage) {
    if (inv.inputs.size() < min) throw ConfigError(std::string("missing --in: ") + usage);
}

ForestConfig forest_config(const PipelineConfig& cfg) {
    ForestConfig f = cfg.forest;
    f.seed = cfg.seeds.forest;
    return f;
}

struct ManifestRow {
    std::string sample_id;
    int label = 0;
    fs::path base;
};

std::vector<ManifestRow> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"sample_id", "label", "path_base", "modality"}) {
        throw ValidationError("manifest header must be sample_id,label,path_base,modality");
    }
    std::vector<ManifestRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) throw ValidationError("ragged manifest row: " + line);
        if (cells[1] != "0" && cells[1] != "1") throw ValidationError("manifest label must be 0 or 1");
        rows.push_back({cells[0], cells[1] == "1" ? 1 : 0, path.parent_path() / cells[2]});
    }
    if (rows.empty()) throw ValidationError("manifest lists no samples");
    return rows;
}

void cmd_phantom(const Invocation& inv) {
    PhantomSpec spec = inv.cfg.phantom;
    spec.seed = inv.cfg.seeds.phantom;
    const auto samples = generate_phantom(spec);
    auto manifest = open_out(inv.out / "manifest.csv");
    manifest << "sample_id,label,path_base,modality\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "sample_%04zu", i);
        save_volume(samples[i].volume, inv.out / id);
        save_mask(samples[i].mask, inv.out / id);
        manifest << id << ',' << samples[i].label << ',' << id << ',' << samples[i].volume.modality << '\n';
    }
    if (!manifest) throw IoError("manifest write failed");
}

void cmd_extract(const Invocation& inv) {
    require_inputs(inv, 1, "extract --in <manifest.csv>");
    FeatureTable t;
    for (const auto& row : read_manifest(inv.inputs[0])) {
        const Volume v = load_volume(row.base);
        const RoiMask m = load_mask(row.base, v.dims);
        const FeatureVector f = extract_all(v, m, inv.cfg.extraction);
        if (t.feature_names.empty()) {
            for (const auto& [name, value] : f.entries) t.feature_names.push_back(name);
        }
        std::vector<double> values;
        for (const auto& [name, value] : f.entries) values.push_back(value);
        t.sample_ids.push_back(row.sample_id);
        t.labels.push_back(row.label);
        t.values.push_back(std::move(values));
    }
    write_feature_table(t, inv.out / "features.csv");
}

std::pair<std::string, fs::path> modality_input(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
    return {fs::path(arg).stem().string(), arg};
}

void cmd_filter(const Invocation& inv) {
    require_inputs(inv, 1, "filter --in [MODALITY=]<features.csv>...");
    Json tables = Json::object();
    std::map<std::string, std::set<std::string>> sets;
    for (const auto& arg : inv.inputs) {
        const auto [modality, path] = modality_input(arg);
        if (sets.count(modality)) throw ConfigError("duplicate modality name " + modality);
        const auto report = filter_significant(read_feature_table(path), inv.cfg.filter_alpha);
        const auto names = report.significant_names();
        sets[modality] = {names.begin(), names.end()};
        tables[modality] = to_json(report);
    }
    Json doc{{"alpha", inv.cfg.filter_alpha}, {"tables", std::move(tables)}};
    doc["intersection"] = sets.size() >= 2 ? to_json(modality_intersection(sets)) : Json(nullptr);
    write_json(doc, inv.out / "significance.json");
}

/// Table restricted to significant features when a significance document is given.
FeatureTable table_for_selection(const Invocation& inv) {
    FeatureTable t = read_feature_table(inv.inputs[0]);
    if (inv.inputs.size() < 2 || !inv.cfg.rfe_use_significant) return t;
    const Json doc = read_json(inv.inputs[1]);
    if (!doc.contains("tables") || !doc["tables"].is_object() || doc["tables"].empty()) {
        throw ValidationError("significance document has no tables");
    }
    const auto stem = fs::path(inv.inputs[0]).stem().string();
    const Json* report = nullptr;
    if (doc["tables"].contains(stem)) {
        report = &doc["tables"][stem];
    } else if (doc["tables"].size() == 1) {
        report = &doc["tables"].begin().value();
    } else {
        throw ValidationError("significance document has several tables and none named " + stem);
    }
    const auto names = significance_from_json(*report).significant_names();
    if (names.empty()) throw ValidationError("no significant features to select from");
    return t.select(names);
}

void cmd_rfe(const Invocation& inv) {
    require_inputs(inv, 1, "rfe --in <features.csv> [significance.json]");
    const FeatureTable t = table_for_selection(inv);
    RfeConfig rc = inv.cfg.rfe;
    rc.seed = inv.cfg.seeds.cv;
    const RfeTrace trace = rfe_cv(t, forest_config(inv.cfg), rc);
    const RfeStep& best = select_best(trace);
    Json doc = to_json(trace);
    doc["best"] = {{"n_features", best.subset.size()}, {"cv_accuracy", best.cv_accuracy}, {"subset", best.subset}};
    write_json(doc, inv.out / "rfe_trace.json");

    auto curve = open_out(inv.out / "rfe_curve.csv");
    curve << "n_features,cv_accuracy,eliminated\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        curve << trace.steps[i].subset.size() << ',' << format_double(trace.steps[i].cv_accuracy) << ','
              << trace.eliminated_order[i] << '\n';
    }
}

std::vector<std::string> best_subset_from(const fs::path& trace_path) {
    const RfeTrace trace = rfe_trace_from_json(read_json(trace_path));
    return select_best(trace).subset;
}

void cmd_cluster(const Invocation& inv) {
    require_inputs(inv, 1, "cluster --in <features.csv> [rfe_trace.json]");
    const FeatureTable t = read_feature_table(inv.inputs[0]);
    std::vector<std::string> names = inv.inputs.size() >= 2 ? best_subset_from(inv.inputs[1]) : t.feature_names;
    if (names.size() < 2) throw ValidationError("clustering needs at least 2 features");
    std::sort(names.begin(), names.end());
    const Dendrogram dg = agglomerate(correlation_distance_matrix(t, names));
    const std::size_t k = std::min(inv.cfg.cluster_k, names.size());
    Json doc{{"linkage", "average"}, {"distance", "1 - |pearson|"}, {"dendrogram", to_json(dg)}, {"k", k}, {"clusters", cut(dg, k)}};
    write_json(doc, inv.out / "dendrogram.json");
}

bool is_checkpoint_arg(const std::string& s) {
    const std::string suffix = ".ckpt.json";
    return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_metrics_row(std::ostream& out, const EpochMetrics& m) {
    out << format_double(m.loss) << ',' << format_double(m.accuracy) << ',' << format_double(m.sensitivity) << ','
        << format_double(m.specificity);
}

void cmd_train(const Invocation& inv) {
    const PipelineConfig& cfg = inv.cfg;
    NetConfig net = cfg.net;
    net.seed = cfg.seeds.net;
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seeds.train;

    std::optional<Checkpoint> init;
    Dataset all;
    bool have_manifest = false;
    for (const auto& arg : inv.inputs) {
        if (is_checkpoint_arg(arg)) {
            init = load_checkpoint(arg.substr(0, arg.size() - std::string(".ckpt.json").size()));
        } else {
            for (const auto& row : read_manifest(arg)) {
                const Volume v = load_volume(row.base);
                const RoiMask m = load_mask(row.base, v.dims);
                all.images.push_back(axial_slice(v, m, net.height, net.width));
                all.labels.push_back(row.label);
            }
            have_manifest = true;
        }
    }
    if (!have_manifest) {
        all = make_two_blob_dataset(cfg.train_data.n_samples, net.height, net.width, cfg.seeds.data, cfg.train_data.noise_sigma);
    }

    Dataset train_set, val_set;
    if (cfg.train_data.validation_folds >= 2) {
        const auto folds = stratified_kfold(all.labels, cfg.train_data.validation_folds, cfg.seeds.cv);
        for (std::size_t i = 0; i < all.images.size(); ++i) {
            Dataset& d = folds.fold_of[i] == 0 ? val_set : train_set;
            d.images.push_back(all.images[i]);
            d.labels.push_back(all.labels[i]);
        }
    } else {
        train_set = std::move(all);
    }

    const TrainResult res = train(train_set, net, tc, init, val_set.images.empty() ? nullptr : &val_set);
    save_checkpoint(make_checkpoint(res.network), inv.out / "model");
    write_json(to_json(res.trace), inv.out / "trace.json");

    auto csv = open_out(inv.out / "metrics.csv");
    csv << "epoch,train_loss,train_accuracy,train_sensitivity,train_specificity,"
           "val_loss,val_accuracy,val_sensitivity,val_specificity\n";
    for (const auto& e : res.trace.epochs) {
        csv << e.epoch << ',';
        write_metrics_row(csv, e.train);
        csv << ',';
        if (e.validation) {
            write_metrics_row(csv, *e.validation);
        } else {
            csv << ",,,";
        }
        csv << '\n';
    }
}

void cmd_diagnose(const Invocation& inv) {
    require_inputs(inv, 1, "diagnose --in <trace.json>");
    const TrainTrace trace = train_trace_from_json(read_json(inv.inputs[0]));
    write_json(to_json(diagnose(trace, inv.cfg.diagnose)), inv.out / "diagnosis.json");

    auto curve = open_out(inv.out / "learning_curve.csv");
    curve << "epoch,train_accuracy,train_sensitivity,train_specificity,val_accuracy,val_sensitivity,val_specificity\n";
    for (const auto& e : trace.epochs) {
        curve << e.epoch << ',' << format_double(e.train.accuracy) << ',' << format_double(e.train.sensitivity) << ','
              << format_double(e.train.specificity) << ',';
        if (e.validation) {
            curve << format_double(e.validation->accuracy) << ',' << format_double(e.validation->sensitivity) << ','
                  << format_double(e.validation->specificity);
        } else {
            curve << ",,";
        }
        curve << '\n';
    }

    auto hist = open_out(inv.out / "histograms.csv");
    hist << "epoch,layer,kind,range_min,range_max,bin,count\n";
    auto emit = [&](std::size_t epoch, const LayerSnapshot& s) {
        for (std::size_t b = 0; b < s.weight_hist.size(); ++b) {
            hist << epoch << ',' << s.name << ",weight," << format_double(s.weight_min) << ',' << format_double(s.weight_max)
                 << ',' << b << ',' << s.weight_hist[b] << '\n';
        }
        for (std::size_t b = 0; b < s.grad_hist.size(); ++b) {
            hist << epoch << ',' << s.name << ",gradient," << format_double(s.grad_min) << ',' << format_double(s.grad_max)
                 << ',' << b << ',' << s.grad_hist[b] << '\n';
        }
    };
    for (const auto& s : trace.initial) emit(0, s);
    for (const auto& e : trace.epochs)
        for (const auto& s : e.layers) emit(e.epoch, s);
}

struct ReportColumn {
    ClassificationMetrics cm;
    double auroc = 0.0;
};

ReportColumn cv_report(const FeatureTable& t, const ForestConfig& forest, const FoldSplit& folds) {
    const auto proba = cv_probabilities(t, forest, folds);
    std::vector<int> preds;
    for (double p : proba) preds.push_back(p > 0.5 ? 1 : 0);
    return {metrics(confusion(preds, t.labels)), auroc(proba, t.labels)};
}

void cmd_report(const Invocation& inv) {
    require_inputs(inv, 2, "report --in <features.csv> <rfe_trace.json> [significance.json]");
    Invocation selection = inv;
    selection.inputs = {inv.inputs[0]};
    if (inv.inputs.size() >= 3) selection.inputs.push_back(inv.inputs[2]);
    const FeatureTable all = table_for_selection(selection);
    const auto top_names = best_subset_from(inv.inputs[1]);
    if (top_names.empty()) throw ValidationError("selected subset is empty; nothing to compare");
    const FeatureTable top = all.select(top_names);

    const auto folds = stratified_kfold(all.labels, inv.cfg.rfe.k_folds, inv.cfg.seeds.cv);
    const auto forest = forest_config(inv.cfg);
    const ReportColumn a = cv_report(all, forest, folds);
    const ReportColumn b = cv_report(top, forest, folds);

    const std::vector<std::pair<std::string, std::pair<double, double>>> rows{
        {"Accuracy", {a.cm.accuracy, b.cm.accuracy}},
        {"F1-Score", {a.cm.f1, b.cm.f1}},
        {"AUROC", {a.auroc, b.auroc}},
        {"Precision", {a.cm.precision, b.cm.precision}},
        {"Recall", {a.cm.recall, b.cm.recall}},
    };
    Json jrows = Json::array();
    auto csv = open_out(inv.out / "report.csv");
    csv << "metric,all_features,top_features\n";
    for (const auto& [name, v] : rows) {
        jrows.push_back({{"metric", name}, {"all_features", v.first}, {"top_features", v.second}});
        csv << name << ',' << format_double(v.first) << ',' << format_double(v.second) << '\n';
    }
    write_json(Json{{"n_all_features", all.cols()}, {"n_top_features", top.cols()}, {"top_features", top_names},
                    {"k_folds", inv.cfg.rfe.k_folds}, {"rows", std::move(jrows)}},
               inv.out / "report.json");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"radlearn: radiomics feature selection and learnability diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> inputs;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;

    struct Command {
        const char* name;
        const char* help;
        void (*fn)(const Invocation&);
    };
    const std::vector<Command> commands{
        {"phantom", "generate synthetic volumes, masks and a manifest", cmd_phantom},
        {"extract", "extract the 94 radiomics features for every manifest entry", cmd_extract},
        {"filter", "Mann-Whitney U significance per feature and cross-modality intersection", cmd_filter},
        {"rfe", "recursive feature elimination with cross-validated accuracy", cmd_rfe},
        {"cluster", "correlation-distance dendrogram of selected features", cmd_cluster},
        {"train", "train the reference network and record a per-epoch trace", cmd_train},
        {"diagnose", "static-layer, dead-gradient and class-flip diagnosis of a trace", cmd_diagnose},
        {"report", "all-features vs top-features cross-validated comparison", cmd_report},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "pipeline config JSON");
        sub->add_option("--in", inputs, "input files")->expected(1, -1);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override every seed");
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), const_cast<char**>(argv.data()));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        Invocation inv;
        if (!config_path.empty()) inv.cfg = load_config(config_path);
        if (seed) override_seeds(inv.cfg, *seed);
        inv.inputs = inputs;
        inv.out = out_dir;
        std::error_code ec;
        fs::create_directories(inv.out, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
        for (const auto& c : commands) {
            if (app.got_subcommand(c.name)) c.fn(inv);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace radlearn
