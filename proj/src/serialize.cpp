#include "radlearn/serialize.hpp"

#include <fstream>

#include "radlearn/error.hpp"

namespace radlearn {

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed ") + what + ": " + e.what());
    }
}

Json snapshot_json(const LayerSnapshot& s) {
    return Json{{"name", s.name},
                {"weight_norm", s.weight_norm},
                {"grad_norm", s.grad_norm},
                {"delta_norm", s.delta_norm},
                {"weight_range", {s.weight_min, s.weight_max}},
                {"grad_range", {s.grad_min, s.grad_max}},
                {"weight_hist", s.weight_hist},
                {"grad_hist", s.grad_hist}};
}

LayerSnapshot snapshot_from(const Json& j) {
    LayerSnapshot s;
    s.name = j.at("name").get<std::string>();
    s.weight_norm = j.at("weight_norm").get<double>();
    s.grad_norm = j.at("grad_norm").get<double>();
    s.delta_norm = j.at("delta_norm").get<double>();
    s.weight_min = j.at("weight_range").at(0).get<double>();
    s.weight_max = j.at("weight_range").at(1).get<double>();
    s.grad_min = j.at("grad_range").at(0).get<double>();
    s.grad_max = j.at("grad_range").at(1).get<double>();
    s.weight_hist = j.at("weight_hist").get<std::vector<std::uint64_t>>();
    s.grad_hist = j.at("grad_hist").get<std::vector<std::uint64_t>>();
    return s;
}

Json metrics_json(const EpochMetrics& m) {
    return Json{{"loss", m.loss}, {"accuracy", m.accuracy}, {"sensitivity", m.sensitivity}, {"specificity", m.specificity}};
}

EpochMetrics metrics_from(const Json& j) {
    return {j.at("loss").get<double>(), j.at("accuracy").get<double>(), j.at("sensitivity").get<double>(),
            j.at("specificity").get<double>()};
}

}  // namespace

Json to_json(const ForestModel& m) {
    Json trees = Json::array();
    for (const auto& t : m.trees) {
        Json nodes = Json::array();
        for (const auto& n : t.nodes) {
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.prob1});
        }
        trees.push_back(std::move(nodes));
    }
    return Json{{"feature_names", m.feature_names},
                {"importances", m.importances},
                {"node_layout", {"feature", "threshold", "left", "right", "prob1"}},
                {"trees", std::move(trees)}};
}

ForestModel forest_from_json(const Json& j) {
    return guarded("forest model", [&] {
        ForestModel m;
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.importances = j.at("importances").get<std::vector<double>>();
        for (const auto& tj : j.at("trees")) {
            DecisionTree t;
            for (const auto& nj : tj) {
                t.nodes.push_back({nj.at(0).get<int>(), nj.at(1).get<double>(), nj.at(2).get<int>(), nj.at(3).get<int>(),
                                   nj.at(4).get<double>()});
            }
            m.trees.push_back(std::move(t));
        }
        return m;
    });
}

Json to_json(const RfeTrace& t) {
    Json steps = Json::array();
    for (const auto& s : t.steps) {
        steps.push_back({{"n_features", s.subset.size()}, {"cv_accuracy", s.cv_accuracy}, {"subset", s.subset}});
    }
    return Json{{"initial_ranking", t.initial_ranking},
                {"eliminated_order", t.eliminated_order},
                {"full_cv_accuracy", t.full_cv_accuracy},
                {"steps", std::move(steps)}};
}

RfeTrace rfe_trace_from_json(const Json& j) {
    return guarded("RFE trace", [&] {
        RfeTrace t;
        t.initial_ranking = j.at("initial_ranking").get<std::vector<std::string>>();
        t.eliminated_order = j.at("eliminated_order").get<std::vector<std::string>>();
        t.full_cv_accuracy = j.at("full_cv_accuracy").get<double>();
        for (const auto& s : j.at("steps")) {
            t.steps.push_back({s.at("subset").get<std::vector<std::string>>(), s.at("cv_accuracy").get<double>()});
        }
        return t;
    });
}

Json to_json(const Dendrogram& d) {
    Json merges = Json::array();
    for (const auto& m : d.merges) merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
    return Json{{"leaf_names", d.leaf_names}, {"merges", std::move(merges)}};
}

Json to_json(const TrainTrace& t) {
    Json initial = Json::array();
    for (const auto& s : t.initial) initial.push_back(snapshot_json(s));
    Json epochs = Json::array();
    for (const auto& e : t.epochs) {
        Json layers = Json::array();
        for (const auto& s : e.layers) layers.push_back(snapshot_json(s));
        Json ej{{"epoch", e.epoch}, {"train", metrics_json(e.train)}};
        ej["validation"] = e.validation ? metrics_json(*e.validation) : Json(nullptr);
        ej["layers"] = std::move(layers);
        epochs.push_back(std::move(ej));
    }
    return Json{{"histogram_bins", 32}, {"initial", std::move(initial)}, {"epochs", std::move(epochs)}};
}

TrainTrace train_trace_from_json(const Json& j) {
    return guarded("train trace", [&] {
        TrainTrace t;
        for (const auto& s : j.at("initial")) t.initial.push_back(snapshot_from(s));
        for (const auto& ej : j.at("epochs")) {
            EpochRecord e;
            e.epoch = ej.at("epoch").get<std::size_t>();
            e.train = metrics_from(ej.at("train"));
            if (!ej.at("validation").is_null()) e.validation = metrics_from(ej.at("validation"));
            for (const auto& s : ej.at("layers")) e.layers.push_back(snapshot_from(s));
            t.epochs.push_back(std::move(e));
        }
        return t;
    });
}

Json to_json(const DiagnosisReport& r) {
    Json layers = Json::array();
    for (const auto& l : r.layers) {
        layers.push_back({{"name", l.name},
                          {"static_weights", l.static_weights},
                          {"dead_gradient", l.dead_gradient},
                          {"mean_delta_norm", l.mean_delta_norm},
                          {"mean_grad_norm", l.mean_grad_norm}});
    }
    return Json{{"verdict", to_string(r.verdict)},
                {"class_flipping", r.class_flipping},
                {"class_flipping_detector", "pearson(sensitivity, specificity) below threshold with both ranges above amplitude"},
                {"sens_spec_source", r.sens_spec_source},
                {"sens_spec_correlation", r.sens_spec_correlation},
                {"layers", std::move(layers)}};
}

Json to_json(const SignificanceReport& r) {
    Json features = Json::array();
    for (const auto& f : r.features) {
        features.push_back({{"name", f.name}, {"p_value", f.p_value}, {"u_statistic", f.u_statistic}, {"significant", f.significant}});
    }
    return Json{{"alpha", r.alpha}, {"n_significant", r.significant_names().size()}, {"features", std::move(features)}};
}

SignificanceReport significance_from_json(const Json& j) {
    return guarded("significance report", [&] {
        SignificanceReport r;
        r.alpha = j.at("alpha").get<double>();
        for (const auto& f : j.at("features")) {
            r.features.push_back({f.at("name").get<std::string>(), f.at("p_value").get<double>(),
                                  f.at("u_statistic").get<double>(), f.at("significant").get<bool>()});
        }
        return r;
    });
}

Json to_json(const IntersectionSummary& s) {
    Json pairwise = Json::array();
    for (const auto& [key, n] : s.pairwise) pairwise.push_back({{"a", key.first}, {"b", key.second}, {"common", n}});
    return Json{{"pairwise", std::move(pairwise)}, {"common", s.common}, {"union_size", s.union_size}};
}

void write_json(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return guarded("JSON document", [&] { return Json::parse(in); });
}

}  // namespace radlearn
