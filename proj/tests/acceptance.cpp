// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "radlearn/cli.hpp"
#include "radlearn/cluster.hpp"
#include "radlearn/diagnostics.hpp"
#include "radlearn/metrics.hpp"
#include "radlearn/nn.hpp"
#include "radlearn/rfe.hpp"
#include "radlearn/stats.hpp"
#include "radlearn/texture.hpp"

using namespace radlearn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

Outcome feature_census() {
    Outcome o;
    const std::map<std::string, std::size_t> expected{{"FirstOrder", 9}, {"Shape2D", 10}, {"GLCM", 24}, {"GLRLM", 16},
                                                      {"GLSZM", 16},     {"NGTDM", 5},    {"GLDM", 14}};
    PhantomSpec spec;
    spec.dims = {64, 64, 64};
    double worst = 0.0;
    for (int label = 0; label < 2; ++label) {
        const auto s = render_phantom_sample(spec, label, 17 + std::uint64_t(label));
        const auto t0 = std::chrono::steady_clock::now();
        const auto fv = extract_all(s.volume, s.mask);
        worst = std::max(worst, seconds_since(t0));
        std::map<std::string, std::size_t> counts;
        for (const auto& [name, v] : fv.entries) {
            ++counts[name.substr(0, name.find('.'))];
            if (!std::isfinite(v)) o.pass = false;
        }
        if (fv.size() != 94 || counts != expected) o.pass = false;
    }
    if (worst >= 1.0) o.pass = false;
    o.detail = fmt("94 features in 9/10/24/16/16/5/14, slowest 64^3 extraction %.3f s", worst);
    return o;
}

// ---------------------------------------------------------------- 2

Outcome texture_oracles() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(2024);
    std::size_t mismatches = 0;
    double worst_real = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double fill = trial % 4 == 0 ? 1.0 : 0.5 + 0.45 * double(trial % 4) / 3.0;
        const auto q = oracle::random_quantized(gen, {4, 4, 4}, 5, fill);
        const auto dirs = oracle::half_directions();
        const auto counts = oracle::glcm(q, 1, dirs);
        if (!testing::same_counts(glcm_counts(q, 1, unique_directions()), counts, 1)) ++mismatches;
        long total = 0;
        for (const auto& [cell, n] : counts) total += n;
        if (total > 0) {
            const auto norm = glcm(q, 1);
            for (int a = 1; a <= 5; ++a)
                for (int b = 1; b <= 5; ++b) {
                    const auto it = counts.find({a, b});
                    const double want = it == counts.end() ? 0.0 : double(it->second) / double(total);
                    worst_real = std::max(worst_real, std::abs(norm(std::size_t(a - 1), std::size_t(b - 1)) - want));
                }
        }
        if (!testing::same_counts(glrlm(q), oracle::glrlm(q, dirs), 1)) ++mismatches;
        if (!testing::same_counts(glszm(q), oracle::glszm(q), 1)) ++mismatches;
        if (!testing::same_counts(gldm(q, 0), oracle::gldm(q, 0), 0)) ++mismatches;
        const auto ng = ngtdm(q);
        const auto rows = oracle::ngtdm(q);
        long n_total = 0;
        for (const auto& [level, row] : rows) n_total += row.n;
        for (int level = 1; level <= 5; ++level) {
            const auto it = rows.find(level);
            const long n = it == rows.end() ? 0 : it->second.n;
            const double s = it == rows.end() ? 0.0 : it->second.s;
            const std::size_t r = std::size_t(level - 1);
            if (ng(r, 0) != double(n)) ++mismatches;
            worst_real = std::max(worst_real, std::abs(ng(r, 2) - s));
            if (n_total > 0) worst_real = std::max(worst_real, std::abs(ng(r, 1) - double(n) / double(n_total)));
        }
    }
    const double secs = seconds_since(t0);
    o.pass = mismatches == 0 && worst_real <= 1e-12 && secs < 30.0;
    o.detail = fmt("200 volumes, %zu count mismatches, max real error %.2e, %.2f s", mismatches, worst_real, secs);
    return o;
}

// ---------------------------------------------------------------- 3

Outcome u_test_exactness() {
    Outcome o;
    std::mt19937_64 gen(33);
    std::size_t u_bad = 0, cases = 0;
    double worst_p = 0.0;
    for (std::size_t n1 = 1; n1 <= 11; ++n1) {
        for (std::size_t n2 = 1; n1 + n2 <= 12; ++n2) {
            for (int rep = 0; rep < 1000; ++rep) {
                // even reps draw from a few values (ties), odd reps are continuous
                const bool tied = rep % 2 == 0;
                std::uniform_int_distribution<int> small(0, 3);
                std::normal_distribution<double> nd(0.0, 1.0);
                auto draw = [&] { return tied ? double(small(gen)) : nd(gen); };
                std::vector<double> x(n1), y(n2);
                for (auto& v : x) v = draw();
                for (auto& v : y) v = draw();
                const auto r = mann_whitney_u(x, y, UTestMethod::Exact);
                const double ux = oracle::u_pairs(x, y), uy = oracle::u_pairs(y, x);
                if (r.u_x != ux || r.u_y != uy || r.u_statistic != std::min(ux, uy)) ++u_bad;
                worst_p = std::max(worst_p, std::abs(r.p_value - oracle::exact_u_p(x, y)));
                ++cases;
            }
        }
    }
    o.pass = u_bad == 0 && worst_p <= 1e-12;
    o.detail = fmt("%zu samples, %zu U mismatches, max |p - enumeration| %.2e", cases, u_bad, worst_p);
    return o;
}

// ---------------------------------------------------------------- 4

Outcome auroc_identity() {
    std::mt19937_64 gen(44);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 2 + gen() % 60;
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        std::uniform_int_distribution<int> coarse(0, 5);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rep % 2 ? double(coarse(gen)) / 5.0 : std::uniform_real_distribution<double>(0, 1)(gen);
            labels[i] = int(gen() % 2);
        }
        labels[0] = 0;
        labels[1] = 1;
        std::vector<double> pos, neg;
        for (std::size_t i = 0; i < n; ++i) (labels[i] ? pos : neg).push_back(scores[i]);
        const double u_pos = oracle::u_pairs(pos, neg);
        worst = std::max(worst, std::abs(auroc(scores, labels) - u_pos / double(pos.size() * neg.size())));
    }
    return {worst <= 1e-12, fmt("1000 vectors, max |auroc - U/(n1 n2)| %.2e", worst)};
}

// ---------------------------------------------------------------- 5

Outcome gradient_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_bce = 0.0, worst_hinge = 0.0;
    std::size_t max_params = 0, min_probed = 1000000;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        NetConfig cfg;
        cfg.height = 12 + 4 * (seed % 2);
        cfg.width = cfg.height;
        cfg.conv_channels = seed % 3 == 0 ? std::vector<std::size_t>{2, 4} : std::vector<std::size_t>{3};
        cfg.hidden_dense = {std::size_t(8 + seed % 5)};
        cfg.seed = seed;
        const Network net(cfg);
        max_params = std::max(max_params, net.parameter_count());

        const auto probe = make_two_blob_dataset(8, cfg.height, cfg.width, 100 + seed);
        const auto bce = gradient_check(cfg, probe, LossKind::BceLogit, 200, 1e-4, seed);
        worst_bce = std::max(worst_bce, bce.max_relative_error);
        min_probed = std::min(min_probed, bce.probed);

        // hinge: keep only probe samples well away from the margin kink
        Dataset off_kink;
        const auto pool = make_two_blob_dataset(32, cfg.height, cfg.width, 200 + seed);
        for (std::size_t i = 0; i < pool.images.size() && off_kink.images.size() < 8; ++i) {
            const double s = 2.0 * pool.labels[i] - 1.0;
            if (std::abs(1.0 - s * net.forward(pool.images[i])) > 0.1) {
                off_kink.images.push_back(pool.images[i]);
                off_kink.labels.push_back(pool.labels[i]);
            }
        }
        const auto hinge = gradient_check(net, off_kink, LossKind::Hinge, 200, 1e-4, seed);
        worst_hinge = std::max(worst_hinge, hinge.max_relative_error);
        min_probed = std::min(min_probed, hinge.probed);
    }
    const double secs = seconds_since(t0);
    const bool pass = worst_bce <= 1e-4 && worst_hinge <= 1e-4 && max_params <= 5000 && min_probed >= 200 && secs < 60.0;
    return {pass, fmt("20 seeds, max rel error bce %.2e hinge %.2e, <= %zu params, >= %zu probed, %.2f s", worst_bce,
                      worst_hinge, max_params, min_probed, secs)};
}

// ---------------------------------------------------------------- 6-8

NetConfig baseline_net() {
    NetConfig cfg;
    cfg.height = 16;
    cfg.width = 16;
    cfg.conv_channels = {4};
    cfg.hidden_dense = {16};
    cfg.seed = 6;
    return cfg;
}

TrainConfig baseline_train(double lr, std::size_t epochs) {
    TrainConfig tc;
    tc.loss = LossKind::BceLogit;
    tc.optimizer = OptimizerKind::Adam;
    tc.learning_rate = lr;
    tc.batch_size = 4;
    tc.epochs = epochs;
    tc.seed = 7;
    return tc;
}

Outcome learnable_baseline() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = make_two_blob_dataset(200, 16, 16, 8);
    const auto run = train(data, baseline_net(), baseline_train(1e-3, 200));
    std::size_t first = 0;
    double best = 0.0;
    for (const auto& e : run.trace.epochs) {
        best = std::max(best, e.train.accuracy);
        if (first == 0 && e.train.accuracy >= 0.95) first = e.epoch;
    }
    const auto report = diagnose(run.trace);
    const double secs = seconds_since(t0);
    const bool pass = first > 0 && report.verdict == Verdict::Learnable && secs < 300.0;
    return {pass, fmt("accuracy >= 0.95 first at epoch %zu (best %.3f), verdict %s, %.1f s", first, best,
                      to_string(report.verdict).c_str(), secs)};
}

/// Three layers that move every epoch, with the given validation series.
TrainTrace learnable_trace_stub(const std::vector<double>& sens, const std::vector<double>& spec) {
    TrainTrace tr;
    for (const char* name : {"conv1", "dense1", "output"}) tr.initial.push_back({.name = name, .weight_norm = 1.0});
    for (std::size_t e = 0; e < sens.size(); ++e) {
        EpochRecord rec;
        rec.epoch = e + 1;
        for (const auto& l : tr.initial) {
            rec.layers.push_back({.name = l.name, .weight_norm = 1.0, .grad_norm = 0.1, .delta_norm = 0.05});
        }
        rec.train = {0.5, 0.5, 0.5, 0.5};
        rec.validation = EpochMetrics{0.6, 0.5, sens[e], spec[e]};
        tr.epochs.push_back(std::move(rec));
    }
    return tr;
}

Outcome unlearnable_detection() {
    Outcome o;
    const auto data = make_two_blob_dataset(200, 16, 16, 8);
    const auto run = train(data, baseline_net(), baseline_train(0.0, 200));
    const auto flags = detect_static_layers(run.trace);
    const auto n_static = std::size_t(std::count(flags.begin(), flags.end(), true));
    const auto report = diagnose(run.trace);

    std::vector<double> sens, spec;
    for (int e = 0; e < 20; ++e) {
        sens.push_back(e % 2 ? 0.1 : 0.9);
        spec.push_back(e % 2 ? 0.9 : 0.1);
    }
    const auto flip = detect_class_flipping(sens, spec);
    // the same series injected as validation metrics of a healthy trace
    auto injected = learnable_trace_stub(sens, spec);
    const auto flip_report = diagnose(injected);

    o.pass = n_static == flags.size() && !flags.empty() && report.verdict == Verdict::Unlearnable && flip.flag &&
             flip.correlation <= -0.9 && flip_report.class_flipping && flip_report.verdict == Verdict::Unlearnable;
    o.detail = fmt("lr 0: %zu/%zu static, verdict %s; injected flip corr %.3f, flagged %s", n_static, flags.size(),
                   to_string(report.verdict).c_str(), flip.correlation, flip.flag && flip_report.class_flipping ? "yes" : "no");
    return o;
}

Outcome transfer_contract() {
    const auto data = make_two_blob_dataset(200, 16, 16, 9);
    const NetConfig cfg = baseline_net();
    auto tc = baseline_train(1e-3, 5);
    tc.freeze_layers = {"conv1"};
    const Network init(cfg);
    const auto run = train(data, cfg, tc);
    const bool conv_same = run.network.layer("conv1").weight == init.layer("conv1").weight &&
                           run.network.layer("conv1").bias == init.layer("conv1").bias;
    bool conv_zero = true, head_moves = true;
    double min_head = 1e300;
    for (const auto& e : run.trace.epochs) {
        for (const auto& l : e.layers) {
            if (l.name == "conv1") {
                conv_zero = conv_zero && l.delta_norm == 0.0;
            } else {
                head_moves = head_moves && l.delta_norm > 0.0;
                min_head = std::min(min_head, l.delta_norm);
            }
        }
    }
    return {conv_same && conv_zero && head_moves && run.trace.epochs.size() == 5,
            fmt("conv1 bit-identical %s, conv delta 0 every epoch %s, min head delta %.3e", conv_same ? "yes" : "no",
                conv_zero ? "yes" : "no", min_head)};
}

// ---------------------------------------------------------------- 9

FeatureTable informative_table(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    FeatureTable t;
    for (int f = 0; f < 5; ++f) t.feature_names.push_back("inf" + std::to_string(f));
    for (int f = 0; f < 45; ++f) t.feature_names.push_back("noise" + std::to_string(f));
    for (int i = 0; i < 200; ++i) {
        std::vector<double> row(50);
        double s = 0.0;
        for (int f = 0; f < 50; ++f) {
            row[std::size_t(f)] = nd(gen);
            if (f < 5) s += row[std::size_t(f)];
        }
        t.sample_ids.push_back("s" + std::to_string(i));
        t.values.push_back(std::move(row));
        t.labels.push_back(s > 0.0 ? 1 : 0);
    }
    return t;
}

Outcome rfe_bookkeeping() {
    const auto t0 = std::chrono::steady_clock::now();
    bool books = true, accuracy_ok = true;
    std::vector<std::size_t> informative;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto t = informative_table(seed);
        ForestConfig fc;
        fc.n_trees = 50;
        fc.seed = seed;
        RfeConfig rc;
        rc.k_folds = 5;
        rc.seed = seed + 100;
        const auto tr = rfe_cv(t, fc, rc);

        books = books && tr.steps.size() == t.cols();
        std::size_t prev = t.cols();
        for (const auto& s : tr.steps) {
            books = books && s.subset.size() + 1 == prev;
            prev = s.subset.size();
        }
        auto reversed = tr.initial_ranking;
        std::reverse(reversed.begin(), reversed.end());
        books = books && tr.eliminated_order == reversed;

        const auto& best = select_best(tr);
        informative.push_back(std::size_t(
            std::count_if(best.subset.begin(), best.subset.end(), [](const std::string& n) { return n.rfind("inf", 0) == 0; })));
        accuracy_ok = accuracy_ok && best.cv_accuracy >= tr.full_cv_accuracy - 0.02;
        per_seed += fmt(" %zu/%zu@%.3f(all %.3f)", informative.back(), best.subset.size(), best.cv_accuracy, tr.full_cv_accuracy);
    }
    auto sorted = informative;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t median = sorted[sorted.size() / 2];
    return {books && accuracy_ok && median >= 4,
            fmt("bookkeeping %s, median informative %zu, best vs all:%s, %.1f s", books ? "ok" : "broken", median,
                per_seed.c_str(), seconds_since(t0))};
}

// ---------------------------------------------------------------- 10

Outcome cluster_recovery() {
    std::mt19937_64 gen(10);
    std::normal_distribution<double> nd(0.0, 1.0);
    FeatureTable t;
    t.feature_names = {"a1", "b1", "c1", "a2", "b2", "c2"};
    for (int i = 0; i < 100; ++i) {
        const double a = nd(gen), b = nd(gen), c = nd(gen);
        t.values.push_back({a + 0.2 * nd(gen), b + 0.2 * nd(gen), c + 0.2 * nd(gen), a + 0.2 * nd(gen),
                            -b + 0.2 * nd(gen), c + 0.2 * nd(gen)});
        t.sample_ids.push_back(std::to_string(i));
        t.labels.push_back(i % 2);
    }
    const auto clusters = cut(agglomerate(correlation_distance_matrix(t, t.feature_names)), 3);
    const std::vector<std::vector<std::string>> want{{"a1", "a2"}, {"b1", "b2"}, {"c1", "c2"}};
    std::string got;
    for (const auto& c : clusters) {
        got += " {";
        for (const auto& n : c) got += n + (n == c.back() ? "" : ",");
        got += "}";
    }
    return {clusters == want, "clusters" + got};
}

// ---------------------------------------------------------------- 11

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        files[fs::relative(e.path(), dir).string()] = testing::slurp(e.path());
    }
    return files;
}

int run_pipeline(const fs::path& dir, const std::string& cfg) {
    const auto d = dir.string();
    auto in = [&](const char* f) { return (dir / f).string(); };
    const std::vector<std::vector<std::string>> steps{
        {"phantom", "--config", cfg, "--out", d},
        {"extract", "--config", cfg, "--in", in("manifest.csv"), "--out", d},
        {"filter", "--config", cfg, "--in", "T2=" + in("features.csv"), "--out", d},
        {"rfe", "--config", cfg, "--in", in("features.csv"), in("significance.json"), "--out", d},
        {"cluster", "--config", cfg, "--in", in("features.csv"), "--out", d},
        {"report", "--config", cfg, "--in", in("features.csv"), in("rfe_trace.json"), in("significance.json"), "--out", d},
        {"train", "--config", cfg, "--in", in("manifest.csv"), "--out", d},
        {"diagnose", "--config", cfg, "--in", in("trace.json"), "--out", d},
        {"train", "--config", cfg, "--in", in("model.ckpt.json"), "--out", (dir / "tuned").string()},
    };
    for (auto args : steps) {
        args.insert(args.begin(), "radlearn");
        if (const int rc = run_cli(args); rc != kExitOk) return rc;
    }
    return kExitOk;
}

Outcome cli_determinism() {
    const auto root = testing::scratch_dir("acceptance_determinism");
    const auto cfg = root / "config.json";
    testing::spit(cfg, R"({
  "phantom": {"n_samples_per_class": 8, "dims": [16, 16, 16]},
  "forest": {"n_trees": 20},
  "rfe": {"k_folds": 3},
  "train": {"height": 8, "width": 8, "conv_channels": [2], "hidden_dense": [4], "epochs": 3,
            "n_samples": 40, "validation_folds": 4, "learning_rate": 0.001}
})");
    const int rc_a = run_pipeline(root / "a", cfg.string());
    const int rc_b = run_pipeline(root / "b", cfg.string());
    if (rc_a != kExitOk || rc_b != kExitOk) return {false, fmt("pipeline exited with %d / %d", rc_a, rc_b)};
    const auto a = snapshot_dir(root / "a"), b = snapshot_dir(root / "b");
    std::size_t differ = 0;
    for (const auto& [name, bytes] : a) {
        const auto it = b.find(name);
        if (it == b.end() || it->second != bytes) ++differ;
    }
    const bool pass = a.size() == b.size() && differ == 0 && a.size() > 0;
    return {pass, fmt("9 subcommand runs, %zu files each, %zu differ", a.size(), differ)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"feature census", feature_census},
        {"texture oracles", texture_oracles},
        {"U-test exactness", u_test_exactness},
        {"AUROC-U identity", auroc_identity},
        {"gradient fidelity", gradient_fidelity},
        {"learnable baseline", learnable_baseline},
        {"unlearnable detection", unlearnable_detection},
        {"transfer-mode contract", transfer_contract},
        {"RFE bookkeeping", rfe_bookkeeping},
        {"cluster recovery", cluster_recovery},
        {"CLI determinism", cli_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
