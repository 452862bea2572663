#include "radlearn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radlearn/error.hpp"

namespace radlearn {

std::vector<std::uint64_t> histogram(std::span<const double> values, std::size_t n_bins) {
    if (values.empty()) throw ValidationError("histogram of an empty list");
    if (n_bins < 1) throw ValidationError("histogram needs >= 1 bin");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<std::uint64_t> counts(n_bins, 0);
    for (double v : values) {
        std::size_t bin = 0;
        if (hi > lo) {
            const double pos = std::floor((v - lo) / (hi - lo) * double(n_bins));
            bin = std::size_t(std::clamp(pos, 0.0, double(n_bins - 1)));
        }
        ++counts[bin];
    }
    return counts;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("series lengths differ");
    if (a.empty()) return 0.0;
    const double n = double(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Learnable: return "learnable";
        case Verdict::Unlearnable: return "unlearnable";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

std::size_t layer_count(const TrainTrace& tr) {
    const std::size_t n = tr.epochs.empty() ? tr.initial.size() : tr.epochs.front().layers.size();
    for (const auto& e : tr.epochs) {
        if (e.layers.size() != n) throw ValidationError("trace epochs list different layers");
    }
    return n;
}

}  // namespace

std::vector<bool> detect_static_layers(const TrainTrace& tr, double rel_tol) {
    if (tr.epochs.size() < 2) throw ValidationError("static-layer detection needs >= 2 epochs");
    const std::size_t n = layer_count(tr);
    std::vector<bool> flags(n, true);
    for (const auto& e : tr.epochs) {
        for (std::size_t l = 0; l < n; ++l) {
            if (e.layers[l].delta_norm > rel_tol * (e.layers[l].weight_norm + 1e-12)) flags[l] = false;
        }
    }
    return flags;
}

std::vector<bool> detect_dead_gradients(const TrainTrace& tr, double abs_tol, double quorum) {
    if (tr.epochs.empty()) throw ValidationError("dead-gradient detection needs >= 1 epoch");
    const std::size_t n = layer_count(tr);
    std::vector<bool> flags(n, false);
    for (std::size_t l = 0; l < n; ++l) {
        std::size_t dead_epochs = 0;
        for (const auto& e : tr.epochs) dead_epochs += e.layers[l].grad_norm <= abs_tol ? 1 : 0;
        flags[l] = double(dead_epochs) >= quorum * double(tr.epochs.size());
    }
    return flags;
}

FlipResult detect_class_flipping(std::span<const double> sens, std::span<const double> spec, double corr_thresh,
                                 double amp_thresh) {
    if (sens.size() != spec.size()) throw ValidationError("sensitivity and specificity series lengths differ");
    if (sens.size() < 4) throw ValidationError("class-flip detection needs series of length >= 4");
    FlipResult r;
    r.correlation = pearson(sens, spec);
    auto amplitude = [](std::span<const double> s) {
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        return *hi - *lo;
    };
    r.flag = r.correlation < corr_thresh && amplitude(sens) > amp_thresh && amplitude(spec) > amp_thresh;
    return r;
}

Verdict verdict_rule(std::size_t static_layers, std::size_t total_layers, bool flipping, double static_quorum) {
    const bool static_majority = total_layers > 0 && double(static_layers) >= static_quorum * double(total_layers);
    if (static_majority || flipping) return Verdict::Unlearnable;
    if (static_layers == 0) return Verdict::Learnable;
    return Verdict::Inconclusive;
}

DiagnosisReport diagnose(const TrainTrace& tr, const DiagnoseConfig& cfg) {
    DiagnosisReport rep;
    const std::size_t n = layer_count(tr);
    if (tr.epochs.empty()) return rep;

    const bool enough_epochs = tr.epochs.size() >= 2;
    const auto statics = enough_epochs ? detect_static_layers(tr, cfg.static_rel_tol) : std::vector<bool>(n, false);
    const auto dead = detect_dead_gradients(tr, cfg.dead_abs_tol, cfg.dead_epoch_quorum);

    std::size_t n_static = 0;
    for (std::size_t l = 0; l < n; ++l) {
        LayerDiagnosis d;
        d.name = tr.epochs.front().layers[l].name;
        d.static_weights = statics[l];
        d.dead_gradient = dead[l];
        for (const auto& e : tr.epochs) {
            d.mean_delta_norm += e.layers[l].delta_norm;
            d.mean_grad_norm += e.layers[l].grad_norm;
        }
        d.mean_delta_norm /= double(tr.epochs.size());
        d.mean_grad_norm /= double(tr.epochs.size());
        n_static += statics[l] ? 1 : 0;
        rep.layers.push_back(std::move(d));
    }

    const bool use_validation =
        std::all_of(tr.epochs.begin(), tr.epochs.end(), [](const EpochRecord& e) { return e.validation.has_value(); });
    rep.sens_spec_source = use_validation ? "validation" : "train";
    std::vector<double> sens, spec;
    for (const auto& e : tr.epochs) {
        const EpochMetrics& m = use_validation ? *e.validation : e.train;
        sens.push_back(m.sensitivity);
        spec.push_back(m.specificity);
    }
    if (sens.size() >= 4) {
        const auto flip = detect_class_flipping(sens, spec, cfg.flip_corr_thresh, cfg.flip_amp_thresh);
        rep.class_flipping = flip.flag;
        rep.sens_spec_correlation = flip.correlation;
    } else {
        rep.sens_spec_correlation = pearson(sens, spec);
    }

    rep.verdict = enough_epochs ? verdict_rule(n_static, n, rep.class_flipping, cfg.static_layer_quorum)
                                : Verdict::Inconclusive;
    return rep;
}

}  // namespace radlearn
