#include "radlearn/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "radlearn/diagnostics.hpp"
#include "radlearn/error.hpp"
#include "radlearn/features.hpp"
#include "radlearn/metrics.hpp"
#include "radlearn/random.hpp"

namespace radlearn {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- losses

LossValue loss_bce_logit(double z, int y) {
    // log(1 + e^-z) + (1 - y) z, evaluated without overflow on either side.
    const double softplus_neg = std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    const double sigmoid = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return {softplus_neg + (1.0 - y) * z, sigmoid - y};
}

LossValue loss_hinge(double z, int y) {
    const double s = 2.0 * y - 1.0;
    const double margin = 1.0 - s * z;
    if (margin > 0.0) return {margin, -s};
    return {0.0, 0.0};
}

LossValue evaluate_loss(LossKind kind, double logit, int label) {
    return kind == LossKind::BceLogit ? loss_bce_logit(logit, label) : loss_hinge(logit, label);
}

// ---------------------------------------------------------------- optimizers

void step_adam(std::span<double> params, std::span<const double> grads, AdamState& state, double lr, double beta1,
               double beta2, double eps) {
    if (params.size() != grads.size()) throw ValidationError("parameter and gradient sizes differ");
    state.m.resize(params.size(), 0.0);
    state.v.resize(params.size(), 0.0);
    ++state.t;
    const double c1 = 1.0 - std::pow(beta1, double(state.t));
    const double c2 = 1.0 - std::pow(beta2, double(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

void step_rmsprop(std::span<double> params, std::span<const double> grads, RmsPropState& state, double lr,
                  double decay, double eps) {
    if (params.size() != grads.size()) throw ValidationError("parameter and gradient sizes differ");
    state.v.resize(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.v[i] = decay * state.v[i] + (1.0 - decay) * grads[i] * grads[i];
        params[i] -= lr * grads[i] / (std::sqrt(state.v[i]) + eps);
    }
}

// ---------------------------------------------------------------- network

std::vector<std::size_t> Layer::weight_shape() const {
    if (kind == LayerKind::Conv) return {out_ch, in_ch, 3, 3};
    return {out_features, in_features};
}

Network::Network(const NetConfig& cfg) : cfg_(cfg) {
    if (cfg.init_scale != "he") throw ConfigError("unsupported init_scale '" + cfg.init_scale + "'");
    if (cfg.height < 1 || cfg.width < 1) throw ValidationError("input dims must be >= 1");
    std::size_t h = cfg.height, w = cfg.width, ch = 1;
    std::size_t index = 0;
    auto init = [&](Layer& l, std::size_t fan_in) {
        Rng rng(derive_seed(cfg.seed, index++));
        const double std_dev = std::sqrt(2.0 / double(fan_in));
        for (auto& v : l.weight) v = double(static_cast<float>(std_dev * rng.normal()));
    };

    for (std::size_t b = 0; b < cfg.conv_channels.size(); ++b) {
        if (cfg.conv_channels[b] < 1) throw ValidationError("conv block needs >= 1 channel");
        if (h < 2 || w < 2) throw ValidationError("input too small for conv block " + std::to_string(b + 1));
        Layer l;
        l.name = "conv" + std::to_string(b + 1);
        l.kind = LayerKind::Conv;
        l.in_ch = ch;
        l.out_ch = cfg.conv_channels[b];
        l.in_h = h;
        l.in_w = w;
        l.weight.resize(l.out_ch * l.in_ch * 9);
        l.bias.assign(l.out_ch, 0.0);
        init(l, l.in_ch * 9);
        layers_.push_back(std::move(l));
        ch = cfg.conv_channels[b];
        h /= 2;
        w /= 2;
    }
    std::size_t in = ch * h * w;
    std::vector<std::size_t> widths = cfg.hidden_dense;
    widths.push_back(1);
    for (std::size_t d = 0; d < widths.size(); ++d) {
        if (widths[d] < 1) throw ValidationError("dense layer needs >= 1 unit");
        Layer l;
        const bool output = d + 1 == widths.size();
        l.name = output ? "output" : "dense" + std::to_string(d + 1);
        l.kind = LayerKind::Dense;
        l.relu = !output;
        l.in_features = in;
        l.out_features = widths[d];
        l.weight.resize(l.out_features * l.in_features);
        l.bias.assign(l.out_features, 0.0);
        init(l, in);
        layers_.push_back(std::move(l));
        in = widths[d];
    }
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.parameter_count();
    return n;
}

const Layer& Network::layer(const std::string& name) const {
    for (const auto& l : layers_)
        if (l.name == name) return l;
    throw ValidationError("no layer named " + name);
}

std::vector<LayerGrad> Network::zero_grads() const {
    std::vector<LayerGrad> g;
    for (const auto& l : layers_) g.push_back({std::vector<double>(l.weight.size(), 0.0), std::vector<double>(l.bias.size(), 0.0)});
    return g;
}

void Network::round_to_float() {
    for (auto& l : layers_) {
        for (auto& v : l.weight) v = double(static_cast<float>(v));
        for (auto& v : l.bias) v = double(static_cast<float>(v));
    }
}

namespace {

template <typename T>
struct ForwardCache {
    std::vector<std::vector<T>> inputs;  // input to each layer
    std::vector<std::vector<T>> pre;     // pre-activation of each layer
    std::vector<std::vector<std::uint32_t>> pool_argmax;  // conv layers only
};

template <typename T>
bool all_finite(const std::vector<T>& v) {
    return std::all_of(v.begin(), v.end(), [](T x) { return std::isfinite(x); });
}

/// Forward pass in scalar type T; weights and pixels are widened from double.
template <typename T>
T run_forward(const std::vector<Layer>& layers, const Image& img, ForwardCache<T>& cache) {
    cache.inputs.assign(layers.size(), {});
    cache.pre.assign(layers.size(), {});
    cache.pool_argmax.assign(layers.size(), {});
    std::vector<T> x(img.pixels.begin(), img.pixels.end());

    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Layer& l = layers[li];
        cache.inputs[li] = x;
        if (l.kind == LayerKind::Conv) {
            const long H = long(l.in_h), W = long(l.in_w);
            std::vector<T> z(l.out_ch * l.in_h * l.in_w);
            for (std::size_t o = 0; o < l.out_ch; ++o) {
                for (long y = 0; y < H; ++y) {
                    for (long xx = 0; xx < W; ++xx) {
                        T acc = l.bias[o];
                        for (std::size_t c = 0; c < l.in_ch; ++c) {
                            const double* wk = &l.weight[(o * l.in_ch + c) * 9];
                            for (long ky = 0; ky < 3; ++ky) {
                                const long yy = y + ky - 1;
                                if (yy < 0 || yy >= H) continue;
                                for (long kx = 0; kx < 3; ++kx) {
                                    const long xs = xx + kx - 1;
                                    if (xs < 0 || xs >= W) continue;
                                    acc += T(wk[ky * 3 + kx]) * x[std::size_t((long(c) * H + yy) * W + xs)];
                                }
                            }
                        }
                        z[std::size_t((long(o) * H + y) * W + xx)] = acc;
                    }
                }
            }
            // max(0, NaN) would silently drop a NaN, so surface it here
            if (!all_finite(z)) return std::numeric_limits<T>::quiet_NaN();
            const std::size_t ph = l.in_h / 2, pw = l.in_w / 2;
            std::vector<T> pooled(l.out_ch * ph * pw);
            std::vector<std::uint32_t> arg(pooled.size());
            for (std::size_t o = 0; o < l.out_ch; ++o) {
                for (std::size_t py = 0; py < ph; ++py) {
                    for (std::size_t px = 0; px < pw; ++px) {
                        std::size_t best = 0;
                        T best_v = -1;
                        for (std::size_t dy = 0; dy < 2; ++dy) {
                            for (std::size_t dx = 0; dx < 2; ++dx) {
                                const std::size_t idx = (o * l.in_h + 2 * py + dy) * l.in_w + 2 * px + dx;
                                const T r = std::max(T(0), z[idx]);
                                if (r > best_v) {
                                    best_v = r;
                                    best = idx;
                                }
                            }
                        }
                        const std::size_t out_idx = (o * ph + py) * pw + px;
                        pooled[out_idx] = best_v;
                        arg[out_idx] = std::uint32_t(best);
                    }
                }
            }
            cache.pre[li] = std::move(z);
            cache.pool_argmax[li] = std::move(arg);
            x = std::move(pooled);
        } else {
            std::vector<T> z(l.out_features);
            for (std::size_t o = 0; o < l.out_features; ++o) {
                T acc = l.bias[o];
                const double* wr = &l.weight[o * l.in_features];
                for (std::size_t i = 0; i < l.in_features; ++i) acc += T(wr[i]) * x[i];
                z[o] = acc;
            }
            if (!all_finite(z)) return std::numeric_limits<T>::quiet_NaN();
            cache.pre[li] = z;
            if (l.relu) {
                for (auto& v : z) v = std::max(T(0), v);
            }
            x = std::move(z);
        }
    }
    return x.front();
}

void check_image(const NetConfig& cfg, const Image& img) {
    if (img.height != cfg.height || img.width != cfg.width || img.pixels.size() != img.height * img.width) {
        throw ValidationError("image shape does not match the network input");
    }
}

}  // namespace

double Network::forward(const Image& img, ActivationPattern* pattern) const {
    check_image(cfg_, img);
    ForwardCache<double> cache;
    const double logit = run_forward(layers_, img, cache);
    if (pattern) {
        pattern->relu.clear();
        pattern->pool.clear();
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            if (!layers_[li].relu) continue;
            for (double z : cache.pre[li]) pattern->relu.push_back(z > 0.0 ? 1 : 0);
            pattern->pool.insert(pattern->pool.end(), cache.pool_argmax[li].begin(), cache.pool_argmax[li].end());
        }
    }
    return logit;
}

LossValue Network::accumulate_gradient(const Image& img, int label, LossKind loss, double scale,
                                       std::vector<LayerGrad>& grads) const {
    check_image(cfg_, img);
    ForwardCache<double> cache;
    const double logit = run_forward(layers_, img, cache);
    if (!std::isfinite(logit)) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan};
    }
    const LossValue lv = evaluate_loss(loss, logit, label);

    std::vector<double> delta{lv.grad * scale};  // d loss / d pre-activation of the current layer
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const Layer& l = layers_[li];
        const auto& x = cache.inputs[li];
        LayerGrad& g = grads[li];
        std::vector<double> dx(li > 0 ? x.size() : 0, 0.0);

        if (l.kind == LayerKind::Dense) {
            for (std::size_t o = 0; o < l.out_features; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                g.bias[o] += d;
                double* gw = &g.weight[o * l.in_features];
                const double* wr = &l.weight[o * l.in_features];
                for (std::size_t i = 0; i < l.in_features; ++i) {
                    gw[i] += d * x[i];
                    if (li > 0) dx[i] += wr[i] * d;
                }
            }
        } else {
            const long H = long(l.in_h), W = long(l.in_w);
            for (std::size_t o = 0; o < l.out_ch; ++o) {
                for (long y = 0; y < H; ++y) {
                    for (long xx = 0; xx < W; ++xx) {
                        const double d = delta[std::size_t((long(o) * H + y) * W + xx)];
                        if (d == 0.0) continue;
                        g.bias[o] += d;
                        for (std::size_t c = 0; c < l.in_ch; ++c) {
                            double* gk = &g.weight[(o * l.in_ch + c) * 9];
                            const double* wk = &l.weight[(o * l.in_ch + c) * 9];
                            for (long ky = 0; ky < 3; ++ky) {
                                const long yy = y + ky - 1;
                                if (yy < 0 || yy >= H) continue;
                                for (long kx = 0; kx < 3; ++kx) {
                                    const long xs = xx + kx - 1;
                                    if (xs < 0 || xs >= W) continue;
                                    const std::size_t xi = std::size_t((long(c) * H + yy) * W + xs);
                                    gk[ky * 3 + kx] += d * x[xi];
                                    if (li > 0) dx[xi] += wk[ky * 3 + kx] * d;
                                }
                            }
                        }
                    }
                }
            }
        }
        if (li == 0) break;

        // Convert d loss / d input of this layer into d loss / d pre-activation of the previous one.
        const Layer& prev = layers_[li - 1];
        const auto& prev_pre = cache.pre[li - 1];
        if (prev.kind == LayerKind::Dense) {
            delta.assign(prev_pre.size(), 0.0);
            for (std::size_t i = 0; i < prev_pre.size(); ++i) delta[i] = prev_pre[i] > 0.0 ? dx[i] : 0.0;
        } else {
            delta.assign(prev_pre.size(), 0.0);
            const auto& arg = cache.pool_argmax[li - 1];
            for (std::size_t p = 0; p < arg.size(); ++p) {
                if (prev_pre[arg[p]] > 0.0) delta[arg[p]] += dx[p];
            }
        }
    }
    return lv;
}

// ---------------------------------------------------------------- checkpoints

Checkpoint make_checkpoint(const Network& net) {
    Checkpoint ck;
    for (const auto& l : net.layers()) {
        ck.tensors.push_back({l.name + ".weight", l.weight_shape(), std::vector<float>(l.weight.begin(), l.weight.end())});
        ck.tensors.push_back({l.name + ".bias", {l.bias.size()}, std::vector<float>(l.bias.begin(), l.bias.end())});
    }
    return ck;
}

void apply_checkpoint(Network& net, const Checkpoint& ckpt) {
    auto& layers = net.layers();
    if (ckpt.tensors.size() != 2 * layers.size()) throw ValidationError("checkpoint tensor count does not match network");
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Tensor& w = ckpt.tensors[2 * li];
        const Tensor& b = ckpt.tensors[2 * li + 1];
        Layer& l = layers[li];
        if (w.name != l.name + ".weight" || b.name != l.name + ".bias") {
            throw ValidationError("checkpoint tensor names do not match layer " + l.name);
        }
        if (w.shape != l.weight_shape() || b.shape != std::vector<std::size_t>{l.bias.size()}) {
            throw ValidationError("checkpoint shape mismatch for layer " + l.name);
        }
        if (w.values.size() != l.weight.size() || b.values.size() != l.bias.size()) {
            throw ValidationError("checkpoint value count mismatch for layer " + l.name);
        }
    }
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& w = ckpt.tensors[2 * li].values;
        const auto& b = ckpt.tensors[2 * li + 1].values;
        layers[li].weight.assign(w.begin(), w.end());
        layers[li].bias.assign(b.begin(), b.end());
    }
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& base) {
    json header = {{"format", "f32le"}, {"tensors", json::array()}};
    std::vector<char> raw;
    for (const auto& t : ckpt.tensors) {
        std::size_t expected = 1;
        for (auto d : t.shape) expected *= d;
        if (expected != t.values.size()) throw ValidationError("tensor " + t.name + " shape does not match its values");
        header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
        for (float f : t.values) {
            const auto bits = std::bit_cast<std::uint32_t>(f);
            for (int b = 0; b < 4; ++b) raw.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
        }
    }
    fs::path hp = base, rp = base;
    hp += ".ckpt.json";
    rp += ".ckpt.raw";
    std::ofstream h(hp, std::ios::trunc);
    if (!h) throw IoError("cannot open " + hp.string() + " for writing");
    h << header.dump(2) << '\n';
    std::ofstream r(rp, std::ios::binary | std::ios::trunc);
    if (!r) throw IoError("cannot open " + rp.string() + " for writing");
    r.write(raw.data(), std::streamsize(raw.size()));
    if (!h || !r) throw IoError("checkpoint write failed: " + base.string());
}

Checkpoint load_checkpoint(const fs::path& base) {
    fs::path hp = base, rp = base;
    hp += ".ckpt.json";
    rp += ".ckpt.raw";
    std::ifstream h(hp);
    if (!h) throw IoError("cannot open " + hp.string());
    std::ifstream r(rp, std::ios::binary);
    if (!r) throw IoError("cannot open " + rp.string());
    const std::vector<char> raw{std::istreambuf_iterator<char>(r), std::istreambuf_iterator<char>()};

    Checkpoint ck;
    std::size_t offset = 0;
    try {
        const json header = json::parse(h);
        if (header.at("format").get<std::string>() != "f32le") throw ValidationError("unsupported checkpoint format");
        for (const auto& t : header.at("tensors")) {
            Tensor tensor{t.at("name").get<std::string>(), t.at("shape").get<std::vector<std::size_t>>(), {}};
            std::size_t count = 1;
            for (auto d : tensor.shape) count *= d;
            if (offset + 4 * count > raw.size()) throw ValidationError("checkpoint blob shorter than header");
            tensor.values.resize(count);
            for (std::size_t i = 0; i < count; ++i, offset += 4) {
                std::uint32_t bits = 0;
                for (int b = 0; b < 4; ++b) bits |= std::uint32_t(static_cast<unsigned char>(raw[offset + b])) << (8 * b);
                tensor.values[i] = std::bit_cast<float>(bits);
            }
            ck.tensors.push_back(std::move(tensor));
        }
    } catch (const json::exception& e) {
        throw ValidationError("malformed checkpoint header " + hp.string() + ": " + e.what());
    }
    if (offset != raw.size()) throw ValidationError("checkpoint blob longer than header");
    return ck;
}

// ---------------------------------------------------------------- training

EpochMetrics evaluate(const Network& net, const Dataset& data, LossKind loss) {
    EpochMetrics m;
    std::vector<int> preds;
    preds.reserve(data.images.size());
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        const double z = net.forward(data.images[i]);
        m.loss += evaluate_loss(loss, z, data.labels[i]).loss;
        preds.push_back(z > 0.0 ? 1 : 0);
    }
    m.loss /= double(data.images.size());
    const auto cm = metrics(confusion(preds, data.labels));
    m.accuracy = cm.accuracy;
    m.sensitivity = cm.sensitivity;
    m.specificity = cm.specificity;
    return m;
}

namespace {

std::vector<double> layer_params(const Layer& l) {
    std::vector<double> p = l.weight;
    p.insert(p.end(), l.bias.begin(), l.bias.end());
    return p;
}

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

LayerSnapshot snapshot(const Layer& l, const std::vector<double>* start, const LayerGrad* grad) {
    LayerSnapshot s;
    s.name = l.name;
    const auto p = layer_params(l);
    s.weight_norm = l2(p);
    s.weight_hist = histogram(p);
    const auto [wmin, wmax] = std::minmax_element(p.begin(), p.end());
    s.weight_min = *wmin;
    s.weight_max = *wmax;
    if (start) {
        std::vector<double> delta(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) delta[i] = p[i] - (*start)[i];
        s.delta_norm = l2(delta);
    }
    if (grad) {
        std::vector<double> g = grad->weight;
        g.insert(g.end(), grad->bias.begin(), grad->bias.end());
        s.grad_norm = l2(g);
        s.grad_hist = histogram(g);
        const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
        s.grad_min = *gmin;
        s.grad_max = *gmax;
    }
    return s;
}

void validate_dataset(const NetConfig& cfg, const Dataset& data) {
    if (data.images.size() != data.labels.size()) throw ValidationError("image and label counts differ");
    for (const auto& img : data.images) check_image(cfg, img);
    for (int l : data.labels) {
        if (l != 0 && l != 1) throw ValidationError("labels must be 0 or 1");
    }
}

}  // namespace

TrainResult train(const Dataset& data, const NetConfig& net_cfg, const TrainConfig& cfg,
                  const std::optional<Checkpoint>& init, const Dataset* validation) {
    if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
    if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
        throw ValidationError("learning_rate must be finite and >= 0");
    }
    validate_dataset(net_cfg, data);
    const auto positives = std::count(data.labels.begin(), data.labels.end(), 1);
    if (positives == 0 || positives == long(data.labels.size())) throw ValidationError("training needs both classes");
    if (validation) validate_dataset(net_cfg, *validation);

    Network net(net_cfg);
    if (init) apply_checkpoint(net, *init);
    auto& layers = net.layers();

    std::vector<bool> frozen(layers.size(), false);
    for (const auto& name : cfg.freeze_layers) {
        const auto it = std::find_if(layers.begin(), layers.end(), [&](const Layer& l) { return l.name == name; });
        if (it == layers.end()) throw ValidationError("freeze_layers names unknown layer " + name);
        frozen[std::size_t(it - layers.begin())] = true;
    }

    std::vector<AdamState> adam(2 * layers.size());
    std::vector<RmsPropState> rms(2 * layers.size());
    auto update = [&](std::size_t slot, std::vector<double>& params, const std::vector<double>& grads) {
        if (cfg.optimizer == OptimizerKind::Adam) {
            step_adam(params, grads, adam[slot], cfg.learning_rate);
        } else {
            step_rmsprop(params, grads, rms[slot], cfg.learning_rate);
        }
    };

    TrainResult result{net, {}};
    for (const auto& l : layers) result.trace.initial.push_back(snapshot(l, nullptr, nullptr));

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(data.images.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<std::vector<double>> start;
        for (const auto& l : layers) start.push_back(layer_params(l));
        rng.shuffle(std::span<std::size_t>(order));

        std::vector<LayerGrad> grads;
        std::size_t batch_index = 0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size, ++batch_index) {
            const std::size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
            const double scale = 1.0 / double(b1 - b0);
            grads = net.zero_grads();
            double batch_loss = 0.0;
            for (std::size_t s = b0; s < b1; ++s) {
                batch_loss += net.accumulate_gradient(data.images[order[s]], data.labels[order[s]], cfg.loss, scale, grads).loss;
            }
            batch_loss *= scale;
            if (!std::isfinite(batch_loss)) {
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_index + 1));
            }
            for (std::size_t li = 0; li < layers.size(); ++li) {
                if (frozen[li]) continue;
                update(2 * li, layers[li].weight, grads[li].weight);
                update(2 * li + 1, layers[li].bias, grads[li].bias);
            }
            net.round_to_float();
        }

        EpochRecord rec;
        rec.epoch = epoch;
        for (std::size_t li = 0; li < layers.size(); ++li) rec.layers.push_back(snapshot(layers[li], &start[li], &grads[li]));
        rec.train = evaluate(net, data, cfg.loss);
        if (!std::isfinite(rec.train.loss)) throw NumericError("non-finite training loss after epoch " + std::to_string(epoch));
        if (validation && !validation->images.empty()) rec.validation = evaluate(net, *validation, cfg.loss);
        result.trace.epochs.push_back(std::move(rec));
    }
    result.network = std::move(net);
    return result;
}

// ---------------------------------------------------------------- gradient check

namespace {

// Finite-difference reference runs in long double so that the rounding
// floor of (up - down) sits far below the tolerance, even for gradients that
// are structurally zero.
long double loss_wide(LossKind kind, long double z, int y, bool& active) {
    if (kind == LossKind::BceLogit) {
        active = true;
        return std::max(-z, 0.0L) + std::log1p(std::exp(-std::abs(z))) + (1.0L - y) * z;
    }
    const long double margin = 1.0L - (2.0L * y - 1.0L) * z;
    active = margin > 0.0L;
    return active ? margin : 0.0L;
}

long double mean_loss(const Network& net, const Dataset& probe, LossKind loss, std::vector<ActivationPattern>& patterns,
                      std::vector<bool>& hinge_active) {
    const auto& layers = net.layers();
    long double total = 0.0L;
    patterns.resize(probe.images.size());
    hinge_active.resize(probe.images.size());
    ForwardCache<long double> cache;
    for (std::size_t i = 0; i < probe.images.size(); ++i) {
        const long double z = run_forward(layers, probe.images[i], cache);
        auto& pat = patterns[i];
        pat.relu.clear();
        pat.pool.clear();
        for (std::size_t li = 0; li < layers.size(); ++li) {
            if (!layers[li].relu) continue;
            for (long double v : cache.pre[li]) pat.relu.push_back(v > 0.0L ? 1 : 0);
            pat.pool.insert(pat.pool.end(), cache.pool_argmax[li].begin(), cache.pool_argmax[li].end());
        }
        bool active = false;
        total += loss_wide(loss, z, probe.labels[i], active);
        hinge_active[i] = active;
    }
    return total / static_cast<long double>(probe.images.size());
}

double& param_at(Network& net, std::size_t flat) {
    for (auto& l : net.layers()) {
        if (flat < l.weight.size()) return l.weight[flat];
        flat -= l.weight.size();
        if (flat < l.bias.size()) return l.bias[flat];
        flat -= l.bias.size();
    }
    throw ValidationError("parameter index out of range");
}

}  // namespace

GradientCheckResult gradient_check(const Network& net_in, const Dataset& probe, LossKind loss, std::size_t n_params,
                                   double h, std::uint64_t seed) {
    if (probe.images.empty()) throw ValidationError("gradient check needs a probe batch");
    validate_dataset(net_in.config(), probe);
    Network net = net_in;
    const std::size_t total = net.parameter_count();

    auto grads = net.zero_grads();
    const double scale = 1.0 / double(probe.images.size());
    for (std::size_t i = 0; i < probe.images.size(); ++i) {
        net.accumulate_gradient(probe.images[i], probe.labels[i], loss, scale, grads);
    }
    std::vector<double> analytic;
    for (const auto& g : grads) {
        analytic.insert(analytic.end(), g.weight.begin(), g.weight.end());
        analytic.insert(analytic.end(), g.bias.begin(), g.bias.end());
    }

    std::vector<ActivationPattern> base_pattern, pattern;
    std::vector<bool> base_hinge, hinge;
    mean_loss(net, probe, loss, base_pattern, base_hinge);

    std::vector<std::size_t> candidates(total);
    std::iota(candidates.begin(), candidates.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(candidates));

    GradientCheckResult res;
    for (std::size_t idx : candidates) {
        if (res.probed >= n_params) break;
        double& p = param_at(net, idx);
        const double saved = p;
        p = saved + h;
        const long double up = mean_loss(net, probe, loss, pattern, hinge);
        const bool smooth_up = pattern == base_pattern && hinge == base_hinge;
        p = saved - h;
        const long double down = mean_loss(net, probe, loss, pattern, hinge);
        const bool smooth_down = pattern == base_pattern && hinge == base_hinge;
        p = saved;
        if (!smooth_up || !smooth_down) {
            ++res.skipped_nonsmooth;
            continue;
        }
        const long double step = static_cast<long double>(saved + h) - static_cast<long double>(saved - h);
        const double numeric = double((up - down) / step);
        const double a = analytic[idx];
        const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
        res.max_relative_error = std::max(res.max_relative_error, rel);
        ++res.probed;
    }
    return res;
}

GradientCheckResult gradient_check(const NetConfig& net_cfg, const Dataset& probe, LossKind loss, std::size_t n_params,
                                   double h, std::uint64_t seed) {
    Network net(net_cfg);
    if (net.parameter_count() > 5000) throw ValidationError("gradient check is limited to networks of <= 5000 parameters");
    return gradient_check(net, probe, loss, n_params, h, seed);
}

// ---------------------------------------------------------------- data

Dataset make_two_blob_dataset(std::size_t n_samples, std::size_t height, std::size_t width, std::uint64_t seed,
                              double noise_sigma) {
    if (height < 4 || width < 4) throw ValidationError("two-blob images need at least 4x4 pixels");
    Dataset d;
    const double sigma = double(std::min(height, width)) / 8.0;
    for (std::size_t n = 0; n < n_samples; ++n) {
        Rng rng(derive_seed(seed, n));
        const int label = int(n % 2);
        const double frac = label ? 0.75 : 0.25;
        const double cy = frac * double(height) + (rng.uniform() - 0.5);
        const double cx = frac * double(width) + (rng.uniform() - 0.5);
        Image img{height, width, std::vector<double>(height * width)};
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                const double dy = double(y) - cy, dx = double(x) - cx;
                img.pixels[y * width + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)) + noise_sigma * rng.normal();
            }
        }
        d.images.push_back(std::move(img));
        d.labels.push_back(label);
    }
    return d;
}

Image axial_slice(const Volume& v, const RoiMask& m, std::size_t height, std::size_t width) {
    validate_pair(v, m);
    if (height > v.dims.y || width > v.dims.x) throw ValidationError("requested slice is larger than the volume");
    const std::size_t k = largest_axial_slice(m);
    const std::size_t y0 = (v.dims.y - height) / 2, x0 = (v.dims.x - width) / 2;
    Image img{height, width, std::vector<double>(height * width)};
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) img.pixels[y * width + x] = v.at(x0 + x, y0 + y, k);
    const double n = double(img.pixels.size());
    const double mean = std::accumulate(img.pixels.begin(), img.pixels.end(), 0.0) / n;
    double var = 0.0;
    for (double p : img.pixels) var += (p - mean) * (p - mean);
    const double sd = std::sqrt(var / n);
    for (auto& p : img.pixels) p = sd > 0.0 ? (p - mean) / sd : 0.0;
    return img;
}

}  // namespace radlearn
