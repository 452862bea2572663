#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radlearn/trace.hpp"
#include "radlearn/volume.hpp"

namespace radlearn {

/// Single-channel 2D image.
struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;  // row-major
};

struct Dataset {
    std::vector<Image> images;
    std::vector<int> labels;
};

/// Each conv block is 3x3 same-padded conv + ReLU + 2x2 max-pool; hidden
/// dense layers use ReLU; the output layer emits one logit.
struct NetConfig {
    std::size_t height = 16;
    std::size_t width = 16;
    std::vector<std::size_t> conv_channels;
    std::vector<std::size_t> hidden_dense;
    std::uint64_t seed = 0;
    std::string init_scale = "he";
};

enum class LossKind { BceLogit, Hinge };
enum class OptimizerKind { Adam, RmsProp };

struct TrainConfig {
    LossKind loss = LossKind::BceLogit;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 1e-4;
    std::size_t batch_size = 4;
    std::size_t epochs = 10;
    std::vector<std::string> freeze_layers;
    std::uint64_t seed = 0;
};

struct LossValue {
    double loss = 0.0;
    double grad = 0.0;  // d loss / d logit
};

LossValue loss_bce_logit(double logit, int label);
/// Labels map {0, 1} -> {-1, +1}; subgradient 0 at the kink.
LossValue loss_hinge(double logit, int label);
LossValue evaluate_loss(LossKind kind, double logit, int label);

struct AdamState {
    std::vector<double> m, v;
    std::uint64_t t = 0;
};

struct RmsPropState {
    std::vector<double> v;
};

/// Bias-corrected Adam step; increments state.t before use.
void step_adam(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
void step_rmsprop(std::span<double> params, std::span<const double> grads, RmsPropState& state, double lr,
                  double decay = 0.9, double eps = 1e-8);

enum class LayerKind { Conv, Dense };

struct Layer {
    std::string name;
    LayerKind kind = LayerKind::Dense;
    bool relu = true;
    // Conv: weight [out_ch][in_ch][3][3] on an in_h x in_w input. Dense: weight [out][in].
    std::size_t in_ch = 0, out_ch = 0, in_h = 0, in_w = 0;
    std::size_t in_features = 0, out_features = 0;
    std::vector<double> weight;
    std::vector<double> bias;

    std::vector<std::size_t> weight_shape() const;
    std::size_t parameter_count() const { return weight.size() + bias.size(); }
};

struct LayerGrad {
    std::vector<double> weight;
    std::vector<double> bias;
};

/// Activation pattern of one forward pass: ReLU gates, pool winners and the
/// hinge margin flag. Equal patterns mean the loss is smooth between two points.
struct ActivationPattern {
    std::vector<std::uint8_t> relu;
    std::vector<std::uint32_t> pool;
    bool operator==(const ActivationPattern&) const = default;
};

class Network {
public:
    /// He-scaled Gaussian weights (std sqrt(2 / fan_in)), zero biases.
    explicit Network(const NetConfig& cfg);

    const NetConfig& config() const { return cfg_; }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::size_t parameter_count() const;
    const Layer& layer(const std::string& name) const;

    double forward(const Image& img, ActivationPattern* pattern = nullptr) const;

    /// Adds d loss / d params for one sample, scaled by `scale`, into `grads`.
    LossValue accumulate_gradient(const Image& img, int label, LossKind loss, double scale,
                                  std::vector<LayerGrad>& grads) const;

    std::vector<LayerGrad> zero_grads() const;

    /// Rounds every parameter to the nearest 32-bit float (checkpoint precision).
    void round_to_float();

private:
    NetConfig cfg_;
    std::vector<Layer> layers_;
};

struct Tensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<float> values;
};

struct Checkpoint {
    std::vector<Tensor> tensors;  // "<layer>.weight", "<layer>.bias" in layer order
};

Checkpoint make_checkpoint(const Network& net);
/// Throws ValidationError when names or shapes differ from the network.
void apply_checkpoint(Network& net, const Checkpoint& ckpt);
// <base>.ckpt.json + <base>.ckpt.raw (f32 little-endian, tensors in header order).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& base);
Checkpoint load_checkpoint(const std::filesystem::path& base);

struct TrainResult {
    Network network;
    TrainTrace trace;
};

/// Mini-batch training. Frozen layers still report gradients in the trace
/// but are never updated. Throws NumericError on a non-finite batch loss.
TrainResult train(const Dataset& data, const NetConfig& net_cfg, const TrainConfig& train_cfg,
                  const std::optional<Checkpoint>& init = std::nullopt, const Dataset* validation = nullptr);

EpochMetrics evaluate(const Network& net, const Dataset& data, LossKind loss);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t probed = 0;
    std::size_t skipped_nonsmooth = 0;
};

/// Central finite differences (step h) on sampled parameters of a freshly
/// initialized network, against the analytic gradient of the mean batch loss.
/// Parameters whose perturbation changes the activation pattern are skipped.
GradientCheckResult gradient_check(const NetConfig& net_cfg, const Dataset& probe, LossKind loss,
                                   std::size_t n_params = 200, double h = 1e-4, std::uint64_t seed = 0);
GradientCheckResult gradient_check(const Network& net, const Dataset& probe, LossKind loss,
                                   std::size_t n_params = 200, double h = 1e-4, std::uint64_t seed = 0);

/// Linearly separable images: a Gaussian blob in the upper-left quadrant for
/// class 0 and in the lower-right quadrant for class 1, plus pixel noise.
Dataset make_two_blob_dataset(std::size_t n_samples, std::size_t height, std::size_t width, std::uint64_t seed,
                              double noise_sigma = 0.1);

/// Center crop of the largest-area axial slice, z-scored per image.
Image axial_slice(const Volume& v, const RoiMask& m, std::size_t height, std::size_t width);

}  // namespace radlearn
