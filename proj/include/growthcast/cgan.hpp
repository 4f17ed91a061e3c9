#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "growthcast/datamodel.hpp"
#include "growthcast/nn/adam.hpp"
#include "growthcast/nn/losses.hpp"
#include "growthcast/nn/patchgan.hpp"
#include "growthcast/nn/unet.hpp"
#include "growthcast/preprocess.hpp"

namespace growthcast {

struct TrainConfig {
    double lambda_l1 = 100.0;
    double learning_rate = 1e-4;
    int batch_size = 1;
    int epochs = 160;  // must be even: the learning rate decays over the second half
    double beta1 = 0.5;
    double beta2 = 0.999;
    std::uint64_t seed = 0;
    int checkpoint_interval = 0;  // epochs between checkpoints; 0 = final only

    void validate() const;
};

// Constant for the first half of training, then linear decay reaching zero
// one epoch past the end. `epoch` is the zero-based index at epoch start.
double learning_rate_at(const TrainConfig& config, int epoch);

struct EpochStats {
    int epoch = 0;
    double loss_d = 0.0;
    double loss_g_adv = 0.0;
    double loss_g_l1 = 0.0;
    double lr = 0.0;
};

struct GanModel {
    nn::GeneratorConfig generator_config;
    nn::DiscriminatorConfig discriminator_config;
    TrainConfig train_config;
    nn::UNetGenerator generator;
    nn::PatchDiscriminator discriminator;
    std::vector<EpochStats> history;
};

// Fresh model with seeded N(0, 0.02) weights.
GanModel make_model(const nn::GeneratorConfig& g, const nn::DiscriminatorConfig& d,
                    const TrainConfig& t);

// One generator pass. stochastic=true keeps dropout live, so repeated calls
// on the same input differ; stochastic=false is deterministic.
Tensor generator_forward(GanModel& model, const Tensor& x, bool stochastic,
                         Rng* rng = nullptr);

struct DiscriminatorOutput {
    Tensor logits;  // 1 x N x N patch grid
    double mean = 0.0;
};

DiscriminatorOutput discriminator_forward(GanModel& model, const Tensor& x, const Tensor& y);

struct TrainReport {
    std::vector<EpochStats> history;
    long discriminator_updates = 0;
    long generator_updates = 0;
};

struct TrainOptions {
    // Produces the augmented (input, reference) tensors for a pair; defaults
    // to reading the manifest paths from disk.
    std::function<std::pair<Tensor, Tensor>(const ImagePair&, Rng&)> load_pair;
    std::filesystem::path checkpoint_dir;  // empty = no checkpoint files
    std::function<void(const EpochStats&)> on_epoch;
};

// Alternating adversarial training: one discriminator step then one generator
// step per pair. The generator objective is loss_cgan(generator) + lambda*L1.
TrainReport train(GanModel& model, const PairManifest& manifest,
                  const AugmentConfig& augment_config, const TrainOptions& options = {});

// Order-preserving batched inference. Per-input RNG streams derive from the
// seed, so stochastic output i depends only on (seed, i, input).
std::vector<Tensor> predict(GanModel& model, const std::vector<Tensor>& inputs, bool stochastic,
                            std::uint64_t seed = 0);

void save_checkpoint(const GanModel& model, const std::filesystem::path& path);
GanModel load_checkpoint(const std::filesystem::path& path);

void write_history_csv(const std::vector<EpochStats>& history, const std::filesystem::path& path);

}  // namespace growthcast
