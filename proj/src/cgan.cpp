#include "growthcast/cgan.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "growthcast/csv.hpp"
#include "growthcast/num.hpp"

namespace growthcast {

using nn::LossRole;

void TrainConfig::validate() const {
    if (lambda_l1 < 0) throw ConfigError("train: lambda_l1 must be >= 0");
    if (learning_rate <= 0) throw ConfigError("train: learning_rate must be > 0");
    if (epochs <= 0 || epochs % 2 != 0)
        throw ConfigError("train: epochs must be a positive even number");
    if (batch_size != 1)
        throw ConfigError("train: only batch_size 1 is supported (instance-normalized model)");
    if (checkpoint_interval < 0) throw ConfigError("train: checkpoint_interval must be >= 0");
}

double learning_rate_at(const TrainConfig& config, int epoch) {
    const int half = config.epochs / 2;
    if (epoch < half) return config.learning_rate;
    return config.learning_rate * double(config.epochs - epoch) / double(config.epochs - half);
}

GanModel make_model(const nn::GeneratorConfig& g, const nn::DiscriminatorConfig& d,
                    const TrainConfig& t) {
    g.validate();
    d.validate();
    t.validate();
    GanModel model;
    model.generator_config = g;
    model.discriminator_config = d;
    model.train_config = t;
    model.generator = nn::UNetGenerator(g);
    model.discriminator = nn::PatchDiscriminator(d);
    Rng init_rng(derive_seed(t.seed, {0x1717}));
    model.generator.init(init_rng);
    model.discriminator.init(init_rng);
    return model;
}

Tensor generator_forward(GanModel& model, const Tensor& x, bool stochastic, Rng* rng) {
    validate_image_tensor(x, "generator input");
    Rng fallback(derive_seed(model.train_config.seed, {0xd209}));
    return model.generator.forward(x, stochastic, rng ? rng : &fallback);
}

DiscriminatorOutput discriminator_forward(GanModel& model, const Tensor& x, const Tensor& y) {
    if (!x.same_shape(y)) throw DataError("discriminator: condition and candidate shapes differ");
    DiscriminatorOutput out;
    out.logits = model.discriminator.forward(concat_channels(x, y));
    out.mean = nn::grid_mean(out.logits);
    return out;
}

namespace {

std::pair<Tensor, Tensor> default_load_pair(const ImagePair& pair,
                                            const AugmentConfig& augment_config, Rng& rng) {
    Tensor a = load_and_pad(pair.input.image_path);
    Tensor b = load_and_pad(pair.reference.image_path);
    return augment_pair(a, b, augment_config, rng);
}

void require_finite_loss(double v, const std::string& what, int epoch, long step) {
    if (!std::isfinite(v))
        throw NumericError("non-finite " + what + " at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(step));
}

}  // namespace

TrainReport train(GanModel& model, const PairManifest& manifest,
                  const AugmentConfig& augment_config, const TrainOptions& options) {
    const TrainConfig& tc = model.train_config;
    tc.validate();
    augment_config.validate();
    if (manifest.pairs.empty()) throw DataError("train: manifest has no pairs");

    auto g_params = model.generator.params();
    auto d_params = model.discriminator.params();
    nn::AdamOptimizer adam_g(g_params, tc.beta1, tc.beta2);
    nn::AdamOptimizer adam_d(d_params, tc.beta1, tc.beta2);

    TrainReport report;
    const double lambda = tc.lambda_l1;
    const std::size_t n_pairs = manifest.pairs.size();
    long global_step = 0;

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        const double lr = learning_rate_at(tc, epoch);

        std::vector<std::size_t> order(n_pairs);
        for (std::size_t i = 0; i < n_pairs; ++i) order[i] = i;
        Rng shuffle_rng(derive_seed(tc.seed, {0x5u, std::uint64_t(epoch)}));
        for (std::size_t i = n_pairs; i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_int(int(i))]);

        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;

        for (std::size_t step = 0; step < n_pairs; ++step, ++global_step) {
            const ImagePair& pair = manifest.pairs[order[step]];
            Rng aug_rng(derive_seed(tc.seed, {0xa6u, std::uint64_t(epoch), std::uint64_t(step)}));
            auto [x, y] = options.load_pair
                              ? options.load_pair(pair, aug_rng)
                              : default_load_pair(pair, augment_config, aug_rng);

            Rng drop_rng(derive_seed(tc.seed, {0xd0u, std::uint64_t(epoch), std::uint64_t(step)}));
            Tensor y_hat = model.generator.forward(x, /*stochastic=*/true, &drop_rng);

            // Discriminator step.
            model.discriminator.zero_grad();
            auto real = nn::bce_toward_real(model.discriminator.forward(concat_channels(x, y)));
            model.discriminator.backward(real.grad, /*accumulate=*/true);
            auto fake =
                nn::bce_toward_fake(model.discriminator.forward(concat_channels(x, y_hat)));
            model.discriminator.backward(fake.grad, /*accumulate=*/true);
            double loss_d = real.value + fake.value;
            require_finite_loss(loss_d, "discriminator loss", epoch, global_step);
            adam_d.step(d_params, lr);
            ++report.discriminator_updates;

            // Generator step against the updated discriminator.
            model.generator.zero_grad();
            auto adv = nn::bce_toward_real(model.discriminator.forward(concat_channels(x, y_hat)));
            Tensor dxy = model.discriminator.backward(adv.grad, /*accumulate=*/false);
            auto [dx_cond, dy_hat] = nn::split_channels(dxy, 3);
            auto l1 = nn::loss_l1(y, y_hat);
            double loss_g = adv.value + lambda * l1.value;
            require_finite_loss(loss_g, "generator loss", epoch, global_step);
            for (std::size_t i = 0; i < dy_hat.size(); ++i)
                dy_hat.data()[i] += lambda * l1.grad.data()[i];
            model.generator.backward(dy_hat, /*accumulate=*/true);
            adam_g.step(g_params, lr);
            ++report.generator_updates;

            stats.loss_d += loss_d;
            stats.loss_g_adv += adv.value;
            stats.loss_g_l1 += l1.value;
        }

        stats.loss_d /= double(n_pairs);
        stats.loss_g_adv /= double(n_pairs);
        stats.loss_g_l1 /= double(n_pairs);
        model.history.push_back(stats);
        report.history.push_back(stats);
        if (options.on_epoch) options.on_epoch(stats);

        if (!options.checkpoint_dir.empty() && tc.checkpoint_interval > 0 &&
            (epoch + 1) % tc.checkpoint_interval == 0 && epoch + 1 < tc.epochs) {
            char name[32];
            std::snprintf(name, sizeof(name), "model_epoch%04d.ckpt", epoch + 1);
            save_checkpoint(model, options.checkpoint_dir / name);
        }
    }
    if (!options.checkpoint_dir.empty())
        save_checkpoint(model, options.checkpoint_dir / "model.ckpt");
    return report;
}

std::vector<Tensor> predict(GanModel& model, const std::vector<Tensor>& inputs, bool stochastic,
                            std::uint64_t seed) {
    std::vector<Tensor> outputs;
    outputs.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Rng rng(derive_seed(seed, {0x9e0u, std::uint64_t(i)}));
        outputs.push_back(generator_forward(model, inputs[i], stochastic, &rng));
    }
    return outputs;
}

namespace {

constexpr char kCheckpointMagic[8] = {'G', 'C', 'C', 'K', 'P', 'T', '0', '1'};

nlohmann::ordered_json generator_config_json(const nn::GeneratorConfig& g) {
    return {{"input_size", g.input_size},
            {"base_channels", g.base_channels},
            {"depth", g.depth},
            {"dropout_rate", g.dropout_rate}};
}

nlohmann::ordered_json discriminator_config_json(const nn::DiscriminatorConfig& d) {
    return {{"patch_levels", d.patch_levels}, {"base_channels", d.base_channels}};
}

nlohmann::ordered_json train_config_json(const TrainConfig& t) {
    return {{"lambda_l1", t.lambda_l1},
            {"learning_rate", t.learning_rate},
            {"batch_size", t.batch_size},
            {"epochs", t.epochs},
            {"beta1", t.beta1},
            {"beta2", t.beta2},
            {"seed", t.seed},
            {"checkpoint_interval", t.checkpoint_interval}};
}

}  // namespace

void save_checkpoint(const GanModel& model, const std::filesystem::path& path) {
    auto& mutable_model = const_cast<GanModel&>(model);
    auto params = mutable_model.generator.params();
    auto d_params = mutable_model.discriminator.params();
    params.insert(params.end(), d_params.begin(), d_params.end());

    nlohmann::ordered_json header;
    header["format"] = 1;
    header["generator_config"] = generator_config_json(model.generator_config);
    header["discriminator_config"] = discriminator_config_json(model.discriminator_config);
    header["train_config"] = train_config_json(model.train_config);
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const auto& e : model.history)
        hist.push_back({{"epoch", e.epoch},
                        {"loss_d", e.loss_d},
                        {"loss_g_adv", e.loss_g_adv},
                        {"loss_g_l1", e.loss_g_l1},
                        {"lr", e.lr}});
    header["history"] = std::move(hist);
    nlohmann::ordered_json arrays = nlohmann::ordered_json::array();
    for (const auto& p : params)
        arrays.push_back({{"name", p.name}, {"shape", p.shape}});
    header["arrays"] = std::move(arrays);

    std::string json_bytes = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path.string());
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    std::uint64_t len = json_bytes.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(json_bytes.data(), std::streamsize(json_bytes.size()));
    std::vector<float> buf;
    for (const auto& p : params) {
        buf.resize(p.value->size());
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = float((*p.value)[i]);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  std::streamsize(buf.size() * sizeof(float)));
    }
    if (!out) throw DataError("checkpoint write failed: " + path.string());
}

GanModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw DataError("not a growthcast checkpoint: " + path.string());
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string json_bytes(len, '\0');
    in.read(json_bytes.data(), std::streamsize(len));
    if (!in) throw DataError("truncated checkpoint header: " + path.string());

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(json_bytes);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid checkpoint header: " + std::string(e.what()));
    }

    nn::GeneratorConfig g;
    const auto& gj = header.at("generator_config");
    g.input_size = gj.at("input_size").get<int>();
    g.base_channels = gj.at("base_channels").get<int>();
    g.depth = gj.at("depth").get<int>();
    g.dropout_rate = gj.at("dropout_rate").get<double>();
    nn::DiscriminatorConfig d;
    const auto& dj = header.at("discriminator_config");
    d.patch_levels = dj.at("patch_levels").get<int>();
    d.base_channels = dj.at("base_channels").get<int>();
    TrainConfig t;
    const auto& tj = header.at("train_config");
    t.lambda_l1 = tj.at("lambda_l1").get<double>();
    t.learning_rate = tj.at("learning_rate").get<double>();
    t.batch_size = tj.at("batch_size").get<int>();
    t.epochs = tj.at("epochs").get<int>();
    t.beta1 = tj.at("beta1").get<double>();
    t.beta2 = tj.at("beta2").get<double>();
    t.seed = tj.at("seed").get<std::uint64_t>();
    t.checkpoint_interval = tj.at("checkpoint_interval").get<int>();

    GanModel model = make_model(g, d, t);
    for (const auto& e : header.at("history")) {
        EpochStats s;
        s.epoch = e.at("epoch").get<int>();
        s.loss_d = e.at("loss_d").get<double>();
        s.loss_g_adv = e.at("loss_g_adv").get<double>();
        s.loss_g_l1 = e.at("loss_g_l1").get<double>();
        s.lr = e.at("lr").get<double>();
        model.history.push_back(s);
    }

    auto params = model.generator.params();
    auto d_params = model.discriminator.params();
    params.insert(params.end(), d_params.begin(), d_params.end());
    std::size_t idx = 0;
    std::vector<float> buf;
    for (const auto& aj : header.at("arrays")) {
        if (idx >= params.size()) throw DataError("checkpoint has more arrays than the model");
        auto& p = params[idx++];
        if (aj.at("name").get<std::string>() != p.name)
            throw DataError("checkpoint array order mismatch at '" +
                            aj.at("name").get<std::string>() + "', expected '" + p.name + "'");
        std::size_t n = 1;
        for (int s : aj.at("shape").get<std::vector<int>>()) n *= std::size_t(s);
        if (n != p.value->size())
            throw DataError("checkpoint shape mismatch for '" + p.name + "'");
        buf.resize(n);
        in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(n * sizeof(float)));
        if (!in) throw DataError("truncated checkpoint payload at '" + p.name + "'");
        for (std::size_t i = 0; i < n; ++i) (*p.value)[i] = double(buf[i]);
    }
    if (idx != params.size()) throw DataError("checkpoint is missing parameter arrays");
    return model;
}

void write_history_csv(const std::vector<EpochStats>& history,
                       const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"epoch", "loss_d", "loss_g_adv", "loss_g_l1", "lr"};
    for (const auto& e : history)
        table.rows.push_back({std::to_string(e.epoch), format_double(e.loss_d),
                              format_double(e.loss_g_adv), format_double(e.loss_g_l1),
                              format_double(e.lr)});
    csv::write_file(path, table);
}

}  // namespace growthcast
