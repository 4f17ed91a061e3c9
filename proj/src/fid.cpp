#include "growthcast/fid.hpp"

#include <cmath>

#include <opencv2/dnn.hpp>

#include "json.hpp"

#include "growthcast/preprocess.hpp"
#include "growthcast/rng.hpp"

namespace growthcast::fid {

namespace {

Eigen::VectorXd flatten_resized(const Tensor& image, int side) {
    validate_image_tensor(image, "embedding input");
    Tensor r = resize_bilinear(image, side, side);
    Eigen::VectorXd v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[long(i)] = r.data()[i];
    return v;
}

}  // namespace

RandomProjectionEmbedding::RandomProjectionEmbedding(std::uint64_t seed, int feature_dim,
                                                     int input_size)
    : input_size_(input_size) {
    if (feature_dim < 1 || input_size < 1)
        throw ConfigError("embedding: feature_dim and input_size must be positive");
    const long in_dim = 3L * input_size * input_size;
    projection_.resize(feature_dim, in_dim);
    Rng rng(derive_seed(seed, {0xf1d}));
    const double scale = 1.0 / std::sqrt(double(in_dim));
    for (long r = 0; r < projection_.rows(); ++r)
        for (long c = 0; c < projection_.cols(); ++c) projection_(r, c) = scale * rng.normal();
}

Eigen::MatrixXd RandomProjectionEmbedding::embed(const std::vector<Tensor>& images) const {
    if (images.empty()) throw DataError("embed: empty image list");
    Eigen::MatrixXd out(long(images.size()), projection_.rows());
    for (std::size_t i = 0; i < images.size(); ++i)
        out.row(long(i)) = (projection_ * flatten_resized(images[i], input_size_)).transpose();
    return out;
}

struct PretrainedEmbedding::Impl {
    mutable cv::dnn::Net net;
};

PretrainedEmbedding::PretrainedEmbedding(const std::filesystem::path& model_source,
                                         int feature_dim, int input_size)
    : impl_(std::make_unique<Impl>()), feature_dim_(feature_dim), input_size_(input_size) {
    if (!std::filesystem::exists(model_source))
        throw DataError("embedding model not found: " + model_source.string());
    try {
        impl_->net = cv::dnn::readNet(model_source.string());
    } catch (const cv::Exception& e) {
        throw DataError("cannot load embedding model '" + model_source.string() +
                        "': " + e.what());
    }
    if (impl_->net.empty())
        throw DataError("embedding model is empty: " + model_source.string());
}

PretrainedEmbedding::~PretrainedEmbedding() = default;

Eigen::MatrixXd PretrainedEmbedding::embed(const std::vector<Tensor>& images) const {
    if (images.empty()) throw DataError("embed: empty image list");
    Eigen::MatrixXd out(long(images.size()), feature_dim_);
    for (std::size_t i = 0; i < images.size(); ++i) {
        Tensor r = resize_bilinear(images[i], input_size_, input_size_);
        // NCHW float blob in the network's [-1, 1] range.
        cv::Mat blob(std::vector<int>{1, 3, input_size_, input_size_}, CV_32F);
        float* dst = reinterpret_cast<float*>(blob.data);
        for (std::size_t j = 0; j < r.size(); ++j) dst[j] = float(r.data()[j]);
        cv::Mat feat;
        try {
            impl_->net.setInput(blob);
            feat = impl_->net.forward();
        } catch (const cv::Exception& e) {
            throw DataError(std::string("embedding model inference failed: ") + e.what());
        }
        cv::Mat flat = feat.reshape(1, 1);
        if (flat.total() != std::size_t(feature_dim_))
            throw DataError("embedding model produced " + std::to_string(flat.total()) +
                            " features, expected " + std::to_string(feature_dim_));
        for (int j = 0; j < feature_dim_; ++j) out(long(i), j) = double(flat.at<float>(0, j));
    }
    return out;
}

GaussianStats fit_gaussian(const Eigen::MatrixXd& features) {
    const long n = features.rows();
    if (n < 2) throw DataError("fit_gaussian: need at least 2 samples, got " + std::to_string(n));
    GaussianStats stats;
    stats.n = n;
    stats.mean = features.colwise().mean();
    Eigen::MatrixXd centered = features.rowwise() - stats.mean.transpose();
    stats.cov = (centered.transpose() * centered) / double(n - 1);
    stats.cov = ((stats.cov + stats.cov.transpose()) / 2.0).eval();
    return stats;
}

namespace {

// Eigendecomposition-based PSD square root; negative eigenvalues clamp to 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericError(std::string("eigendecomposition failed for ") + what);
    Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericError(std::string("eigendecomposition failed for ") + what);
    return solver.eigenvalues().minCoeff();
}

}  // namespace

double frechet_distance(const GaussianStats& a, const GaussianStats& b,
                        FrechetDiagnostics* diagnostics) {
    if (a.mean.size() != b.mean.size())
        throw DataError("frechet_distance: feature dimensions differ (" +
                        std::to_string(a.mean.size()) + " vs " + std::to_string(b.mean.size()) +
                        ")");
    Eigen::MatrixXd ca = a.cov, cb = b.cov;

    FrechetDiagnostics local;
    local.min_eigenvalue_a = min_eigenvalue(ca, "covariance A");
    local.min_eigenvalue_b = min_eigenvalue(cb, "covariance B");
    if (local.min_eigenvalue_a < 1e-10 || local.min_eigenvalue_b < 1e-10) {
        local.regularized = true;
        ca.diagonal().array() += 1e-6;
        cb.diagonal().array() += 1e-6;
    }
    if (diagnostics) *diagnostics = local;

    Eigen::MatrixXd sa_half = psd_sqrt(ca, "covariance A");
    Eigen::MatrixXd inner = sa_half * cb * sa_half;
    inner = ((inner + inner.transpose()) / 2.0).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(inner);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigendecomposition failed for covariance product");
    double trace_sqrt = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    double dist = (a.mean - b.mean).squaredNorm() + ca.trace() + cb.trace() - 2.0 * trace_sqrt;
    if (!std::isfinite(dist)) throw NumericError("frechet_distance: non-finite result");
    if (dist < 0.0) {
        if (dist < -1e-6)
            throw NumericError("frechet_distance: negative result " + std::to_string(dist) +
                               " beyond tolerance");
        dist = 0.0;
    }
    return dist;
}

FidTriple fid_protocol(const EmbeddingProvider& provider,
                       const std::vector<Tensor>& reference_test,
                       const std::vector<Tensor>& generated,
                       const std::vector<Tensor>& reference_train) {
    for (auto [set, name] : {std::pair{&reference_test, "reference_test"},
                             {&generated, "generated"},
                             {&reference_train, "reference_train"}}) {
        if (set->size() < 2)
            throw DataError(std::string("fid_protocol: set '") + name + "' needs >= 2 images");
    }
    GaussianStats r = fit_gaussian(provider.embed(reference_test));
    GaussianStats g = fit_gaussian(provider.embed(generated));
    GaussianStats t = fit_gaussian(provider.embed(reference_train));

    FidTriple triple;
    triple.n_r = r.n;
    triple.n_g = g.n;
    triple.n_t = t.n;
    FrechetDiagnostics d1, d2, d3;
    triple.fid_rg = frechet_distance(r, g, &d1);
    triple.fid_rt = frechet_distance(r, t, &d2);
    triple.fid_gt = frechet_distance(g, t, &d3);
    triple.regularized = d1.regularized || d2.regularized || d3.regularized;
    return triple;
}

std::string fid_verdict(const FidTriple& triple) {
    if (triple.fid_rg < triple.fid_rt)
        return "FID(r,g) < FID(r,t): generated distribution closer to test-reference than "
               "training is";
    return "FID(r,g) >= FID(r,t): training distribution closer to test-reference than "
           "generated is";
}

std::string fid_to_json(const FidTriple& triple) {
    nlohmann::ordered_json j;
    j["fid_rg"] = triple.fid_rg;
    j["fid_rt"] = triple.fid_rt;
    j["fid_gt"] = triple.fid_gt;
    j["n_r"] = triple.n_r;
    j["n_g"] = triple.n_g;
    j["n_t"] = triple.n_t;
    j["regularized"] = triple.regularized;
    return j.dump(2) + "\n";
}

FidTriple fid_from_json(const std::string& text) {
    FidTriple t;
    try {
        auto j = nlohmann::json::parse(text);
        t.fid_rg = j.at("fid_rg").get<double>();
        t.fid_rt = j.at("fid_rt").get<double>();
        t.fid_gt = j.at("fid_gt").get<double>();
        t.n_r = j.at("n_r").get<long>();
        t.n_g = j.at("n_g").get<long>();
        t.n_t = j.at("n_t").get<long>();
        t.regularized = j.at("regularized").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid FID JSON: ") + e.what());
    }
    return t;
}

}  // namespace growthcast::fid
