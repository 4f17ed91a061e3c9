#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "growthcast/tensor.hpp"

namespace growthcast::fid {

// Maps image sets to row-per-image feature matrices. Providers are read-only
// after construction and safe to share.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual int feature_dim() const = 0;
    virtual int input_size() const = 0;
    // Rows follow input order; each image is resized to input_size first.
    virtual Eigen::MatrixXd embed(const std::vector<Tensor>& images) const = 0;
};

// Deterministic seeded random projection of resized pixels; stands in for the
// pretrained 2048-d classifier so the distance math is testable offline.
class RandomProjectionEmbedding : public EmbeddingProvider {
public:
    RandomProjectionEmbedding(std::uint64_t seed, int feature_dim, int input_size);
    int feature_dim() const override { return int(projection_.rows()); }
    int input_size() const override { return input_size_; }
    Eigen::MatrixXd embed(const std::vector<Tensor>& images) const override;

private:
    int input_size_;
    Eigen::MatrixXd projection_;
};

// Pretrained classifier loaded from a portable interchange file (ONNX);
// features come from the flattened pooling output.
class PretrainedEmbedding : public EmbeddingProvider {
public:
    PretrainedEmbedding(const std::filesystem::path& model_source, int feature_dim,
                        int input_size);
    ~PretrainedEmbedding() override;
    int feature_dim() const override { return feature_dim_; }
    int input_size() const override { return input_size_; }
    Eigen::MatrixXd embed(const std::vector<Tensor>& images) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int feature_dim_;
    int input_size_;
};

struct GaussianStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // symmetric
    long n = 0;
};

// Column means and unbiased (n-1) covariance, symmetrized. n must be >= 2.
GaussianStats fit_gaussian(const Eigen::MatrixXd& features);

struct FrechetDiagnostics {
    bool regularized = false;
    double min_eigenvalue_a = 0.0;
    double min_eigenvalue_b = 0.0;
};

// |mu_a - mu_b|^2 + Tr(Sa + Sb - 2 (Sa Sb)^{1/2}), evaluated through the
// symmetric product form Tr((Sa^{1/2} Sb Sa^{1/2})^{1/2}). Near-singular
// covariances (min eigenvalue < 1e-10) get 1e-6 I added to both sides, noted
// in the diagnostics. Tiny negative totals within 1e-6 clamp to zero.
double frechet_distance(const GaussianStats& a, const GaussianStats& b,
                        FrechetDiagnostics* diagnostics = nullptr);

struct FidTriple {
    double fid_rg = 0.0;  // test-reference vs generated
    double fid_rt = 0.0;  // test-reference vs train-reference
    double fid_gt = 0.0;  // generated vs train-reference
    long n_r = 0, n_g = 0, n_t = 0;
    bool regularized = false;
};

// Embeds each set once and evaluates the three pairwise distances.
FidTriple fid_protocol(const EmbeddingProvider& provider,
                       const std::vector<Tensor>& reference_test,
                       const std::vector<Tensor>& generated,
                       const std::vector<Tensor>& reference_train);

// Human-readable comparison of fid_rg against fid_rt.
std::string fid_verdict(const FidTriple& triple);

std::string fid_to_json(const FidTriple& triple);
FidTriple fid_from_json(const std::string& text);

}  // namespace growthcast::fid
