#include "doctest.h"

#include <cmath>

#include "growthcast/fid.hpp"
#include "growthcast/rng.hpp"

using namespace growthcast;
using namespace growthcast::fid;

namespace {

GaussianStats diag_gaussian(const Eigen::VectorXd& mean, const Eigen::VectorXd& variances) {
    GaussianStats s;
    s.mean = mean;
    s.cov = variances.asDiagonal();
    s.n = 1000;
    return s;
}

Tensor noise_image(int size, Rng& rng, double mean_shift = 0.0) {
    Tensor t(3, size, size);
    for (std::size_t i = 0; i < t.size(); ++i)
        t.data()[i] = std::clamp(mean_shift + 0.3 * rng.normal(), -1.0, 1.0);
    return t;
}

}  // namespace

TEST_CASE("fit_gaussian: hand-computable cases") {
    Eigen::MatrixXd rows(2, 2);
    rows << 0, 0, 2, 2;
    GaussianStats s = fit_gaussian(rows);
    CHECK(s.mean(0) == doctest::Approx(1.0));
    CHECK(s.mean(1) == doctest::Approx(1.0));
    CHECK(s.cov(0, 0) == doctest::Approx(2.0));  // divisor n-1 = 1
    CHECK(s.cov(0, 1) == doctest::Approx(2.0));
    CHECK(s.cov(1, 0) == doctest::Approx(2.0));
    CHECK(s.cov(1, 1) == doctest::Approx(2.0));
    CHECK(s.n == 2);

    // identical rows are allowed: zero covariance
    Eigen::MatrixXd same = Eigen::MatrixXd::Ones(5, 3) * 4.2;
    GaussianStats z = fit_gaussian(same);
    CHECK(z.cov.norm() == doctest::Approx(0.0));

    CHECK_THROWS_AS(fit_gaussian(Eigen::MatrixXd::Ones(1, 3)), DataError);
}

TEST_CASE("fit_gaussian matches a two-pass textbook oracle") {
    Rng rng(33);
    Eigen::MatrixXd features(100, 5);
    for (long r = 0; r < 100; ++r)
        for (long c = 0; c < 5; ++c) features(r, c) = rng.normal(0.3 * double(c), 1.0 + 0.2 * c);
    GaussianStats s = fit_gaussian(features);

    for (long c = 0; c < 5; ++c) {
        double mean = 0;
        for (long r = 0; r < 100; ++r) mean += features(r, c);
        mean /= 100;
        CHECK(s.mean(c) == doctest::Approx(mean).epsilon(1e-10));
        for (long c2 = 0; c2 < 5; ++c2) {
            double mean2 = features.col(c2).mean();
            double cov = 0;
            for (long r = 0; r < 100; ++r)
                cov += (features(r, c) - mean) * (features(r, c2) - mean2);
            cov /= 99.0;
            CHECK(s.cov(c, c2) == doctest::Approx(cov).epsilon(1e-10));
        }
    }
    CHECK((s.cov - s.cov.transpose()).norm() < 1e-8);
}

TEST_CASE("frechet_distance: identical distributions, 1-D analytic, diagonal case") {
    Rng rng(44);
    Eigen::MatrixXd feats(50, 4);
    for (long r = 0; r < 50; ++r)
        for (long c = 0; c < 4; ++c) feats(r, c) = rng.normal();
    GaussianStats a = fit_gaussian(feats);
    CHECK(frechet_distance(a, a) <= 1e-6);

    GaussianStats p = diag_gaussian(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
    Eigen::VectorXd mu1(1);
    mu1 << 1.0;
    GaussianStats q = diag_gaussian(mu1, Eigen::VectorXd::Ones(1));
    CHECK(frechet_distance(p, q) == doctest::Approx(1.0).epsilon(1e-9));

    Eigen::VectorXd va(2), vb(2), zero2 = Eigen::VectorXd::Zero(2);
    va << 1, 4;
    vb << 9, 16;
    CHECK(frechet_distance(diag_gaussian(zero2, va), diag_gaussian(zero2, vb)) ==
          doctest::Approx(8.0).epsilon(1e-9));  // (1-3)^2 + (2-4)^2
}

TEST_CASE("frechet_distance properties: symmetry, commuting closed form, translation") {
    Rng rng(55);
    for (int trial = 0; trial < 25; ++trial) {
        int d = trial % 2 ? 8 : 3;
        Eigen::VectorXd ma(d), mb(d), va(d), vb(d);
        for (int i = 0; i < d; ++i) {
            ma(i) = rng.normal();
            mb(i) = rng.normal();
            va(i) = 0.1 + rng.uniform(0, 3);
            vb(i) = 0.1 + rng.uniform(0, 3);
        }
        GaussianStats a = diag_gaussian(ma, va), b = diag_gaussian(mb, vb);
        double ab = frechet_distance(a, b);
        double ba = frechet_distance(b, a);
        CHECK(std::abs(ab - ba) < 1e-6);
        CHECK(ab >= 0.0);

        double closed = (ma - mb).squaredNorm();
        for (int i = 0; i < d; ++i) {
            double diff = std::sqrt(va(i)) - std::sqrt(vb(i));
            closed += diff * diff;
        }
        CHECK(ab == doctest::Approx(closed).epsilon(1e-8));

        Eigen::VectorXd shift(d);
        for (int i = 0; i < d; ++i) shift(i) = rng.normal();
        GaussianStats a2 = a, b2 = b;
        a2.mean += shift;
        b2.mean += shift;
        CHECK(std::abs(frechet_distance(a2, b2) - ab) < 1e-8);
    }
}

TEST_CASE("frechet_distance: regularization of singular covariances is reported") {
    GaussianStats a, b;
    a.mean = Eigen::VectorXd::Zero(3);
    b.mean = Eigen::VectorXd::Zero(3);
    a.cov = Eigen::MatrixXd::Zero(3, 3);  // singular
    b.cov = Eigen::MatrixXd::Identity(3, 3);
    a.n = b.n = 10;
    FrechetDiagnostics diag;
    double dist = frechet_distance(a, b, &diag);
    CHECK(diag.regularized);
    CHECK(dist > 0.0);

    GaussianStats c = b;
    FrechetDiagnostics diag2;
    frechet_distance(b, c, &diag2);
    CHECK_FALSE(diag2.regularized);

    GaussianStats wrong;
    wrong.mean = Eigen::VectorXd::Zero(2);
    wrong.cov = Eigen::MatrixXd::Identity(2, 2);
    wrong.n = 10;
    CHECK_THROWS_AS(frechet_distance(a, wrong), DataError);
}

TEST_CASE("random projection embedding: shape, duplicates, permutation") {
    RandomProjectionEmbedding provider(7, 32, 16);
    CHECK(provider.feature_dim() == 32);

    Rng rng(8);
    std::vector<Tensor> images;
    for (int i = 0; i < 5; ++i) images.push_back(noise_image(16, rng));
    images.push_back(images[0]);  // duplicate

    Eigen::MatrixXd feats = provider.embed(images);
    CHECK(feats.rows() == 6);
    CHECK(feats.cols() == 32);
    CHECK((feats.row(0) - feats.row(5)).norm() == doctest::Approx(0.0));

    std::vector<Tensor> reversed(images.rbegin(), images.rend());
    Eigen::MatrixXd rev = provider.embed(reversed);
    for (int i = 0; i < 6; ++i)
        CHECK((rev.row(i) - feats.row(5 - i)).norm() == doctest::Approx(0.0));

    // images of a different native size are resized to the provider's input
    std::vector<Tensor> mixed = {noise_image(24, rng), noise_image(24, rng)};
    CHECK(provider.embed(mixed).cols() == 32);
}

TEST_CASE("pretrained embedding: missing model file is a load error") {
    CHECK_THROWS_AS(PretrainedEmbedding("/nonexistent/model.onnx", 2048, 299), DataError);
}

TEST_CASE("fid_protocol: zero self-distance and stability across resamples") {
    Rng rng(9);
    RandomProjectionEmbedding provider(7, 16, 16);

    std::vector<Tensor> set_a, set_b, set_c;
    for (int i = 0; i < 500; ++i) {
        set_a.push_back(noise_image(16, rng));
        set_b.push_back(noise_image(16, rng));
        set_c.push_back(noise_image(16, rng));
    }

    FidTriple self = fid_protocol(provider, set_a, set_a, set_b);
    CHECK(self.fid_rg <= 1e-6);
    CHECK(self.n_r == 500);

    // three disjoint samples of one distribution: all three scores comparable
    FidTriple triple = fid_protocol(provider, set_a, set_b, set_c);
    double lo = std::min({triple.fid_rg, triple.fid_rt, triple.fid_gt});
    double hi = std::max({triple.fid_rg, triple.fid_rt, triple.fid_gt});
    CHECK(lo > 0.0);
    CHECK(hi <= 2.0 * lo);

    CHECK_THROWS_AS(fid_protocol(provider, {set_a[0]}, set_b, set_c), DataError);
}

TEST_CASE("fid verdict and JSON schema") {
    FidTriple row;  // a published test-split row
    row.fid_rg = 34.18;
    row.fid_rt = 55.62;
    row.fid_gt = 51.63;
    row.n_r = row.n_g = row.n_t = 100;
    CHECK(fid_verdict(row) ==
          "FID(r,g) < FID(r,t): generated distribution closer to test-reference than training "
          "is");
    row.fid_rg = 60.0;
    CHECK(fid_verdict(row).find("FID(r,g) >= FID(r,t)") == 0);

    std::string json = fid_to_json(row);
    for (const char* key : {"fid_rg", "fid_rt", "fid_gt", "n_r", "n_g", "n_t", "regularized"})
        CHECK(json.find('"' + std::string(key) + '"') != std::string::npos);
    FidTriple back = fid_from_json(json);
    CHECK(back.fid_rg == row.fid_rg);
    CHECK(back.n_t == 100);
    CHECK_THROWS_AS(fid_from_json("{"), DataError);
}
