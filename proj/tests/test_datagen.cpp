#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "seqlasso/datagen.hpp"

using namespace seqlasso;

namespace {

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("dimension table") {
    CHECK(dims(100).p0 == 8);
    CHECK(dims(100).p == 268);
    CHECK(dims(200).p0 == 9);
    CHECK(dims(200).p == 672);
    CHECK(dims(500).p0 == 11);
    CHECK(dims(500).p == 3170);
    CHECK_THROWS_AS(dims(9), Error);
}

TEST_CASE("type 2 coefficients") {
    Rng rng(1, 0);
    const Eigen::VectorXd b = gen_coefficients(2, 8, 100, rng);
    CHECK(b(0) == doctest::Approx(2.0 * std::exp(-0.15 * std::log(100.0))).epsilon(1e-14));
    CHECK(b(0) == doctest::Approx(1.0024).epsilon(1e-4));
    CHECK(b(3) == doctest::Approx(2.0 * b(0)));
}

TEST_CASE("type 1 coefficients") {
    CHECK(std::erfc(0.1 / (kTypeOneSigmaZ * std::sqrt(2.0))) == doctest::Approx(0.25).epsilon(1e-12));
    Rng rng(3, 0);
    const Eigen::VectorXd b = gen_coefficients(1, 10000, 100, rng);
    const double floor = 4.0 * std::pow(100.0, -0.15);
    int negative = 0;
    for (Index j = 0; j < b.size(); ++j) {
        CHECK(std::abs(b(j)) >= floor);
        negative += b(j) < 0;
    }
    CHECK(std::abs(negative / 10000.0 - 0.4) <= 0.03);
}

TEST_CASE("A3 clusters") {
    CHECK(a3_support(268, 8) == std::vector<Index>{0, 1, 2, 67, 68, 69, 134, 135});
    CHECK(a3_support(672, 9).size() == 9);
    const auto s11 = a3_support(3170, 11);
    REQUIRE(s11.size() == 11);
    CHECK(s11[9] == 3 * (3170 / 4));
    CHECK(s11[10] == 3 * (3170 / 4) + 1);
}

TEST_CASE("A1 columns are nearly uncorrelated") {
    Rng rng(5, 0);
    const Design d = gen_design({StructureKind::A1, 0.0}, 500, 200, 11, rng);
    CHECK(d.support.size() == 11);
    const Eigen::MatrixXd c = sample_cov(d.x);
    int pairs = 0, within = 0;
    for (Index i = 0; i < 200; ++i)
        for (Index j = i + 1; j < 200; ++j) {
            ++pairs;
            within += std::abs(c(i, j) / std::sqrt(c(i, i) * c(j, j))) <= 4.0 / std::sqrt(500.0);
        }
    CHECK(within >= 0.99 * pairs);
}

TEST_CASE("A2 and A3 sample covariances") {
    Rng rng(6, 0);
    const Design a2 = gen_design({StructureKind::A2, 0.5}, 4000, 12, 3, rng);
    CHECK((sample_cov(a2.x) - constant_correlation(12, 0.5)).cwiseAbs().maxCoeff() < 0.06);
    Rng rng3(7, 0);
    const Design a3 = gen_design({StructureKind::A3, 0.5}, 4000, 12, 3, rng3);
    CHECK((sample_cov(a3.x) - ar1_correlation(12, 0.5)).cwiseAbs().maxCoeff() < 0.06);
    CHECK(a3.sigma_causal(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("B1 causal block is the identity") {
    Rng rng(8, 0);
    const Design d = gen_design({StructureKind::B1, 0.0}, 2000, 40, 6, rng);
    Eigen::MatrixXd xc(2000, 6);
    for (Index k = 0; k < 6; ++k) xc.col(k) = d.x.col(d.support[static_cast<std::size_t>(k)]);
    // 5 sd of a sample covariance entry
    CHECK((sample_cov(xc) - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 5.0 / std::sqrt(2000.0));
}

TEST_CASE("B2 non-causal covariance with the causal block") {
    const double rho = 0.5;
    const Index p0 = 5;
    Rng rng(9, 0);
    const Design d = gen_design({StructureKind::B2, rho}, 2000, 30, p0, rng);
    const Eigen::MatrixXd c = sample_cov(d.x);
    // Cov(X_j, X_k) = (1/p0) sum_l Sigma_kl for non-causal j.
    const double expected = (1.0 + (p0 - 1) * rho) / p0;
    Index j = 0;
    while (std::find(d.support.begin(), d.support.end(), j) != d.support.end()) ++j;
    for (Index k : d.support) CHECK(std::abs(c(j, k) - expected) < 5.0 / std::sqrt(2000.0));
}

TEST_CASE("B3 places the causal block first") {
    Rng rng(10, 0);
    const Design d = gen_design({StructureKind::B3, 0.5}, 50, 30, 4, rng);
    CHECK(d.support == std::vector<Index>{0, 1, 2, 3});
    CHECK(d.sigma_causal(0, 2) == doctest::Approx(0.25));
}

TEST_CASE("rho is validated") {
    Rng rng(11, 0);
    try {
        gen_design({StructureKind::A2, 1.0}, 20, 10, 2, rng);
        FAIL("expected InvalidRho");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidRho);
    }
    CHECK_NOTHROW(gen_design({StructureKind::A1, 7.0}, 20, 10, 2, rng));
}

TEST_CASE("noise variance") {
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(4, 1.0, 2.0);
    const Eigen::MatrixXd s = constant_correlation(4, 0.5);
    const double q = b.dot(s * b);
    CHECK(noise_variance(b, s, 0.5) == doctest::Approx(q));
    CHECK(noise_variance(b, s, 1.0) == 0.0);
    CHECK(q == doctest::Approx(0.5 * b.squaredNorm() + 0.5 * b.sum() * b.sum()));
    Rng rng(12, 0);
    const Eigen::VectorXd b2 = gen_coefficients(2, 8, 100, rng);
    const Eigen::MatrixXd s2 = constant_correlation(8, 0.5);
    CHECK(noise_variance(b2, s2, 0.8) ==
          doctest::Approx((0.5 * b2.squaredNorm() + 0.5 * b2.sum() * b2.sum()) * 0.25));
    CHECK_THROWS_AS(noise_variance(b, s, 0.0), Error);
}

TEST_CASE("streams are reproducible and distinct") {
    Rng a(42, 3, 1), b(42, 3, 1), c(42, 4, 1), e(42, 3, 2);
    const double va = a.normal();
    CHECK(va == b.normal());
    CHECK(va != c.normal());
    CHECK(va != e.normal());
    Rng r1(1, 0), r2(1, 0);
    const Design d1 = gen_design({StructureKind::B2, 0.3}, 30, 40, 4, r1);
    const Design d2 = gen_design({StructureKind::B2, 0.3}, 30, 40, 4, r2);
    CHECK(d1.x == d2.x);
    CHECK(d1.support == d2.support);
}

}
