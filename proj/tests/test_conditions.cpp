#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "seqlasso/conditions.hpp"
#include "seqlasso/datagen.hpp"

using namespace seqlasso;

namespace {

std::vector<Index> range(Index a, Index b) {
    std::vector<Index> v(static_cast<std::size_t>(b - a));
    std::iota(v.begin(), v.end(), a);
    return v;
}

Coefficients coefs(const std::vector<Index>& s, const std::vector<double>& b) {
    Coefficients c;
    for (std::size_t k = 0; k < s.size(); ++k) c.beta[s[k]] = b[k];
    return c;
}

const ConditionReport& find(const ConditionSuite& suite, const std::string& prefix) {
    for (const auto& r : suite.reports)
        if (r.name.rfind(prefix, 0) == 0) return r;
    FAIL("missing report " << prefix);
    return suite.reports.front();
}

}  // namespace

TEST_SUITE("conditions") {

TEST_CASE("constant correlation: conditional block matches the closed form") {
    for (double rho : {0.3, 0.5, 0.7}) {
        const Covariance cov(constant_correlation(12, rho));
        for (Index m = 0; m <= 3; ++m) {
            const SpecialCaseOne cf = special_case_one_closed_form(rho, m);
            const double denom = 1.0 + (static_cast<double>(m) - 1.0) * rho;
            CHECK(cf.a == doctest::Approx((1 - rho) * (rho * static_cast<double>(m) + 1) / denom));
            CHECK(cf.b == doctest::Approx(rho * (1 - rho) / denom));
            const auto tie = range(m, m + 4);
            const Eigen::MatrixXd g = conditional_block(cov, range(0, m), tie, tie);
            CHECK(g(0, 0) == doctest::Approx(cf.a).epsilon(1e-12));
            CHECK(g(1, 2) == doctest::Approx(cf.b).epsilon(1e-12));
            const ConditionReport r = check_cone(cov, range(0, m), tie);
            CHECK(r.holds);
            const Eigen::VectorXd sol = g.ldlt().solve(Eigen::VectorXd::Ones(4));
            CHECK((sol.array() - cf.cone_value(4)).abs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("cone condition: both forms agree and detect failure") {
    Eigen::Matrix3d g;
    g << 1.0, 0.6, 0.0, 0.6, 1.0, 0.6, 0.0, 0.6, 1.0;
    const ConeResult bad = cone_condition(g, {0, 1, 2});
    CHECK_FALSE(bad.report.holds);
    CHECK(bad.forms_agree);
    CHECK(bad.solution(1) < 0.0);
    CHECK(bad.row_sum_form.minCoeff() < 0.0);
    const ConeResult good = cone_condition(Eigen::Matrix3d::Identity(), {0, 1, 2});
    CHECK(good.report.holds);
    CHECK(good.report.margin == doctest::Approx(1.0));
    // Negative correlation becomes harmless once the signs are applied.
    Eigen::Matrix2d n2;
    n2 << 1.0, -0.5, -0.5, 1.0;
    CHECK(cone_condition(n2, {0, 1}, {1.0, -1.0}).report.holds);
    Eigen::Matrix2d sing;
    sing << 1.0, 1.0, 1.0, 1.0;
    const ConeResult s = cone_condition(sing, {0, 1});
    CHECK(s.rank_deficient);
    CHECK_FALSE(s.report.holds);
}

TEST_CASE("A1 on an orthonormal design") {
    const Covariance cov(Eigen::MatrixXd::Identity(10, 10));
    const Coefficients b = coefs({1, 4, 6}, {3.0, -2.0, 1.0});
    const ConditionReport r = check_a1(cov, {}, b);
    CHECK(r.holds);
    CHECK(r.quantity == doctest::Approx(0.0));
    CHECK(check_a1(cov, {1}, b).holds);
    CHECK_THROWS_AS(check_a1(cov, {1, 4, 6}, b), Error);
    CHECK_THROWS_AS(check_a1(cov, {2}, b), Error);
}

TEST_CASE("irrepresentable under constant correlation") {
    const Index p0 = 8;
    for (double rho : {0.3, 0.5, 0.7}) {
        const Covariance cov(constant_correlation(40, rho));
        const Coefficients b = coefs(range(0, p0), std::vector<double>(p0, 1.0));
        const ConditionReport r = check_irrepresentable(cov, b);
        const double expected = rho * p0 / (1.0 + (p0 - 1) * rho);
        CHECK(r.quantity == doctest::Approx(expected).epsilon(1e-12));
        CHECK(r.holds == (expected < 1.0));
    }
}

TEST_CASE("special case II sits exactly on the irrepresentable boundary") {
    const ConditionSuite suite = evaluate_special_case(2, 8, 0.0);
    const ConditionReport& ir = find(suite, "irrepresentable");
    CHECK(ir.quantity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(ir.quantity - 1.0) <= 1e-10);
    CHECK_FALSE(ir.holds);
    CHECK(ir.boundary);
    int a1 = 0;
    for (const auto& r : suite.reports)
        if (r.name.rfind("A1", 0) == 0) {
            CHECK(r.holds);
            ++a1;
        }
    CHECK(a1 == 8);
}

TEST_CASE("special case I holds A1 and A2 along the whole path") {
    for (double rho : {0.3, 0.5, 0.7}) {
        const ConditionSuite suite = evaluate_special_case(1, 8, rho);
        for (const auto& r : suite.reports)
            if (r.name.rfind("A1", 0) == 0 || r.name.rfind("A2", 0) == 0) CHECK(r.holds);
    }
}

TEST_CASE("MIP and ERC") {
    const Covariance id(Eigen::MatrixXd::Identity(6, 6));
    CHECK(check_mip(id, 3).holds);
    const ConditionReport m = check_mip(Covariance(constant_correlation(6, 0.5)), 2);
    CHECK_FALSE(m.holds);
    CHECK(m.quantity == doctest::Approx(0.5));
    CHECK(m.margin == doctest::Approx(1.0 / 3.0 - 0.5));
    const ConditionReport e = check_erc(id, {0, 1});
    CHECK(e.holds);
    CHECK(e.margin == doctest::Approx(1.0));
    // Constant correlation rho, |s0| = q: row l1 norm q rho / (1 + (q-1) rho).
    const ConditionReport e2 = check_erc(Covariance(constant_correlation(10, 0.5)), {0, 1, 2});
    CHECK(e2.quantity == doctest::Approx(1.5 / 2.0));
}

TEST_CASE("sample covariance and gamma profile agree with dense algebra") {
    const Dataset d = oracle::sparse_problem(40, 12, 3, 1.0, 77);
    const Covariance cov(d);
    CHECK(cov.is_sample());
    const Eigen::MatrixXd blk = cov.block({0, 5}, {3, 7, 9});
    const Eigen::MatrixXd ref = oracle::cols(d.x(), {0, 5}).transpose() *
                                oracle::cols(d.x(), {3, 7, 9}) / 40.0;
    CHECK((blk - ref).cwiseAbs().maxCoeff() < 1e-12);

    const Coefficients b = coefs({0, 1, 2}, {1.0, 1.5, 2.0});
    const std::vector<Index> s{1};
    const FeatureScores g = gamma_profile(d, s, b);
    Eigen::VectorXd xb = Eigen::VectorXd::Zero(40);
    for (auto [j, v] : b.beta) xb += v * d.x().col(j);
    const Eigen::VectorXd dense =
        d.x().transpose() * (oracle::residual_maker(d.x(), s) * xb) / 40.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(g.value(static_cast<Index>(k)) == doctest::Approx(dense(g.index[k])).epsilon(1e-10));
    const FeatureScores gc = gamma_profile(cov, s, b);
    for (std::size_t k = 0; k < gc.size(); ++k)
        CHECK(gc.value(static_cast<Index>(k)) == doctest::Approx(dense(gc.index[k])).epsilon(1e-9));
}

}
