#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "seqlasso/dataset.hpp"
#include "seqlasso/projection.hpp"

namespace seqlasso {

// Strict inequalities are accepted only with at least this much slack; the
// exact boundary counts as failure.
inline constexpr double kStrictMargin = 1e-10;

struct ConditionReport {
    std::string name;
    bool holds = false;
    bool boundary = false;   // |margin| within kStrictMargin
    double margin = 0.0;     // signed slack, > 0 iff holds
    double quantity = 0.0;   // the compared statistic (ratio, norm, correlation)
    std::vector<Index> witness;
    std::string note;
};

// Covariance of the features, either empirical (X^T X / n of a standardized
// dataset, evaluated lazily block by block) or an explicit population matrix.
class Covariance {
public:
    explicit Covariance(const Dataset& d) : src_(&d) {}
    explicit Covariance(Eigen::MatrixXd sigma);

    Index dim() const;
    Eigen::MatrixXd block(const std::vector<Index>& rows, const std::vector<Index>& cols) const;
    double at(Index i, Index j) const;
    bool is_sample() const { return std::holds_alternative<const Dataset*>(src_); }

private:
    std::variant<const Dataset*, Eigen::MatrixXd> src_;
};

// Sigma_{RC|s} = Sigma_RC - Sigma_Rs Sigma_ss^{-1} Sigma_sC. Throws RankDeficient.
Eigen::MatrixXd conditional_block(const Covariance& cov, const std::vector<Index>& s,
                                  const std::vector<Index>& rows,
                                  const std::vector<Index>& cols);

// (1/n) X_j^T (I - H(s)) X beta for every j not in s, evaluated on the sample.
FeatureScores gamma_profile(const Dataset& d, const std::vector<Index>& s,
                            const Coefficients& beta);
// Population analogue (Sigma_jS - Sigma_js Sigma_ss^{-1} Sigma_sS) beta.
FeatureScores gamma_profile_pop(const Eigen::MatrixXd& sigma, const std::vector<Index>& s,
                                const Coefficients& beta);
FeatureScores gamma_profile(const Covariance& cov, const std::vector<Index>& s,
                            const Coefficients& beta);

// Ratio of the largest non-causal |gamma| to the largest remaining causal
// |gamma|, conditioned on s (a proper subset of s0 = support(beta)).
// Throws EmptyRemainder when s covers s0.
ConditionReport check_a1(const Covariance& cov, const std::vector<Index>& s,
                         const Coefficients& beta);

// Positive cone condition: [G_A|s]^{-1} 1 > 0 for the conditional Gram of the
// tie set A given s. Optional signs flip columns first (D G D). The companion
// row-sum form x_j^T X_{A\j} (X_{A\j}^T X_{A\j})^{-1} 1 < 1 is evaluated too and
// the two are required to agree. Throws RankDeficient.
ConditionReport check_cone(const Covariance& cov, const std::vector<Index>& s,
                           const std::vector<Index>& tie_set,
                           const std::vector<double>& signs = {});

// Core of check_cone on an already conditioned Gram matrix. Never throws:
// a singular Gram yields holds=false with note "rank deficient".
struct ConeResult {
    ConditionReport report;
    Eigen::VectorXd solution;          // G^{-1} 1 (sign-adjusted), empty if singular
    Eigen::VectorXd row_sum_form;      // 1 - x_j^T X_{A\j}(...)^{-1} 1 per member
    bool rank_deficient = false;
    bool forms_agree = true;
};
ConeResult cone_condition(const Eigen::MatrixXd& gram, const std::vector<Index>& tie_set,
                          const std::vector<double>& signs = {});

// Conditional exact recovery condition:
// max_{j in s0^c} || Sigma_{j s-|s} Sigma_{s- s-|s}^{-1} ||_1 < 1, margin eta.
ConditionReport check_erc(const Covariance& cov, const std::vector<Index>& s0,
                          const std::vector<Index>& s = {});

// max_{j not in s0} | Sigma_{j s0} Sigma_{s0 s0}^{-1} sign(beta_s0) | < 1.
ConditionReport check_irrepresentable(const Covariance& cov, const Coefficients& beta);

// Largest absolute pairwise correlation against 1/(2k - 1).
ConditionReport check_mip(const Covariance& cov, Index k);

// Closed-form values for the constant-correlation fixture.
struct SpecialCaseOne {
    double rho = 0.0;
    Index s_size = 0;
    double a = 0.0;  // conditional variance given s
    double b = 0.0;  // conditional covariance given s
    double cone_value(Index nu) const { return 1.0 / (a + static_cast<double>(nu - 1) * b); }
};
SpecialCaseOne special_case_one_closed_form(double rho, Index s_size);

struct ConditionSuite {
    std::string title;
    std::vector<ConditionReport> reports;
};

// Evaluates the support-recovery conditions on a population fixture:
// case I = constant correlation rho over p features with p0 causal,
// case II = orthonormal causal block with non-causal rows sign(beta)/p0.
ConditionSuite evaluate_special_case(int which, Index p0, double rho, Index p = 0);

// Conditions for a user dataset with a declared support and coefficients.
ConditionSuite evaluate_dataset_conditions(const Dataset& d, const Coefficients& beta);

}  // namespace seqlasso
