#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "seqlasso/dataset.hpp"

namespace seqlasso {

// Relative residual-norm threshold below which a column is treated as lying in
// the span of the active columns: ||(I - H) x_j|| <= kCollinearTol * sqrt(n).
inline constexpr double kCollinearTol = 1e-8;

enum class AddStatus { Added, Collinear };

// Scores for the features that are still eligible (inactive and not collinear
// with the active span), in ascending index order.
struct FeatureScores {
    std::vector<Index> index;
    Eigen::VectorXd value;

    std::size_t size() const noexcept { return index.size(); }
};

// Incremental orthonormal basis of the span of the active columns, built by
// modified Gram-Schmidt with one reorthogonalization pass. Tracks the residual
// (I - H) y and the squared residual norms ||(I - H) x_j||^2 of every column.
//
// Single writer. The dataset must outlive the state.
class ProjectionState {
public:
    explicit ProjectionState(const Dataset& d);

    // Extends the basis by the normalized residual of x_j. Collinear columns
    // are flagged and never become eligible again.
    AddStatus add_feature(Index j);
    // Throws Collinear instead of returning it.
    void add_feature_or_throw(Index j);

    // gamma_j = x_j . (I - H) y / n over eligible j.
    FeatureScores residual_correlations() const;
    // ||(I - H) x_j||^2 over eligible j; values lie in [0, n].
    FeatureScores residual_norms() const;

    // Residuals (I - H) x for arbitrary vectors.
    Eigen::VectorXd project_out(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd project_out(const Eigen::MatrixXd& m) const;

    const Dataset& dataset() const noexcept { return *d_; }
    const std::vector<Index>& active() const noexcept { return active_; }
    bool is_active(Index j) const { return status_[static_cast<std::size_t>(j)] == kActive; }
    bool is_collinear(Index j) const { return status_[static_cast<std::size_t>(j)] == kCollinear; }
    bool is_eligible(Index j) const { return status_[static_cast<std::size_t>(j)] == kEligible; }
    Index eligible_count() const noexcept { return eligible_; }

    auto basis() const { return q_.leftCols(static_cast<Index>(active_.size())); }
    const Eigen::VectorXd& residual_y() const noexcept { return residual_y_; }
    // Tracked ||(I - H) x_j||^2 for any j (0 for active features).
    double residual_norm2(Index j) const { return std::max(resid_norm2_(j), 0.0); }
    double rss() const noexcept { return residual_y_.squaredNorm(); }

private:
    enum : char { kEligible = 0, kActive = 1, kCollinear = 2 };

    void refresh_small_norms();

    const Dataset* d_;
    Eigen::MatrixXd q_;
    std::vector<Index> active_;
    std::vector<char> status_;
    Index eligible_;
    Eigen::VectorXd residual_y_;
    Eigen::VectorXd resid_norm2_;
};

}  // namespace seqlasso
