#include "seqlasso/projection.hpp"

#include <cmath>
#include <string>

namespace seqlasso {

namespace {

// Below this fraction of n the incrementally downdated residual norm loses
// too many digits to cancellation and is recomputed directly.
constexpr double kRecomputeFraction = 1e-6;

}  // namespace

ProjectionState::ProjectionState(const Dataset& d)
    : d_(&d),
      q_(d.n(), std::min(d.n(), d.p())),
      status_(static_cast<std::size_t>(d.p()), kEligible),
      eligible_(d.p()),
      residual_y_(d.y()),
      resid_norm2_(d.x().colwise().squaredNorm().transpose()) {}

Eigen::VectorXd ProjectionState::project_out(const Eigen::VectorXd& v) const {
    Eigen::VectorXd r = v;
    const auto q = basis();
    if (q.cols() == 0) return r;
    for (int pass = 0; pass < 2; ++pass) r.noalias() -= q * (q.transpose() * r);
    return r;
}

Eigen::MatrixXd ProjectionState::project_out(const Eigen::MatrixXd& m) const {
    Eigen::MatrixXd r = m;
    const auto q = basis();
    if (q.cols() == 0) return r;
    for (int pass = 0; pass < 2; ++pass) r.noalias() -= q * (q.transpose() * r);
    return r;
}

AddStatus ProjectionState::add_feature(Index j) {
    if (j < 0 || j >= d_->p())
        throw Error(ErrorCode::InvalidArgument, "feature index out of range", j);
    if (is_active(j))
        throw Error(ErrorCode::InvalidArgument,
                    "feature " + std::to_string(j) + " already active", j);
    if (is_collinear(j)) return AddStatus::Collinear;

    const double n = static_cast<double>(d_->n());
    const Index k = static_cast<Index>(active_.size());
    Eigen::VectorXd v = d_->x().col(j);
    // Modified Gram-Schmidt, then a second sweep to restore orthogonality.
    for (int pass = 0; pass < 2; ++pass)
        for (Index i = 0; i < k; ++i) v -= q_.col(i) * q_.col(i).dot(v);
    const double norm = v.norm();
    if (norm <= kCollinearTol * std::sqrt(n) || k >= q_.cols()) {
        status_[static_cast<std::size_t>(j)] = kCollinear;
        --eligible_;
        return AddStatus::Collinear;
    }
    q_.col(k) = v / norm;
    const auto qk = q_.col(k);
    residual_y_ -= qk * qk.dot(residual_y_);

    active_.push_back(j);
    status_[static_cast<std::size_t>(j)] = kActive;
    --eligible_;

    resid_norm2_.array() -= (d_->x().transpose() * qk).array().square();
    resid_norm2_(j) = 0.0;
    if (static_cast<Index>(active_.size()) == q_.cols()) {
        // Basis spans everything reachable.
        for (Index i = 0; i < d_->p(); ++i) {
            if (!is_eligible(i)) continue;
            status_[static_cast<std::size_t>(i)] = kCollinear;
            --eligible_;
        }
        return AddStatus::Added;
    }
    refresh_small_norms();
    return AddStatus::Added;
}

void ProjectionState::add_feature_or_throw(Index j) {
    if (add_feature(j) == AddStatus::Collinear)
        throw Error(ErrorCode::Collinear,
                    "feature " + std::to_string(j) + " lies in the span of the active set", j);
}

void ProjectionState::refresh_small_norms() {
    const double n = static_cast<double>(d_->n());
    const double threshold = kRecomputeFraction * n;
    const double collinear = kCollinearTol * kCollinearTol * n;
    const Index p = d_->p();
    for (Index j = 0; j < p; ++j) {
        if (status_[static_cast<std::size_t>(j)] != kEligible) continue;
        if (resid_norm2_(j) >= threshold) continue;
        const double exact = project_out(Eigen::VectorXd(d_->x().col(j))).squaredNorm();
        resid_norm2_(j) = exact;
        if (exact <= collinear) {
            status_[static_cast<std::size_t>(j)] = kCollinear;
            --eligible_;
        }
    }
}

FeatureScores ProjectionState::residual_correlations() const {
    const Eigen::VectorXd all = d_->x().transpose() * residual_y_ / static_cast<double>(d_->n());
    FeatureScores out;
    out.index.reserve(static_cast<std::size_t>(eligible_));
    out.value.resize(eligible_);
    Index k = 0;
    for (Index j = 0; j < d_->p(); ++j) {
        if (!is_eligible(j)) continue;
        out.index.push_back(j);
        out.value(k++) = all(j);
    }
    return out;
}

FeatureScores ProjectionState::residual_norms() const {
    FeatureScores out;
    out.index.reserve(static_cast<std::size_t>(eligible_));
    out.value.resize(eligible_);
    Index k = 0;
    for (Index j = 0; j < d_->p(); ++j) {
        if (!is_eligible(j)) continue;
        out.index.push_back(j);
        out.value(k++) = std::max(resid_norm2_(j), 0.0);
    }
    return out;
}

}  // namespace seqlasso
