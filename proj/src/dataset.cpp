#include "seqlasso/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seqlasso {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Collinear: return "Collinear";
    case ErrorCode::NothingToSelect: return "NothingToSelect";
    case ErrorCode::PerfectFit: return "PerfectFit";
    case ErrorCode::EmptyRemainder: return "EmptyRemainder";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::NonNumericColumn: return "NonNumericColumn";
    case ErrorCode::DuplicateHeader: return "DuplicateHeader";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

const char* to_string(Termination t) {
    switch (t) {
    case Termination::BudgetReached: return "budget reached";
    case Termination::NothingToSelect: return "nothing to select";
    case Termination::Degenerate: return "degenerate direction";
    case Termination::Exhausted: return "features exhausted";
    }
    return "unknown";
}

namespace {

void validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size())
        throw Error(ErrorCode::InvalidArgument, "x has " + std::to_string(x.rows()) +
                                                    " rows but y has " + std::to_string(y.size()));
    if (x.rows() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");
    if (x.cols() < 1) throw Error(ErrorCode::InvalidArgument, "need at least 1 feature");
    if (!x.allFinite() || !y.allFinite())
        throw Error(ErrorCode::NonFinite, "input contains non-finite values");
}

}  // namespace

Dataset Dataset::raw(Eigen::MatrixXd x, Eigen::VectorXd y) {
    validate(x, y);
    Dataset d;
    d.means_ = Eigen::VectorXd::Zero(x.cols());
    d.scales_ = Eigen::VectorXd::Ones(x.cols());
    d.x_ = std::move(x);
    d.y_ = std::move(y);
    return d;
}

Dataset standardize(const Eigen::MatrixXd& raw_x, const Eigen::VectorXd& raw_y) {
    validate(raw_x, raw_y);
    const Index n = raw_x.rows();
    const Index p = raw_x.cols();

    Dataset d;
    d.x_.resize(n, p);
    d.means_.resize(p);
    d.scales_.resize(p);
    for (Index j = 0; j < p; ++j) {
        const double mean = raw_x.col(j).mean();
        auto centered = (raw_x.col(j).array() - mean).matrix().eval();
        const double ss = centered.squaredNorm();
        const double scale = std::sqrt(ss / static_cast<double>(n));
        // Relative to the column magnitude so that large offsets do not mask a
        // constant column as roundoff noise.
        const double magnitude = std::max(raw_x.col(j).cwiseAbs().maxCoeff(), 1e-300);
        if (!(scale > 1e-12 * magnitude))
            throw Error(ErrorCode::ConstantColumn,
                        "column " + std::to_string(j) + " has zero variance", j);
        d.x_.col(j) = centered / scale;
        d.means_(j) = mean;
        d.scales_(j) = scale;
    }
    d.y_mean_ = raw_y.mean();
    d.y_ = (raw_y.array() - d.y_mean_).matrix();
    d.standardized_ = true;
    return d;
}

ActiveSet::ActiveSet(std::vector<Index> indices) {
    for (Index j : indices) add(j, 0);
}

void ActiveSet::add(Index j, int step) {
    if (contains(j))
        throw Error(ErrorCode::InvalidArgument,
                    "feature " + std::to_string(j) + " already active", j);
    indices_.push_back(j);
    step_of_.emplace(j, step);
}

int ActiveSet::step_of(Index j) const {
    auto it = step_of_.find(j);
    if (it == step_of_.end())
        throw Error(ErrorCode::InvalidArgument, "feature " + std::to_string(j) + " not active", j);
    return it->second;
}

bool ActiveSet::subset_of(const ActiveSet& other) const {
    return std::all_of(indices_.begin(), indices_.end(),
                       [&](Index j) { return other.contains(j); });
}

std::vector<Index> ActiveSet::sorted() const {
    auto out = indices_;
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& x, const std::vector<Index>& idx) {
    Eigen::MatrixXd out(x.rows(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = x.col(idx[k]);
    return out;
}

Coefficients fit_on_support(const Dataset& d, const std::vector<Index>& s) {
    if (!d.standardized())
        throw Error(ErrorCode::InvalidArgument, "fit_on_support needs a standardized dataset");
    Coefficients c;
    c.intercept = d.y_mean();
    if (s.empty()) return c;
    if (static_cast<Index>(s.size()) >= d.n())
        throw Error(ErrorCode::RankDeficient, "support size must be below n");

    const Eigen::MatrixXd xs = columns(d.x(), s);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < xs.cols())
        throw Error(ErrorCode::RankDeficient, "columns of X(s) are numerically collinear");
    const Eigen::VectorXd b = qr.solve(d.y());
    for (std::size_t k = 0; k < s.size(); ++k) c.beta[s[k]] = b(static_cast<Index>(k));
    return c;
}

Coefficients to_raw_units(const Dataset& d, const Coefficients& c) {
    Coefficients raw;
    raw.intercept = d.y_mean();
    for (auto [j, b] : c.beta) {
        const double bj = b / d.column_scales()(j);
        raw.beta[j] = bj;
        raw.intercept -= bj * d.column_means()(j);
    }
    return raw;
}

}  // namespace seqlasso
