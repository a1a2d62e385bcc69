#include <algorithm>
#include <cmath>
#include <limits>

#include "seqlasso/selectors.hpp"

namespace seqlasso {

namespace {

// Active-set Gram X_A^T X_A kept in entry order; rows/cols added and removed
// as features enter and leave.
class ActiveGram {
public:
    explicit ActiveGram(const Eigen::MatrixXd& x) : x_(&x) {}

    void add(const std::vector<Index>& active, Index j) {
        const Index k = static_cast<Index>(active.size());
        Eigen::MatrixXd g(k + 1, k + 1);
        g.topLeftCorner(k, k) = gram_;
        for (Index i = 0; i < k; ++i) {
            const double v = x_->col(active[static_cast<std::size_t>(i)]).dot(x_->col(j));
            g(i, k) = v;
            g(k, i) = v;
        }
        g(k, k) = x_->col(j).squaredNorm();
        gram_ = std::move(g);
    }

    void remove(Index pos) {
        const Index k = gram_.rows();
        Eigen::MatrixXd g(k - 1, k - 1);
        for (Index a = 0, ra = 0; a < k; ++a) {
            if (a == pos) continue;
            for (Index b = 0, rb = 0; b < k; ++b) {
                if (b == pos) continue;
                g(ra, rb++) = gram_(a, b);
            }
            ++ra;
        }
        gram_ = std::move(g);
    }

    const Eigen::MatrixXd& matrix() const { return gram_; }

private:
    const Eigen::MatrixXd* x_;
    Eigen::MatrixXd gram_;
};

}  // namespace

SelectionPath lars_lasso_path(const Dataset& d, const SelectorConfig& cfg) {
    if (!d.standardized())
        throw Error(ErrorCode::InvalidArgument, "selectors need a standardized dataset");
    cfg.validate(d.n(), d.p());

    const Eigen::MatrixXd& x = d.x();
    const Index p = d.p();
    const Index max_active = std::min<Index>(cfg.max_steps, d.n() - 1);
    const int max_events = 8 * cfg.max_steps + 16;

    SelectionPath path;
    path.method = "lasso";
    path.null_rss = d.y().squaredNorm();

    std::vector<Index> active;
    std::vector<char> in_active(static_cast<std::size_t>(p), 0);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    ActiveGram gram(x);
    ProjectionState ls(d);  // least-squares refit of the active set, for RSS

    auto record = [&](double lambda, std::vector<Index> entered, std::vector<Index> dropped) {
        PathStep step;
        step.active = active;
        step.lambda = lambda;
        step.entered = std::move(entered);
        step.dropped = std::move(dropped);
        for (Index j : active) step.beta.beta[j] = beta(j);
        step.beta.intercept = d.y_mean();
        step.rss = ls.rss();
        path.steps.push_back(std::move(step));
    };

    Eigen::VectorXd c = x.transpose() * d.y();
    Index first = 0;
    double big_c = c.cwiseAbs().maxCoeff(&first);
    const double floor_c = cfg.stop_tol * std::sqrt(static_cast<double>(d.n())) * d.y().norm();
    if (big_c <= floor_c) {
        path.termination = Termination::NothingToSelect;
        path.reason = "response uncorrelated with every feature";
        return path;
    }
    active.push_back(first);
    in_active[static_cast<std::size_t>(first)] = 1;
    gram.add({}, first);
    ls.add_feature(first);
    record(2.0 * big_c, {first}, {});

    Index just_dropped = -1;
    for (int event = 0; event < max_events; ++event) {
        if (static_cast<Index>(active.size()) >= max_active) {
            path.termination = Termination::BudgetReached;
            return path;
        }
        const Index k = static_cast<Index>(active.size());
        Eigen::VectorXd sign(k);
        for (Index i = 0; i < k; ++i) sign(i) = c(active[static_cast<std::size_t>(i)]) < 0 ? -1.0 : 1.0;

        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.matrix());
        const Eigen::VectorXd w = ldlt.solve(sign);
        if (ldlt.info() != Eigen::Success || !w.allFinite() ||
            ldlt.vectorD().minCoeff() <= 1e-10 * gram.matrix().diagonal().maxCoeff()) {
            path.termination = Termination::Degenerate;
            path.reason = "active Gram matrix is singular";
            return path;
        }
        Eigen::VectorXd u = Eigen::VectorXd::Zero(d.n());
        for (Index i = 0; i < k; ++i) u += w(i) * x.col(active[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd a = x.transpose() * u;

        // Largest step is to lambda = 0.
        double step = big_c;
        Index enter = -1, drop_pos = -1;
        const double eps = 1e-12 * big_c;
        for (Index j = 0; j < p; ++j) {
            if (in_active[static_cast<std::size_t>(j)]) continue;
            for (double sgn : {1.0, -1.0}) {
                // a feature just dropped sits on the same-sign boundary at gamma = 0;
                // it can only come back with the opposite sign within this segment
                if (j == just_dropped && sgn * c(j) > 0.0) continue;
                const double denom = 1.0 - sgn * a(j);
                if (denom <= 1e-12) continue;
                const double g = (big_c - sgn * c(j)) / denom;
                if (g > eps && g < step) {
                    step = g;
                    enter = j;
                }
            }
        }
        for (Index i = 0; i < k; ++i) {
            const Index j = active[static_cast<std::size_t>(i)];
            if (w(i) == 0.0) continue;
            const double g = -beta(j) / w(i);
            if (g > eps && g < step) {
                step = g;
                drop_pos = i;
                enter = -1;
            }
        }

        for (Index i = 0; i < k; ++i) beta(active[static_cast<std::size_t>(i)]) += step * w(i);
        big_c -= step;
        const double lambda = 2.0 * big_c;

        if (drop_pos >= 0) {
            const Index j = active[static_cast<std::size_t>(drop_pos)];
            beta(j) = 0.0;
            active.erase(active.begin() + drop_pos);
            in_active[static_cast<std::size_t>(j)] = 0;
            gram.remove(drop_pos);
            ls = ProjectionState(d);
            for (Index i : active) ls.add_feature(i);
            just_dropped = j;
            c = x.transpose() * (d.y() - x * beta);
            record(lambda, {}, {j});
            big_c = 0.0;
            for (Index i : active) big_c = std::max(big_c, std::abs(c(i)));
            continue;
        }
        if (enter < 0) {
            // Reached lambda = 0: least-squares fit on the active set.
            c = x.transpose() * (d.y() - x * beta);
            path.termination = Termination::Exhausted;
            path.reason = "path reached lambda = 0";
            record(0.0, {}, {});
            return path;
        }
        gram.add(active, enter);
        active.push_back(enter);
        in_active[static_cast<std::size_t>(enter)] = 1;
        if (ls.add_feature(enter) == AddStatus::Collinear) {
            path.termination = Termination::Degenerate;
            path.reason = "entering feature is collinear with the active set";
            active.pop_back();
            return path;
        }
        just_dropped = -1;
        // Refresh correlations from the residual to avoid drift.
        c = x.transpose() * (d.y() - x * beta);
        big_c = 0.0;
        for (Index j : active) big_c = std::max(big_c, std::abs(c(j)));
        record(2.0 * big_c, {enter}, {});
        if (big_c <= floor_c) {
            path.termination = Termination::NothingToSelect;
            path.reason = "residual correlations vanished";
            return path;
        }
    }
    path.termination = Termination::Degenerate;
    path.reason = "event budget exhausted";
    return path;
}

}  // namespace seqlasso
