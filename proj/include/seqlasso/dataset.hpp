#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "seqlasso/error.hpp"

namespace seqlasso {

using Index = Eigen::Index;

// Design matrix and response. Immutable once built; produced either raw or by
// standardize(), which centers every column, scales it to squared norm n and
// centers the response.
class Dataset {
public:
    // Validates shape and finiteness; no transformation.
    static Dataset raw(Eigen::MatrixXd x, Eigen::VectorXd y);

    const Eigen::MatrixXd& x() const noexcept { return x_; }
    const Eigen::VectorXd& y() const noexcept { return y_; }
    Index n() const noexcept { return x_.rows(); }
    Index p() const noexcept { return x_.cols(); }
    bool standardized() const noexcept { return standardized_; }

    // Affine maps back to raw units: x_std = (x_raw - mean) / scale.
    const Eigen::VectorXd& column_means() const noexcept { return means_; }
    const Eigen::VectorXd& column_scales() const noexcept { return scales_; }
    double y_mean() const noexcept { return y_mean_; }

private:
    friend Dataset standardize(const Eigen::MatrixXd&, const Eigen::VectorXd&);
    Dataset() = default;

    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    Eigen::VectorXd means_;
    Eigen::VectorXd scales_;
    double y_mean_ = 0.0;
    bool standardized_ = false;
};

// Throws ConstantColumn / NonFinite / InvalidArgument.
Dataset standardize(const Eigen::MatrixXd& raw_x, const Eigen::VectorXd& raw_y);

// Ordered set of distinct feature indices together with the step at which
// each entered.
class ActiveSet {
public:
    ActiveSet() = default;
    explicit ActiveSet(std::vector<Index> indices);

    void add(Index j, int step);
    bool contains(Index j) const { return step_of_.count(j) != 0; }
    const std::vector<Index>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    int step_of(Index j) const;

    bool subset_of(const ActiveSet& other) const;
    // Indices sorted ascending; handy for set comparisons.
    std::vector<Index> sorted() const;

private:
    std::vector<Index> indices_;
    std::map<Index, int> step_of_;
};

struct Coefficients {
    std::map<Index, double> beta;
    double intercept = 0.0;

    double at(Index j) const {
        auto it = beta.find(j);
        return it == beta.end() ? 0.0 : it->second;
    }
};

struct PathStep {
    std::vector<Index> active;   // model after this step, in entry order
    double lambda = 0.0;         // penalty at which the step's entrants appear
    std::vector<Index> entered;
    std::vector<Index> dropped;  // LARS-lasso only
    double rss = 0.0;            // ||(I - H(active)) y||^2
    bool tie_fallback = false;   // cone condition failed on a tie set
    Coefficients beta;           // lasso coefficients at the breakpoint (LARS only)
};

enum class Termination { BudgetReached, NothingToSelect, Degenerate, Exhausted };

const char* to_string(Termination t);

struct SelectionPath {
    std::string method;
    double null_rss = 0.0;  // ||y||^2 of the centered response
    std::vector<PathStep> steps;
    Termination termination = Termination::BudgetReached;
    std::string reason;

    std::size_t size() const noexcept { return steps.size(); }
};

// Least squares of y on X(s) with unpenalized intercept. Coefficients are in
// standardized units; intercept is the raw response mean. Throws RankDeficient.
Coefficients fit_on_support(const Dataset& d, const std::vector<Index>& s);
inline Coefficients fit_on_support(const Dataset& d, const ActiveSet& s) {
    return fit_on_support(d, s.indices());
}

// Maps standardized-unit coefficients to raw units.
Coefficients to_raw_units(const Dataset& d, const Coefficients& c);

Eigen::MatrixXd columns(const Eigen::MatrixXd& x, const std::vector<Index>& idx);

}  // namespace seqlasso
