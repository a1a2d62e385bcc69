#pragma once

#include <string>
#include <vector>

#include "seqlasso/dataset.hpp"
#include "seqlasso/projection.hpp"

namespace seqlasso {

struct SelectorConfig {
    int max_steps = 1;
    double tie_tol = 1e-10;
    // Stop once max |gamma| falls below stop_tol * ||y|| / sqrt(n), the
    // largest value |gamma| can take for a standardized column.
    double stop_tol = 1e-12;

    // K = min(ceil(n / 2), p, n - 1).
    static SelectorConfig defaults_for(Index n, Index p);
    // Throws InvalidArgument on out-of-range fields.
    void validate(Index n, Index p) const;
};

enum class Selector { SLasso, Omp, Fsr, Lasso };

Selector parse_selector(const std::string& name);
const char* to_string(Selector s);

struct StepResult {
    std::vector<Index> entered;
    double lambda = 0.0;          // 2 n max |gamma|
    double max_abs_gamma = 0.0;
    std::vector<Index> tie_set;
    bool tie_fallback = false;    // tie set failed the cone condition
};

// One sequential-lasso step from the current state; does not modify it.
// Throws NothingToSelect when the residual correlations have vanished or no
// eligible feature remains.
StepResult slasso_step(const ProjectionState& st, const SelectorConfig& cfg);

SelectionPath slasso_run(const Dataset& d, const SelectorConfig& cfg);
SelectionPath omp_run(const Dataset& d, const SelectorConfig& cfg);
SelectionPath fsr_run(const Dataset& d, const SelectorConfig& cfg);
// LARS with the lasso sign-change modification. Each step is a breakpoint of
// the path of argmin ||y - X b||^2 + lambda ||b||_1; stops when the active set
// first holds max_steps features.
SelectionPath lars_lasso_path(const Dataset& d, const SelectorConfig& cfg);

SelectionPath run_selector(Selector s, const Dataset& d, const SelectorConfig& cfg);

struct KktReport {
    double max_violation = 0.0;  // in units of max(lambda, 1)
    Index worst = -1;
    bool passes = false;
};

// Lasso optimality of beta for ||y~ - X~ b||^2 + lambda ||b||_1 where ~ means
// projected off span(projected_out). Active j with beta_j != 0 need
// |2 x~_j.r - lambda sign(beta_j)| <= tol; all others |2 x~_j.r| <= lambda (1 + tol).
KktReport kkt_check(const Dataset& d, const ActiveSet& s_active, const Coefficients& beta,
                    double lambda, const ActiveSet& projected_out, double tol = 1e-6);

}  // namespace seqlasso
