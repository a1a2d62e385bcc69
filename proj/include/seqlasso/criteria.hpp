#pragma once

#include <vector>

#include "seqlasso/dataset.hpp"

namespace seqlasso {

struct CriterionConfig {
    double gamma = 0.0;

    // gamma = 1 - ln n / (2 r ln p); r must exceed 1 (r = 1.5 by default).
    static CriterionConfig from_rule(double r, Index n, Index p);
};

// ln C(p, k) through log-gamma.
double log_binomial(double p, double k);

// n ln(rss / n) + k ln n + 2 gamma ln C(p, k). Throws PerfectFit when
// rss <= 1e-12 ||y||^2 (pass y_norm2 <= 0 to skip that check).
double ebic(Index n, Index p, Index k, double rss, double gamma, double y_norm2 = -1.0);
// Least-squares RSS of the support, then the formula above.
double ebic(const Dataset& d, const ActiveSet& s, const CriterionConfig& cfg);

struct EbicSelection {
    std::size_t step = 0;          // 0 is the null model
    ActiveSet selected;
    std::vector<double> values;    // one per step, including step 0
    bool budget_suspect = false;   // minimum at the last or second-to-last step
    bool perfect_fit = false;      // some step fit y exactly; it wins the scan
};

// Scans the null model and every path step; ties go to the smaller model.
EbicSelection select_by_ebic(const SelectionPath& path, const Dataset& d,
                             const CriterionConfig& cfg);

}  // namespace seqlasso
