#include "seqlasso/criteria.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "seqlasso/projection.hpp"

namespace seqlasso {

CriterionConfig CriterionConfig::from_rule(double r, Index n, Index p) {
    if (!(r > 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma rule needs r > 1");
    if (n < 2 || p < 2) throw Error(ErrorCode::InvalidArgument, "gamma rule needs n, p >= 2");
    CriterionConfig cfg;
    cfg.gamma = std::max(0.0, 1.0 - std::log(static_cast<double>(n)) /
                                        (2.0 * r * std::log(static_cast<double>(p))));
    return cfg;
}

double log_binomial(double p, double k) {
    return std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0);
}

double ebic(Index n, Index p, Index k, double rss, double gamma, double y_norm2) {
    if (gamma < 0.0) throw Error(ErrorCode::InvalidArgument, "gamma must be non-negative");
    if (k >= n) throw Error(ErrorCode::InvalidArgument, "model size must be below n");
    if (!(rss > 0.0) || (y_norm2 > 0.0 && rss <= 1e-12 * y_norm2))
        throw Error(ErrorCode::PerfectFit, "residual sum of squares is zero");
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return nd * std::log(rss / nd) + kd * std::log(nd) +
           2.0 * gamma * log_binomial(static_cast<double>(p), kd);
}

double ebic(const Dataset& d, const ActiveSet& s, const CriterionConfig& cfg) {
    ProjectionState st(d);
    for (Index j : s.indices()) st.add_feature_or_throw(j);
    return ebic(d.n(), d.p(), static_cast<Index>(s.size()), st.rss(), cfg.gamma,
                d.y().squaredNorm());
}

EbicSelection select_by_ebic(const SelectionPath& path, const Dataset& d,
                             const CriterionConfig& cfg) {
    const double y2 = path.null_rss;
    EbicSelection out;
    out.values.reserve(path.steps.size() + 1);
    auto value = [&](Index k, double rss) {
        try {
            return ebic(d.n(), d.p(), k, rss, cfg.gamma, y2);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PerfectFit) throw;
            out.perfect_fit = true;
            return -std::numeric_limits<double>::infinity();
        }
    };
    out.values.push_back(value(0, y2));
    for (const PathStep& step : path.steps)
        out.values.push_back(value(static_cast<Index>(step.active.size()), step.rss));

    std::size_t best = 0;
    for (std::size_t k = 1; k < out.values.size(); ++k) {
        const double cur = out.values[k], inc = out.values[best];
        const std::size_t cur_size = path.steps[k - 1].active.size();
        const std::size_t inc_size = best == 0 ? 0 : path.steps[best - 1].active.size();
        if (cur < inc || (cur == inc && cur_size < inc_size)) best = k;
    }
    out.step = best;
    if (best > 0) {
        std::map<Index, int> entry;
        for (std::size_t t = 0; t < best; ++t)
            for (Index j : path.steps[t].entered) entry[j] = static_cast<int>(t + 1);
        for (Index j : path.steps[best - 1].active) out.selected.add(j, entry[j]);
    }
    const std::size_t last = path.steps.size();
    out.budget_suspect = last >= 1 && best + 1 >= last && best > 0;
    return out;
}

}  // namespace seqlasso
