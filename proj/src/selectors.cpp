#include "seqlasso/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "seqlasso/conditions.hpp"

namespace seqlasso {

SelectorConfig SelectorConfig::defaults_for(Index n, Index p) {
    SelectorConfig cfg;
    cfg.max_steps = static_cast<int>(std::min({(n + 1) / 2, p, n - 1}));
    return cfg;
}

void SelectorConfig::validate(Index n, Index p) const {
    if (max_steps < 1 || max_steps > std::min(n - 1, p))
        throw Error(ErrorCode::InvalidArgument,
                    "max_steps must lie in [1, min(n-1, p)] = [1, " +
                        std::to_string(std::min(n - 1, p)) + "]");
    if (!(tie_tol > 0.0 && tie_tol < 1.0))
        throw Error(ErrorCode::InvalidArgument, "tie_tol must lie in (0, 1)");
    if (!(stop_tol > 0.0 && stop_tol < 1.0))
        throw Error(ErrorCode::InvalidArgument, "stop_tol must lie in (0, 1)");
}

Selector parse_selector(const std::string& name) {
    if (name == "slasso") return Selector::SLasso;
    if (name == "omp") return Selector::Omp;
    if (name == "fsr") return Selector::Fsr;
    if (name == "lasso") return Selector::Lasso;
    throw Error(ErrorCode::InvalidArgument, "unknown selector '" + name + "'");
}

const char* to_string(Selector s) {
    switch (s) {
    case Selector::SLasso: return "slasso";
    case Selector::Omp: return "omp";
    case Selector::Fsr: return "fsr";
    case Selector::Lasso: return "lasso";
    }
    return "?";
}

namespace {

void require_standardized(const Dataset& d) {
    if (!d.standardized())
        throw Error(ErrorCode::InvalidArgument, "selectors need a standardized dataset");
}

double stop_threshold(const ProjectionState& st, const SelectorConfig& cfg) {
    const Dataset& d = st.dataset();
    return cfg.stop_tol * d.y().norm() / std::sqrt(static_cast<double>(d.n()));
}

[[noreturn]] void nothing_to_select(const std::string& why) {
    throw Error(ErrorCode::NothingToSelect, why);
}

PathStep snapshot(const ProjectionState& st, double lambda, std::vector<Index> entered) {
    PathStep step;
    step.active = st.active();
    step.lambda = lambda;
    step.entered = std::move(entered);
    step.rss = st.rss();
    return step;
}

// Picks one feature per step by maximizing score(gamma_j, resid_norm2_j).
SelectionPath greedy_run(const Dataset& d, const SelectorConfig& cfg, const char* method,
                         const std::function<double(double, double)>& score) {
    require_standardized(d);
    cfg.validate(d.n(), d.p());
    ProjectionState st(d);
    SelectionPath path;
    path.method = method;
    path.null_rss = st.rss();
    const double n = static_cast<double>(d.n());

    while (true) {
        if (static_cast<int>(st.active().size()) >= cfg.max_steps) {
            path.termination = Termination::BudgetReached;
            break;
        }
        if (st.eligible_count() == 0) {
            path.termination = Termination::Exhausted;
            path.reason = "no eligible features remain";
            break;
        }
        const FeatureScores g = st.residual_correlations();
        const FeatureScores r = st.residual_norms();
        if (g.value.cwiseAbs().maxCoeff() <= stop_threshold(st, cfg)) {
            path.termination = Termination::NothingToSelect;
            path.reason = "residual correlations vanished";
            break;
        }
        Index best = 0;
        double best_score = -1.0;
        for (Index k = 0; k < g.value.size(); ++k) {
            const double sc = score(g.value(k), r.value(k));
            if (sc > best_score) {  // strict: smallest index wins ties
                best_score = sc;
                best = k;
            }
        }
        const Index j = g.index[static_cast<std::size_t>(best)];
        const double lambda = 2.0 * n * std::abs(g.value(best));
        if (st.add_feature(j) == AddStatus::Collinear) continue;
        path.steps.push_back(snapshot(st, lambda, {j}));
    }
    return path;
}

}  // namespace

StepResult slasso_step(const ProjectionState& st, const SelectorConfig& cfg) {
    if (st.eligible_count() == 0) nothing_to_select("no eligible features remain");
    const Dataset& d = st.dataset();
    const double n = static_cast<double>(d.n());
    const FeatureScores g = st.residual_correlations();
    const Eigen::ArrayXd mag = g.value.cwiseAbs();
    const double top = mag.maxCoeff();
    if (top <= stop_threshold(st, cfg)) nothing_to_select("residual correlations vanished");

    StepResult out;
    out.max_abs_gamma = top;
    out.lambda = 2.0 * n * top;
    std::vector<double> signs;
    for (Index k = 0; k < mag.size(); ++k)
        if (mag(k) >= (1.0 - cfg.tie_tol) * top) {
            out.tie_set.push_back(g.index[static_cast<std::size_t>(k)]);
            signs.push_back(g.value(k) < 0 ? -1.0 : 1.0);
        }
    if (out.tie_set.size() == 1) {
        out.entered = out.tie_set;
        return out;
    }
    const Eigen::MatrixXd xt = st.project_out(columns(d.x(), out.tie_set));
    const Eigen::MatrixXd gram = xt.transpose() * xt / n;
    const ConeResult cone = cone_condition(gram, out.tie_set, signs);
    if (cone.report.holds) {
        out.entered = out.tie_set;
    } else {
        out.entered = {out.tie_set.front()};
        out.tie_fallback = true;
    }
    return out;
}

SelectionPath slasso_run(const Dataset& d, const SelectorConfig& cfg) {
    require_standardized(d);
    cfg.validate(d.n(), d.p());
    ProjectionState st(d);
    SelectionPath path;
    path.method = "slasso";
    path.null_rss = st.rss();
    while (true) {
        if (static_cast<int>(st.active().size()) >= cfg.max_steps) {
            path.termination = Termination::BudgetReached;
            break;
        }
        StepResult step;
        try {
            step = slasso_step(st, cfg);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NothingToSelect) throw;
            path.termination = st.eligible_count() == 0 ? Termination::Exhausted
                                                        : Termination::NothingToSelect;
            path.reason = e.what();
            break;
        }
        std::vector<Index> entered;
        for (Index j : step.entered)
            if (st.add_feature(j) == AddStatus::Added) entered.push_back(j);
        if (entered.empty()) continue;
        PathStep ps = snapshot(st, step.lambda, std::move(entered));
        ps.tie_fallback = step.tie_fallback;
        path.steps.push_back(std::move(ps));
    }
    return path;
}

SelectionPath omp_run(const Dataset& d, const SelectorConfig& cfg) {
    return greedy_run(d, cfg, "omp", [](double gamma, double) { return std::abs(gamma); });
}

SelectionPath fsr_run(const Dataset& d, const SelectorConfig& cfg) {
    // |x_j.(I-H)y| / sqrt(x_j.(I-H)x_j); the 1/n in gamma is a common factor.
    return greedy_run(d, cfg, "fsr", [](double gamma, double resid_norm2) {
        return std::abs(gamma) / std::sqrt(resid_norm2);
    });
}

SelectionPath run_selector(Selector s, const Dataset& d, const SelectorConfig& cfg) {
    switch (s) {
    case Selector::SLasso: return slasso_run(d, cfg);
    case Selector::Omp: return omp_run(d, cfg);
    case Selector::Fsr: return fsr_run(d, cfg);
    case Selector::Lasso: return lars_lasso_path(d, cfg);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown selector");
}

KktReport kkt_check(const Dataset& d, const ActiveSet& s_active, const Coefficients& beta,
                    double lambda, const ActiveSet& projected_out, double tol) {
    if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
    ProjectionState ps(d);
    for (Index j : projected_out.indices()) ps.add_feature_or_throw(j);

    Eigen::VectorXd fit = d.y();
    for (auto [j, b] : beta.beta)
        if (s_active.contains(j) && !projected_out.contains(j)) fit -= b * d.x().col(j);
    const Eigen::VectorXd r = ps.project_out(fit);
    const Eigen::VectorXd c = 2.0 * (d.x().transpose() * r);

    const double scale = std::max(lambda, 1.0);
    KktReport rep;
    for (Index j = 0; j < d.p(); ++j) {
        if (projected_out.contains(j)) continue;
        const double bj = s_active.contains(j) ? beta.at(j) : 0.0;
        double v;
        if (bj != 0.0)
            v = std::abs(c(j) - lambda * (bj > 0 ? 1.0 : -1.0)) / scale;
        else
            v = std::max(0.0, std::abs(c(j)) - lambda) / scale;
        if (v > rep.max_violation || rep.worst < 0) {
            rep.max_violation = std::max(rep.max_violation, v);
            if (v >= rep.max_violation) rep.worst = j;
        }
    }
    rep.passes = rep.max_violation <= tol;
    return rep;
}

}  // namespace seqlasso
