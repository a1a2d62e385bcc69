// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion-number ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seqlasso/conditions.hpp"
#include "seqlasso/criteria.hpp"
#include "seqlasso/datagen.hpp"
#include "seqlasso/experiments.hpp"
#include "seqlasso/projection.hpp"
#include "seqlasso/selectors.hpp"

using namespace seqlasso;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome dimension_table() {
    const Dims a = dims(100), b = dims(200), c = dims(500);
    std::ostringstream os;
    os << "dims(100)=(" << a.p0 << "," << a.p << ") dims(200)=(" << b.p0 << "," << b.p
       << ") dims(500)=(" << c.p0 << "," << c.p << ")";
    const bool ok = a.p0 == 8 && a.p == 268 && b.p0 == 9 && b.p == 672 && c.p0 == 11 && c.p == 3170;
    return {ok, os.str()};
}

Outcome kkt_suite() {
    double worst = 0.0;
    int steps_checked = 0, failures = 0;
    for (int inst = 0; inst < 100; ++inst) {
        Rng rng(kSeed, static_cast<std::uint64_t>(inst), 50);
        Eigen::MatrixXd x(40, 80);
        for (Index j = 0; j < 80; ++j)
            for (Index i = 0; i < 40; ++i) x(i, j) = rng.normal();
        Eigen::VectorXd y(40);
        for (Index i = 0; i < 40; ++i) y(i) = rng.normal();
        for (Index j = 0; j < 5; ++j) y += (1.0 + 0.3 * static_cast<double>(j)) * x.col(3 * j);
        const Dataset d = standardize(x, y);
        SelectorConfig cfg = SelectorConfig::defaults_for(d.n(), d.p());
        ProjectionState st(d);
        while (static_cast<int>(st.active().size()) < cfg.max_steps) {
            StepResult step;
            try {
                step = slasso_step(st, cfg);
            } catch (const Error&) {
                break;
            }
            const KktReport rep =
                kkt_check(d, ActiveSet{}, Coefficients{}, step.lambda, ActiveSet(st.active()), 1e-6);
            worst = std::max(worst, rep.max_violation);
            ++steps_checked;
            failures += rep.passes ? 0 : 1;
            for (Index j : step.entered) st.add_feature(j);
        }
    }
    return {failures == 0 && steps_checked > 0,
            std::to_string(steps_checked) + " steps, max violation " + fmt("%.2e", worst) +
                " (tol 1e-6), failures " + std::to_string(failures)};
}

Outcome lars_oracle() {
    double worst = 0.0;
    int checked = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const Index p = 6 + inst;
        Rng rng(kSeed, static_cast<std::uint64_t>(inst), 60);
        Eigen::MatrixXd x(15, p);
        for (Index j = 0; j < p; ++j)
            for (Index i = 0; i < 15; ++i) x(i, j) = rng.normal();
        Eigen::VectorXd y(15);
        for (Index i = 0; i < 15; ++i) y(i) = rng.normal();
        y += 2.0 * x.col(0) - 1.5 * x.col(1) + x.col(p - 1);
        const Dataset d = standardize(x, y);
        SelectorConfig cfg;
        cfg.max_steps = static_cast<int>(std::min<Index>(p, 14));
        const SelectionPath path = lars_lasso_path(d, cfg);
        if (path.steps.empty()) return {false, "empty path on instance " + std::to_string(inst)};
        // One breakpoint per instance, drawn at random.
        const std::size_t k =
            static_cast<std::size_t>(rng.uniform() * static_cast<double>(path.steps.size()));
        const PathStep& step = path.steps[std::min(k, path.steps.size() - 1)];
        const Eigen::VectorXd ref = oracle::cd_lasso(d.x(), d.y(), step.lambda);
        for (Index j = 0; j < p; ++j) worst = std::max(worst, std::abs(ref(j) - step.beta.at(j)));
        ++checked;
    }
    return {worst <= 1e-6, std::to_string(checked) + " breakpoints, max |beta - beta_cd| " +
                               fmt("%.2e", worst) + " (tol 1e-6)"};
}

Outcome slasso_omp_agreement() {
    int agree = 0, tie_free = 0;
    for (int inst = 0; inst < 100; ++inst) {
        Rng rng(kSeed, static_cast<std::uint64_t>(inst), 70);
        Eigen::MatrixXd x(40, 60);
        for (Index j = 0; j < 60; ++j)
            for (Index i = 0; i < 40; ++i) x(i, j) = rng.normal();
        Eigen::VectorXd y(40);
        for (Index i = 0; i < 40; ++i) y(i) = rng.normal();
        for (Index j = 0; j < 4; ++j) y += 1.2 * x.col(10 * j + 1);
        const Dataset d = standardize(x, y);
        SelectorConfig cfg;
        cfg.max_steps = 5;
        const SelectionPath a = slasso_run(d, cfg);
        const SelectionPath b = omp_run(d, cfg);
        bool single = a.size() == 5;
        for (const auto& s : a.steps) single = single && s.entered.size() == 1;
        tie_free += single;
        bool same = a.size() == b.size();
        for (std::size_t k = 0; same && k < a.size(); ++k)
            same = a.steps[k].entered == b.steps[k].entered;
        agree += same;
    }
    return {agree == 100 && tie_free == 100,
            std::to_string(agree) + "/100 identical sequences, " + std::to_string(tie_free) +
                "/100 tie-free"};
}

const ConditionReport* find(const ConditionSuite& s, const std::string& prefix) {
    for (const auto& r : s.reports)
        if (r.name.rfind(prefix, 0) == 0) return &r;
    return nullptr;
}

Outcome special_cases() {
    std::ostringstream os;
    bool ok = true;
    for (double rho : {0.3, 0.5, 0.7}) {
        const ConditionSuite suite = evaluate_special_case(1, 8, rho);
        bool a12 = true;
        for (const auto& r : suite.reports)
            if (r.name.rfind("A1", 0) == 0 || r.name.rfind("A2", 0) == 0) a12 = a12 && r.holds;
        ok = ok && a12;
        os << "I rho=" << rho << ": A1'/A2' " << (a12 ? "hold" : "FAIL");
        const ConditionReport* ir = find(suite, "irrepresentable");
        if (rho == 0.5) {
            const bool fails = ir && !ir->holds;
            ok = ok && fails;
            os << ", irrepresentable " << (fails ? "fails" : "HOLDS") << " (quantity "
               << fmt("%.4f", ir ? ir->quantity : NAN) << ", required to fail)";
        }
        os << "; ";
    }
    const ConditionSuite two = evaluate_special_case(2, 8, 0.0);
    const ConditionReport* ir = find(two, "irrepresentable");
    const bool at_one = ir && std::abs(ir->quantity - 1.0) <= 1e-10;
    int a1 = 0, a1_hold = 0;
    for (const auto& r : two.reports)
        if (r.name.rfind("A1", 0) == 0) {
            ++a1;
            a1_hold += r.holds;
        }
    ok = ok && at_one && a1 == 8 && a1_hold == a1;
    os << "II: irrepresentable quantity " << fmt("%.12f", ir ? ir->quantity : NAN) << ", A1' holds "
       << a1_hold << "/" << a1 << " (k=0..7)";
    return {ok, os.str()};
}

Outcome b_ordering() {
    std::ostringstream os;
    bool ok = true;
    for (Index n : {100, 200})
        for (StructureKind kind : {StructureKind::B1, StructureKind::B2, StructureKind::B3}) {
            SimulationConfig c;
            c.n = n;
            c.structure = {kind, structure_uses_rho(kind) ? 0.5 : 0.0};
            c.coef_type = 2;
            c.h = 0.8;
            c.replicates = 50;
            c.seed = kSeed;
            c.ebic_mode = false;
            const CellResult cell = run_cell(c);
            const double lasso = cell.summary(Selector::Lasso, Mode::StopAtP0).pdr_mean;
            const double fsr = cell.summary(Selector::Fsr, Mode::StopAtP0).pdr_mean;
            const double sl = cell.summary(Selector::SLasso, Mode::StopAtP0).pdr_mean;
            const bool cell_ok = lasso <= 0.25 && sl >= fsr + 0.15 && sl >= 0.55;
            ok = ok && cell_ok && cell.failed == 0;
            os << "n=" << n << " " << to_string(kind) << ": lasso " << fmt("%.3f", lasso) << " fsr "
               << fmt("%.3f", fsr) << " slasso " << fmt("%.3f", sl) << (cell_ok ? "" : " (miss)")
               << "; ";
        }
    std::string s = os.str();
    s.resize(s.size() - 2);
    return {ok, s + " [need lasso<=0.25, slasso>=fsr+0.15, slasso>=0.55 per cell]"};
}

Outcome a1_recovery() {
    SimulationConfig c;
    c.n = 200;
    c.structure = {StructureKind::A1, 0.0};
    c.coef_type = 1;
    c.h = 0.9;
    c.replicates = 50;
    c.seed = kSeed;
    const CellResult cell = run_cell(c);
    bool ok = cell.failed == 0;
    std::ostringstream os;
    for (Mode m : {Mode::StopAtP0, Mode::Ebic}) {
        os << to_string(m) << ":";
        for (Selector s : c.selectors) {
            const Summary& sm = cell.summary(s, m);
            const bool good = sm.pdr_mean >= 0.95 && sm.fdr_mean <= 0.10;
            ok = ok && good;
            os << " " << to_string(s) << " " << fmt("%.3f", sm.pdr_mean) << "/"
               << fmt("%.3f", sm.fdr_mean) << (good ? "" : " (miss)");
        }
        os << "; ";
    }
    return {ok, os.str() + "[PDR/FDR, need >=0.95 / <=0.10]"};
}

Outcome ebic_null() {
    const Index n = 200, p = 672;
    const CriterionConfig crit = CriterionConfig::from_rule(1.5, n, p);
    int null_count = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Rng rng(kSeed, static_cast<std::uint64_t>(rep), 80);
        Eigen::MatrixXd x(n, p);
        for (Index j = 0; j < p; ++j)
            for (Index i = 0; i < n; ++i) x(i, j) = rng.normal();
        Eigen::VectorXd y(n);
        for (Index i = 0; i < n; ++i) y(i) = rng.normal();
        const Dataset d = standardize(x, y);
        SelectorConfig cfg;
        cfg.max_steps = kDefaultSimulationSteps;
        const EbicSelection sel = select_by_ebic(slasso_run(d, cfg), d, crit);
        null_count += sel.step == 0;
    }
    return {null_count >= 95, std::to_string(null_count) + "/100 null selections (need >= 95), gamma " +
                                  fmt("%.4f", crit.gamma)};
}

Outcome determinism() {
    SimulationConfig c;
    c.n = 100;
    c.structure = {StructureKind::A3, 0.5};
    c.replicates = 16;
    c.seed = kSeed;
    std::string out[2];
    int k = 0;
    for (int threads : {1, 4}) {
        c.threads = threads;
        const CellResult cell = run_cell(c);
        std::ostringstream os;
        write_summary_csv(os, {cell});
        write_replicates_csv(os, {cell});
        out[k++] = os.str();
    }
    return {out[0] == out[1], std::string("threads 1 vs 4: CSV output ") +
                                  (out[0] == out[1] ? "byte-identical" : "DIFFERS") + " (" +
                                  std::to_string(out[0].size()) + " bytes)"};
}

Outcome projection_oracle() {
    double worst = 0.0;
    for (int seq = 0; seq < 50; ++seq) {
        Rng rng(kSeed, static_cast<std::uint64_t>(seq), 90);
        const Index n = 30 + (seq % 5) * 10, p = 40 + (seq % 7) * 10;
        Eigen::MatrixXd x(n, p);
        for (Index j = 0; j < p; ++j)
            for (Index i = 0; i < n; ++i) x(i, j) = rng.normal();
        Eigen::VectorXd y(n);
        for (Index i = 0; i < n; ++i) y(i) = rng.normal();
        const Dataset d = standardize(x, y);
        ProjectionState st(d);
        std::vector<Index> order;
        for (Index j = 0; j < p; ++j) order.push_back(j);
        for (Index k = 0; k < 15; ++k) {
            const Index pick = k + static_cast<Index>(rng.uniform() * static_cast<double>(p - k));
            std::swap(order[static_cast<std::size_t>(k)],
                      order[static_cast<std::size_t>(std::min(pick, p - 1))]);
            st.add_feature(order[static_cast<std::size_t>(k)]);
            const Eigen::VectorXd ref = d.x().transpose() *
                                        (oracle::residual_maker(d.x(), st.active()) * d.y()) /
                                        static_cast<double>(n);
            const FeatureScores g = st.residual_correlations();
            for (std::size_t t = 0; t < g.size(); ++t)
                worst = std::max(worst, std::abs(g.value(static_cast<Index>(t)) - ref(g.index[t])));
        }
    }
    return {worst <= 1e-10, "50 sequences x 15 adds, max |gamma - gamma_dense| " + fmt("%.2e", worst) +
                                " (tol 1e-10)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"dimension table", dimension_table},
        {"KKT suite", kkt_suite},
        {"LARS vs coordinate descent", lars_oracle},
        {"SLasso/OMP agreement", slasso_omp_agreement},
        {"special-case fixtures", special_cases},
        {"B1-B3 ordering (type 2, h=0.8)", b_ordering},
        {"A1 recovery (n=200, h=0.9)", a1_recovery},
        {"EBIC null model on pure noise", ebic_null},
        {"thread-count determinism", determinism},
        {"projection vs dense oracle", projection_oracle},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);

    int failed = 0;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::cerr << "no criterion " << id << "\n";
            return 2;
        }
        const auto& [name, run] = criteria[static_cast<std::size_t>(id - 1)];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
