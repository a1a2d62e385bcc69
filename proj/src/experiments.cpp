#include "seqlasso/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace seqlasso {

namespace {

enum Stream : std::uint64_t { kDesignStream = 0, kCoefStream = 1, kNoiseStream = 2 };

[[noreturn]] void config_error(const std::string& key, const std::string& msg) {
    throw Error(ErrorCode::Config, key + ": " + msg);
}

}  // namespace

const char* to_string(Mode m) { return m == Mode::StopAtP0 ? "p0" : "ebic"; }

Dims SimulationConfig::resolved_dims() const {
    Dims d;
    if (p == 0 || p0 == 0) d = dims(n);
    if (p != 0) d.p = p;
    if (p0 != 0) d.p0 = p0;
    return d;
}

int SimulationConfig::resolved_max_steps() const {
    const Dims d = resolved_dims();
    if (max_steps > 0) return max_steps;
    return static_cast<int>(std::min({Index{kDefaultSimulationSteps}, d.p, n - 1}));
}

CriterionConfig SimulationConfig::criterion() const {
    if (gamma) return CriterionConfig{*gamma};
    const Dims d = resolved_dims();
    return CriterionConfig::from_rule(gamma_r, n, d.p);
}

void SimulationConfig::validate() const {
    if (n < 10) config_error("n", "must be at least 10");
    if (coef_type != 1 && coef_type != 2) config_error("coef-type", "must be 1 or 2");
    if (!(h > 0.0 && h <= 1.0)) config_error("h", "must lie in (0, 1]");
    if (replicates < 1) config_error("replicates", "must be positive");
    if (selectors.empty()) config_error("selectors", "need at least one selector");
    if (structure_uses_rho(structure.kind) && !(structure.rho >= 0.0 && structure.rho < 1.0))
        config_error("rho", std::string("must lie in [0, 1) for structure ") +
                                to_string(structure.kind));
    if (!(gamma_r > 1.0)) config_error("gamma-r", "must exceed 1");
    if (gamma && *gamma < 0.0) config_error("gamma", "must be non-negative");
    if (threads < 0) config_error("threads", "must be non-negative");
    const Dims d = resolved_dims();
    if (d.p0 < 1 || d.p0 >= d.p) config_error("p0", "need 1 <= p0 < p");
    if (d.p0 > n - 1) config_error("p0", "must be below n");
    const int k = resolved_max_steps();
    if (k < 1 || k > std::min(n - 1, d.p)) config_error("steps", "must lie in [1, min(n-1, p)]");
}

Replicate simulate_replicate(const SimulationConfig& cfg, int index) {
    const Dims d = cfg.resolved_dims();
    const auto rep = static_cast<std::uint64_t>(index);
    Rng design_rng(cfg.seed, rep, kDesignStream);
    Rng coef_rng(cfg.seed, rep, kCoefStream);
    Rng noise_rng(cfg.seed, rep, kNoiseStream);

    Design design = gen_design(cfg.structure, cfg.n, d.p, d.p0, design_rng);
    Eigen::VectorXd beta = gen_coefficients(cfg.coef_type, d.p0, cfg.n, coef_rng);
    Response resp = gen_response(design.x, beta, design.support, cfg.h, design.sigma_causal, noise_rng);
    Dataset data = standardize(design.x, resp.y);
    return Replicate{std::move(design.x), std::move(resp.y), std::move(design.support),
                     std::move(beta), resp.sigma, std::move(data)};
}

Metrics metrics(const std::vector<Index>& s_star, const std::vector<Index>& s0) {
    const std::set<Index> truth(s0.begin(), s0.end());
    const std::set<Index> chosen(s_star.begin(), s_star.end());
    std::size_t hits = 0;
    for (Index j : chosen) hits += truth.count(j);
    Metrics m;
    if (!truth.empty()) m.pdr = static_cast<double>(hits) / static_cast<double>(truth.size());
    if (!chosen.empty())
        m.fdr = static_cast<double>(chosen.size() - hits) / static_cast<double>(chosen.size());
    return m;
}

std::vector<ReplicateRecord> evaluate_replicate(const Replicate& rep, const SimulationConfig& cfg,
                                                int index) {
    const Dims d = cfg.resolved_dims();
    const int k_ebic = cfg.resolved_max_steps();
    const CriterionConfig crit = cfg.criterion();
    SelectorConfig scfg = SelectorConfig::defaults_for(rep.data.n(), rep.data.p());
    scfg.max_steps = static_cast<int>(std::max<Index>(cfg.ebic_mode ? k_ebic : 0, d.p0));

    std::vector<ReplicateRecord> out;
    for (Selector sel : cfg.selectors) {
        const auto t0 = std::chrono::steady_clock::now();
        const SelectionPath path = run_selector(sel, rep.data, scfg);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        // Mode 1: first step whose model holds at least p0 features.
        ReplicateRecord r1;
        r1.replicate = index;
        r1.selector = sel;
        r1.mode = Mode::StopAtP0;
        r1.runtime_s = elapsed;
        std::vector<Index> chosen;
        bool reached = false;
        for (const PathStep& step : path.steps) {
            chosen = step.active;
            if (static_cast<Index>(step.active.size()) >= d.p0) {
                reached = true;
                break;
            }
        }
        r1.early_stop = !reached;
        const Metrics m1 = metrics(chosen, rep.support);
        r1.pdr = m1.pdr;
        r1.fdr = m1.fdr;
        r1.size = static_cast<Index>(chosen.size());
        out.push_back(r1);

        if (!cfg.ebic_mode) continue;
        // Mode 2: EBIC over the steps whose model fits within K.
        SelectionPath within = path;
        within.steps.clear();
        for (const PathStep& step : path.steps) {
            if (static_cast<int>(step.active.size()) > k_ebic) break;
            within.steps.push_back(step);
        }
        const EbicSelection sel_ebic = select_by_ebic(within, rep.data, crit);
        ReplicateRecord r2 = r1;
        r2.mode = Mode::Ebic;
        r2.early_stop = path.termination != Termination::BudgetReached;
        r2.budget_suspect = sel_ebic.budget_suspect;
        const Metrics m2 = metrics(sel_ebic.selected.indices(), rep.support);
        r2.pdr = m2.pdr;
        r2.fdr = m2.fdr;
        r2.size = static_cast<Index>(sel_ebic.selected.size());
        out.push_back(r2);
    }
    return out;
}

std::vector<Summary> summarize(const std::vector<ReplicateRecord>& records,
                               const std::vector<Selector>& selectors, bool ebic_mode) {
    std::vector<Summary> out;
    std::vector<Mode> modes{Mode::StopAtP0};
    if (ebic_mode) modes.push_back(Mode::Ebic);
    for (Mode mode : modes)
        for (Selector sel : selectors) {
            Summary s;
            s.selector = sel;
            s.mode = mode;
            double sp = 0, sf = 0, ss = 0;
            for (const auto& r : records)
                if (r.selector == sel && r.mode == mode) {
                    ++s.count;
                    sp += r.pdr;
                    sf += r.fdr;
                    ss += static_cast<double>(r.size);
                }
            if (s.count > 0) {
                s.pdr_mean = sp / s.count;
                s.fdr_mean = sf / s.count;
                s.size_mean = ss / s.count;
            }
            if (s.count > 1) {
                double vp = 0, vf = 0;
                for (const auto& r : records)
                    if (r.selector == sel && r.mode == mode) {
                        vp += (r.pdr - s.pdr_mean) * (r.pdr - s.pdr_mean);
                        vf += (r.fdr - s.fdr_mean) * (r.fdr - s.fdr_mean);
                    }
                s.pdr_sd = std::sqrt(vp / (s.count - 1));
                s.fdr_sd = std::sqrt(vf / (s.count - 1));
            }
            out.push_back(s);
        }
    return out;
}

const Summary& CellResult::summary(Selector s, Mode m) const {
    for (const auto& x : summaries)
        if (x.selector == s && x.mode == m) return x;
    throw Error(ErrorCode::InvalidArgument,
                std::string("no summary for ") + seqlasso::to_string(s) + "/" + seqlasso::to_string(m));
}

CellResult run_cell(const SimulationConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    CellResult cell;
    cell.config = cfg;
    cell.dims = cfg.resolved_dims();
    cell.max_steps = cfg.resolved_max_steps();
    cell.gamma = cfg.criterion().gamma;

    const int reps = cfg.replicates;
    std::vector<std::vector<ReplicateRecord>> per(static_cast<std::size_t>(reps));
    std::vector<std::string> errors(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < reps; i = next++) {
            try {
                const Replicate rep = simulate_replicate(cfg, i);
                per[static_cast<std::size_t>(i)] = evaluate_replicate(rep, cfg, i);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        }
    };
    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, reps);
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (int i = 0; i < reps; ++i) {
        const auto& err = errors[static_cast<std::size_t>(i)];
        if (!err.empty()) {
            ++cell.failed;
            cell.failures.push_back("replicate " + std::to_string(i) + ": " + err);
            continue;
        }
        auto& recs = per[static_cast<std::size_t>(i)];
        cell.records.insert(cell.records.end(), recs.begin(), recs.end());
    }
    cell.summaries = summarize(cell.records, cfg.selectors, cfg.ebic_mode);
    cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cell;
}

std::string format_mean_sd(double mean, double sd) {
    auto fmt = [](double v) {
        char buf[32];
        if (v >= 0.9995) {
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return std::string(buf);
        }
        std::snprintf(buf, sizeof buf, "%.3f", v);
        std::string s(buf);
        if (s.rfind("0.", 0) == 0) s.erase(0, 1);
        else if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
        return s;
    };
    return fmt(mean) + "(" + fmt(sd) + ")";
}

std::string cell_label(const SimulationConfig& cfg) {
    std::ostringstream os;
    os << "n=" << cfg.n << " " << to_string(cfg.structure.kind);
    if (structure_uses_rho(cfg.structure.kind)) os << " rho=" << cfg.structure.rho;
    os << " type=" << cfg.coef_type << " h=" << cfg.h;
    return os.str();
}

void write_table(std::ostream& os, const std::vector<CellResult>& cells) {
    for (const auto& cell : cells) {
        char head[160];
        std::snprintf(head, sizeof head, "  (p=%ld, p0=%ld, K=%d, gamma=%.4f, replicates=%zu, failed=%d)",
                      static_cast<long>(cell.dims.p), static_cast<long>(cell.dims.p0), cell.max_steps,
                      cell.gamma, static_cast<std::size_t>(cell.config.replicates), cell.failed);
        os << cell_label(cell.config) << head << "\n";
        os << std::left << std::setw(28) << "mode" << std::setw(10) << "selector" << std::setw(14)
           << "PDR" << std::setw(14) << "FDR" << "size\n";
        for (const auto& s : cell.summaries) {
            char size[32];
            std::snprintf(size, sizeof size, "%.2f", s.size_mean);
            os << std::setw(28)
               << (s.mode == Mode::StopAtP0 ? "stopped at step p0" : "final set selected by EBIC")
               << std::setw(10) << to_string(s.selector) << std::setw(14)
               << format_mean_sd(s.pdr_mean, s.pdr_sd) << std::setw(14)
               << format_mean_sd(s.fdr_mean, s.fdr_sd) << size << "\n";
        }
        os << "\n";
    }
}

namespace {

void csv_cell_prefix(std::ostream& os, const CellResult& cell) {
    const auto& c = cell.config;
    os << c.n << ',' << cell.dims.p << ',' << cell.dims.p0 << ',' << to_string(c.structure.kind)
       << ',' << c.structure.rho << ',' << c.coef_type << ',' << c.h << ',' << c.seed << ','
       << cell.max_steps << ',' << cell.gamma;
}

}  // namespace

void write_summary_csv(std::ostream& os, const std::vector<CellResult>& cells) {
    const auto old = os.precision(17);
    os << "n,p,p0,structure,rho,coef_type,h,seed,max_steps,gamma,selector,mode,replicates,failed,"
          "pdr_mean,pdr_sd,fdr_mean,fdr_sd,size_mean\n";
    for (const auto& cell : cells)
        for (const auto& s : cell.summaries) {
            csv_cell_prefix(os, cell);
            os << ',' << to_string(s.selector) << ',' << to_string(s.mode) << ',' << s.count << ','
               << cell.failed << ',' << s.pdr_mean << ',' << s.pdr_sd << ',' << s.fdr_mean << ','
               << s.fdr_sd << ',' << s.size_mean << '\n';
        }
    os.precision(old);
}

void write_replicates_csv(std::ostream& os, const std::vector<CellResult>& cells) {
    const auto old = os.precision(17);
    os << "n,p,p0,structure,rho,coef_type,h,seed,max_steps,gamma,replicate,selector,mode,pdr,fdr,"
          "size,early_stop,budget_suspect\n";
    for (const auto& cell : cells)
        for (const auto& r : cell.records) {
            csv_cell_prefix(os, cell);
            os << ',' << r.replicate << ',' << to_string(r.selector) << ',' << to_string(r.mode)
               << ',' << r.pdr << ',' << r.fdr << ',' << r.size << ',' << (r.early_stop ? 1 : 0) << ','
               << (r.budget_suspect ? 1 : 0) << '\n';
        }
    os.precision(old);
}

}  // namespace seqlasso
