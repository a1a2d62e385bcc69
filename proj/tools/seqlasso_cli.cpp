#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqlasso/conditions.hpp"
#include "seqlasso/config.hpp"
#include "seqlasso/criteria.hpp"
#include "seqlasso/csv.hpp"
#include "seqlasso/error.hpp"
#include "seqlasso/experiments.hpp"
#include "seqlasso/selectors.hpp"

namespace fs = std::filesystem;
using namespace seqlasso;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SimulateOpts {
    std::vector<Index> n{100};
    std::vector<std::string> structures{"A1"};
    std::vector<int> coef_types{1};
    std::optional<double> rho;
    double h = 0.8;
    int replicates = 200;
    std::uint64_t seed = 1;
    std::string selectors = "lasso,fsr,slasso";
    int steps = 0;
    double gamma_r = 1.5;
    std::optional<double> gamma;
    Index p = 0;
    Index p0 = 0;
    bool no_ebic = false;
    int threads = 0;
    std::string out = "results";
    std::string export_dataset;
    bool quiet = false;
};

struct DataOpts {
    std::string data;
    std::string response = "y";
    std::string selector = "slasso";
    int steps = 0;
    double gamma_r = 1.5;
    std::optional<double> gamma;
    std::string report;
    std::string csv;
};

struct ConditionOpts {
    std::string special_case;
    std::optional<double> rho;
    Index p0 = 8;
    Index p = 0;
    std::string data;
    std::string response = "y";
    std::string support;
    std::string beta;
};

bool is_config_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::Config:
        case ErrorCode::InvalidRho:
        case ErrorCode::MissingColumn:
        case ErrorCode::NonNumericColumn:
        case ErrorCode::DuplicateHeader:
        case ErrorCode::Io:
            return true;
        default:
            return false;
    }
}

[[noreturn]] void config_fail(const std::string& key, const std::string& msg) {
    throw Error(ErrorCode::Config, key + ": " + msg);
}

std::string timestamp() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return f;
}

std::vector<SimulationConfig> build_cells(const SimulateOpts& o) {
    std::vector<SimulationConfig> cells;
    const std::vector<Selector> sels = parse_selector_list(o.selectors);
    for (const auto& name : o.structures) {
        StructureSpec spec;
        try {
            spec.kind = parse_structure(name);
        } catch (const Error& e) {
            config_fail("structure", e.what());
        }
        if (structure_uses_rho(spec.kind)) {
            if (!o.rho) config_fail("rho", std::string("required for structure ") + to_string(spec.kind));
            spec.rho = *o.rho;
            if (!(spec.rho >= 0.0 && spec.rho < 1.0)) config_fail("rho", "must lie in [0, 1)");
        }
        for (Index n : o.n)
            for (int type : o.coef_types) {
                SimulationConfig c;
                c.n = n;
                c.structure = spec;
                c.coef_type = type;
                c.h = o.h;
                c.replicates = o.replicates;
                c.seed = o.seed;
                c.selectors = sels;
                c.max_steps = o.steps;
                c.gamma_r = o.gamma_r;
                c.gamma = o.gamma;
                c.p = o.p;
                c.p0 = o.p0;
                c.ebic_mode = !o.no_ebic;
                c.threads = o.threads;
                c.validate();
                cells.push_back(c);
            }
    }
    return cells;
}

int cmd_simulate(const SimulateOpts& o, bool h_given) {
    const auto cells_cfg = build_cells(o);
    if (!h_given) std::cerr << "notice: --h not given, using default h=0.8\n";

    const fs::path out(o.out);
    fs::create_directories(out);

    if (!o.export_dataset.empty()) {
        const Replicate rep = simulate_replicate(cells_cfg.front(), 0);
        auto f = open_out(o.export_dataset);
        write_csv(f, join_response(rep.raw_x, rep.raw_y));
    }

    std::vector<CellResult> cells;
    for (const auto& cfg : cells_cfg) {
        cells.push_back(run_cell(cfg));
        const CellResult& c = cells.back();
        std::ostringstream line;
        line << cell_label(cfg) << ":";
        for (const auto& s : c.summaries)
            line << " " << to_string(s.selector) << "/" << to_string(s.mode)
                 << " PDR=" << format_mean_sd(s.pdr_mean, s.pdr_sd)
                 << " FDR=" << format_mean_sd(s.fdr_mean, s.fdr_sd);
        if (c.failed) line << " failed=" << c.failed;
        int suspect = 0;
        for (const auto& r : c.records) suspect += r.budget_suspect ? 1 : 0;
        if (suspect) line << " ebic-at-budget=" << suspect;
        line << " (" << std::fixed << std::setprecision(1) << c.wall_seconds << "s)";
        std::cout << line.str() << "\n";
    }

    {
        auto f = open_out(out / "table.txt");
        write_table(f, cells);
    }
    {
        auto f = open_out(out / "results.csv");
        write_summary_csv(f, cells);
    }
    {
        auto f = open_out(out / "replicates.csv");
        write_replicates_csv(f, cells);
    }
    {
        auto f = open_out(out / "meta.txt");
        f << "timestamp=" << timestamp() << "\n";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            f << "\n[cell " << i << "]\n";
            write_config(f, cells[i].config);
            f << "threads=" << cells[i].config.threads << "\n"
              << "wall_seconds=" << cells[i].wall_seconds << "\n"
              << "failed=" << cells[i].failed << "\n";
            for (const auto& msg : cells[i].failures) f << "failure=" << msg << "\n";
            double runtime = 0;
            for (const auto& r : cells[i].records)
                if (r.mode == Mode::StopAtP0) runtime += r.runtime_s;
            f << "selector_seconds=" << runtime << "\n";
        }
    }
    if (!o.quiet) {
        write_table(std::cout, cells);
        std::cout << "wrote " << (out / "table.txt").string() << ", results.csv, replicates.csv, meta.txt\n";
    }
    return 0;
}

struct LoadedDataset {
    LabeledData raw;
    Dataset data;
};

LoadedDataset load_dataset(const std::string& path, const std::string& response) {
    if (path.empty()) config_fail("data", "a dataset path is required");
    LabeledData raw = split_response(read_csv_file(path), response);
    if (raw.x.cols() < 1) config_fail("data", "no feature columns besides the response");
    Dataset d = standardize(raw.x, raw.y);
    return {std::move(raw), std::move(d)};
}

std::string names_of(const std::vector<Index>& idx, const std::vector<std::string>& names) {
    std::string s;
    for (Index j : idx) {
        if (!s.empty()) s += ",";
        s += names[static_cast<std::size_t>(j)];
    }
    return s.empty() ? "-" : s;
}

SelectorConfig selector_config(const Dataset& d, int steps) {
    SelectorConfig cfg = SelectorConfig::defaults_for(d.n(), d.p());
    if (steps > 0) cfg.max_steps = steps;
    try {
        cfg.validate(d.n(), d.p());
    } catch (const Error& e) {
        config_fail("steps", e.what());
    }
    return cfg;
}

Selector selector_from(const std::string& name) {
    try {
        return parse_selector(name);
    } catch (const Error& e) {
        config_fail("selector", e.what());
    }
}

int cmd_select(const DataOpts& o) {
    const Selector sel = selector_from(o.selector);
    const LoadedDataset ld = load_dataset(o.data, o.response);
    const Dataset& d = ld.data;
    const auto& names = ld.raw.feature_names;
    const SelectorConfig scfg = selector_config(d, o.steps);
    const CriterionConfig crit = o.gamma ? CriterionConfig{*o.gamma}
                                         : CriterionConfig::from_rule(o.gamma_r, d.n(), d.p());

    const SelectionPath path = run_selector(sel, d, scfg);
    const EbicSelection pick = select_by_ebic(path, d, crit);
    const std::vector<Index> chosen = pick.selected.sorted();
    const Coefficients raw = to_raw_units(d, fit_on_support(d, chosen));

    std::ostringstream rep;
    rep << "data: " << o.data << " (n=" << d.n() << ", p=" << d.p() << ", response=" << o.response
        << ")\n"
        << "selector: " << to_string(sel) << ", K=" << scfg.max_steps << ", gamma=" << crit.gamma
        << "\n"
        << "path: " << path.size() << " steps, " << to_string(path.termination);
    if (!path.reason.empty()) rep << " (" << path.reason << ")";
    rep << "\n\nEBIC curve\n"
        << std::left << std::setw(6) << "step" << std::setw(6) << "size" << std::setw(16) << "ebic"
        << "entered\n";
    for (std::size_t k = 0; k < pick.values.size(); ++k) {
        const std::size_t size = k == 0 ? 0 : path.steps[k - 1].active.size();
        const std::string entered = k == 0 ? "-" : names_of(path.steps[k - 1].entered, names);
        std::ostringstream v;
        v << std::setprecision(10) << pick.values[k];
        rep << std::setw(6) << k << std::setw(6) << size << std::setw(16) << v.str() << entered
            << (k == pick.step ? "  <- selected" : "") << "\n";
    }
    if (pick.budget_suspect)
        rep << "warning: EBIC minimum sits at the end of the path; consider a larger --steps\n";
    rep << "\nselected (" << chosen.size() << "): " << names_of(chosen, names) << "\n"
        << "\nleast-squares refit on the selected set (raw units)\n"
        << std::setw(16) << "feature" << "coefficient\n"
        << std::setw(16) << "(intercept)" << std::setprecision(10) << raw.intercept << "\n";
    for (const auto& [j, b] : raw.beta)
        rep << std::setw(16) << names[static_cast<std::size_t>(j)] << b << "\n";

    std::cout << rep.str();
    const std::string report = o.report.empty() ? "select_report.txt" : o.report;
    auto f = open_out(report);
    f << rep.str();
    return 0;
}

int cmd_path(const DataOpts& o) {
    const Selector sel = selector_from(o.selector);
    const LoadedDataset ld = load_dataset(o.data, o.response);
    const Dataset& d = ld.data;
    const auto& names = ld.raw.feature_names;
    const SelectionPath path = run_selector(sel, d, selector_config(d, o.steps));

    std::cout << "selector: " << to_string(sel) << ", " << path.size() << " steps, "
              << to_string(path.termination);
    if (!path.reason.empty()) std::cout << " (" << path.reason << ")";
    std::cout << "\n"
              << std::left << std::setw(6) << "step" << std::setw(6) << "size" << std::setw(16)
              << "lambda" << std::setw(16) << "rss" << "entered / dropped\n";
    std::unique_ptr<std::ofstream> csv;
    if (!o.csv.empty()) {
        csv = std::make_unique<std::ofstream>(open_out(o.csv));
        *csv << "step,size,lambda,rss,entered,dropped,tie_fallback\n" << std::setprecision(17);
    }
    for (std::size_t k = 0; k < path.steps.size(); ++k) {
        const PathStep& s = path.steps[k];
        std::ostringstream lam, rss;
        lam << std::setprecision(8) << s.lambda;
        rss << std::setprecision(8) << s.rss;
        std::cout << std::setw(6) << k + 1 << std::setw(6) << s.active.size() << std::setw(16)
                  << lam.str() << std::setw(16) << rss.str() << "+" << names_of(s.entered, names);
        if (!s.dropped.empty()) std::cout << " -" << names_of(s.dropped, names);
        if (s.tie_fallback) std::cout << " (tie fallback)";
        std::cout << "\n";
        if (csv) {
            auto join = [&](const std::vector<Index>& v) {
                std::string r;
                for (Index j : v) r += (r.empty() ? "" : ";") + names[static_cast<std::size_t>(j)];
                return r;
            };
            *csv << k + 1 << ',' << s.active.size() << ',' << s.lambda << ',' << s.rss << ','
                 << join(s.entered) << ',' << join(s.dropped) << ',' << (s.tie_fallback ? 1 : 0)
                 << '\n';
        }
    }
    return 0;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void print_suite(const ConditionSuite& suite) {
    std::cout << suite.title << "\n"
              << std::left << std::setw(44) << "condition" << std::setw(8) << "holds"
              << std::setw(16) << "margin" << std::setw(16) << "quantity" << "witness  note\n";
    for (const auto& r : suite.reports) {
        std::ostringstream m, q, w;
        m << std::setprecision(6) << r.margin;
        q << std::setprecision(6) << r.quantity;
        for (std::size_t i = 0; i < r.witness.size(); ++i) w << (i ? "," : "") << r.witness[i];
        std::cout << std::setw(44) << r.name << std::setw(8) << (r.holds ? "yes" : "NO")
                  << std::setw(16) << m.str() << std::setw(16) << q.str()
                  << std::setw(9) << (r.witness.empty() ? "-" : w.str()) << r.note << "\n";
    }
}

int cmd_check_conditions(const ConditionOpts& o) {
    if (!o.special_case.empty()) {
        int which = 0;
        if (o.special_case == "I" || o.special_case == "1") which = 1;
        else if (o.special_case == "II" || o.special_case == "2") which = 2;
        else config_fail("special-case", "expected I or II");
        double rho = 0.0;
        if (which == 1) {
            if (!o.rho) config_fail("rho", "required for special case I");
            rho = *o.rho;
            if (!(rho >= 0.0 && rho < 1.0)) config_fail("rho", "must lie in [0, 1)");
        }
        if (o.p0 < 2) config_fail("p0", "must be at least 2");
        if (o.p != 0 && o.p <= o.p0) config_fail("p", "must exceed p0");
        print_suite(evaluate_special_case(which, o.p0, rho, o.p));
        return 0;
    }

    const LoadedDataset ld = load_dataset(o.data, o.response);
    const auto& names = ld.raw.feature_names;
    if (o.support.empty()) config_fail("support", "required in data mode");
    std::vector<Index> support;
    for (const auto& tok : split_list(o.support)) {
        Index j = -1;
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == tok) j = static_cast<Index>(k);
        if (j < 0) {
            try {
                std::size_t used = 0;
                const long v = std::stol(tok, &used);
                if (used == tok.size() && v >= 1 && v <= static_cast<long>(names.size())) j = v - 1;
            } catch (const std::exception&) {
            }
        }
        if (j < 0) config_fail("support", "unknown feature '" + tok + "'");
        support.push_back(j);
    }
    Coefficients beta;
    if (o.beta.empty()) {
        beta = fit_on_support(ld.data, support);
    } else {
        const auto vals = split_list(o.beta);
        if (vals.size() != support.size()) config_fail("beta", "needs one value per support entry");
        for (std::size_t k = 0; k < vals.size(); ++k) {
            try {
                beta.beta[support[k]] = std::stod(vals[k]);
            } catch (const std::exception&) {
                config_fail("beta", "not a number: " + vals[k]);
            }
        }
    }
    print_suite(evaluate_dataset_conditions(ld.data, beta));
    std::cout << "indices are 0-based feature positions:";
    for (Index j : support) std::cout << " " << j << "=" << names[static_cast<std::size_t>(j)];
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential lasso feature selection: simulations, selection and condition checks"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo comparison of selectors");
    sim->set_config("--config", "", "key=value file using these flag names; flags override it");
    sim->add_option("--n", so.n, "sample size(s), comma separated")->delimiter(',');
    sim->add_option("--structure", so.structures, "A1 A2 A3 B1 B2 B3, comma separated")
        ->delimiter(',');
    sim->add_option("--coef-type", so.coef_types, "coefficient type 1 or 2, comma separated")
        ->delimiter(',');
    sim->add_option("--rho", so.rho, "correlation parameter for A2 A3 B2 B3");
    auto* h_opt = sim->add_option("--h", so.h, "signal fraction in (0, 1]");
    sim->add_option("--replicates", so.replicates, "replicates per cell")->capture_default_str();
    sim->add_option("--seed", so.seed, "base seed (falls back to SEQLASSO_SEED)")
        ->envname("SEQLASSO_SEED")
        ->capture_default_str();
    sim->add_option("--selectors", so.selectors, "subset of lasso,fsr,slasso,omp")
        ->capture_default_str();
    sim->add_option("--steps", so.steps, "step budget K (0: min(50, p, n-1))");
    sim->add_option("--gamma-r", so.gamma_r, "EBIC gamma = 1 - ln n / (2 r ln p)")
        ->capture_default_str();
    sim->add_option("--gamma", so.gamma, "fixed EBIC gamma");
    sim->add_option("--p", so.p, "override the number of features");
    sim->add_option("--p0", so.p0, "override the number of causal features");
    sim->add_flag("--no-ebic", so.no_ebic, "skip the EBIC mode");
    sim->add_option("--threads", so.threads, "worker cap (0: available parallelism)");
    sim->add_option("--out", so.out, "output directory")->capture_default_str();
    sim->add_option("--export-dataset", so.export_dataset,
                    "write replicate 0 of the first cell as CSV");
    sim->add_flag("--quiet", so.quiet, "do not echo the table");

    DataOpts sel_o;
    auto* sel = app.add_subcommand("select", "Select features on a CSV dataset with EBIC");
    DataOpts path_o;
    auto* path = app.add_subcommand("path", "Print the selection path on a CSV dataset");
    for (auto [cmd, o] : {std::pair{sel, &sel_o}, std::pair{path, &path_o}}) {
        cmd->add_option("data,--data", o->data, "CSV file with a header row")->required();
        cmd->add_option("--response", o->response, "response column")->capture_default_str();
        cmd->add_option("--selector", o->selector, "slasso, omp, fsr or lasso")
            ->capture_default_str();
        cmd->add_option("--steps", o->steps, "step budget K (0: min(ceil(n/2), p, n-1))");
    }
    sel->add_option("--gamma-r", sel_o.gamma_r, "EBIC gamma = 1 - ln n / (2 r ln p)")
        ->capture_default_str();
    sel->add_option("--gamma", sel_o.gamma, "fixed EBIC gamma");
    sel->add_option("--report", sel_o.report, "report file (default select_report.txt)");
    path->add_option("--csv", path_o.csv, "also write the path as CSV");

    ConditionOpts co;
    auto* chk = app.add_subcommand("check-conditions", "Evaluate support-recovery conditions");
    chk->add_option("--special-case", co.special_case, "I (constant correlation) or II");
    chk->add_option("--rho", co.rho, "correlation for special case I");
    chk->add_option("--p0", co.p0, "causal block size")->capture_default_str();
    chk->add_option("--p", co.p, "number of features (0: 5 p0)");
    chk->add_option("--data", co.data, "CSV dataset instead of a special case");
    chk->add_option("--response", co.response, "response column")->capture_default_str();
    chk->add_option("--support", co.support, "candidate support: names or 1-based positions");
    chk->add_option("--beta", co.beta, "coefficients on the support (default: refit)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(so, h_opt->count() > 0);
        if (sel->parsed()) return cmd_select(sel_o);
        if (path->parsed()) return cmd_path(path_o);
        if (chk->parsed()) return cmd_check_conditions(co);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
