#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seqlasso/criteria.hpp"
#include "seqlasso/datagen.hpp"
#include "seqlasso/dataset.hpp"
#include "seqlasso/selectors.hpp"

namespace seqlasso {

// Path length used for the EBIC mode of the simulations.
inline constexpr int kDefaultSimulationSteps = 50;

struct SimulationConfig {
    Index n = 100;
    int coef_type = 1;
    double h = 0.8;
    StructureSpec structure;
    int replicates = 200;
    std::uint64_t seed = 1;
    std::vector<Selector> selectors{Selector::Lasso, Selector::Fsr, Selector::SLasso};
    int max_steps = 0;              // 0: min(50, p, n-1)
    double gamma_r = 1.5;
    std::optional<double> gamma;    // overrides gamma_r when set
    Index p = 0;                    // 0: derived from n
    Index p0 = 0;                   // 0: derived from n
    bool ebic_mode = true;          // also evaluate the EBIC-selected set
    int threads = 0;                // 0: hardware concurrency

    Dims resolved_dims() const;
    int resolved_max_steps() const;
    CriterionConfig criterion() const;
    // Throws Config naming the offending key.
    void validate() const;
};

enum class Mode { StopAtP0, Ebic };
const char* to_string(Mode m);

struct Replicate {
    Eigen::MatrixXd raw_x;
    Eigen::VectorXd raw_y;
    std::vector<Index> support;
    Eigen::VectorXd beta_causal;
    double sigma = 0.0;
    Dataset data;
};

// Deterministic in (config.seed, index).
Replicate simulate_replicate(const SimulationConfig& cfg, int index);

struct Metrics {
    double pdr = 0.0;
    double fdr = 0.0;
};
// PDR = |s* & s0| / |s0|, FDR = |s* \ s0| / |s*| (0 when s* is empty).
Metrics metrics(const std::vector<Index>& s_star, const std::vector<Index>& s0);

struct ReplicateRecord {
    int replicate = 0;
    Selector selector = Selector::SLasso;
    Mode mode = Mode::StopAtP0;
    double pdr = 0.0;
    double fdr = 0.0;
    Index size = 0;
    bool early_stop = false;   // path ended before reaching p0 / K
    bool budget_suspect = false;  // EBIC minimum at K-1 or K
    double runtime_s = 0.0;    // excluded from deterministic outputs
};

struct Summary {
    Selector selector = Selector::SLasso;
    Mode mode = Mode::StopAtP0;
    int count = 0;
    double pdr_mean = 0.0, pdr_sd = 0.0;
    double fdr_mean = 0.0, fdr_sd = 0.0;
    double size_mean = 0.0;
};

struct CellResult {
    SimulationConfig config;
    Dims dims;
    int max_steps = 0;
    double gamma = 0.0;
    std::vector<ReplicateRecord> records;  // replicate-major, then selector, then mode
    std::vector<Summary> summaries;
    int failed = 0;
    std::vector<std::string> failures;
    double wall_seconds = 0.0;

    const Summary& summary(Selector s, Mode m) const;
};

// Per-replicate selection outcome for one dataset, both modes.
std::vector<ReplicateRecord> evaluate_replicate(const Replicate& rep, const SimulationConfig& cfg,
                                                int index);

CellResult run_cell(const SimulationConfig& cfg);

// Aggregates recomputed from records (sample standard deviation).
std::vector<Summary> summarize(const std::vector<ReplicateRecord>& records,
                               const std::vector<Selector>& selectors, bool ebic_mode);

// ".940(.084)" style; values that round to 1 print as "1.00".
std::string format_mean_sd(double mean, double sd);
std::string cell_label(const SimulationConfig& cfg);

void write_table(std::ostream& os, const std::vector<CellResult>& cells);
void write_summary_csv(std::ostream& os, const std::vector<CellResult>& cells);
void write_replicates_csv(std::ostream& os, const std::vector<CellResult>& cells);

}  // namespace seqlasso
