#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seqlasso/dataset.hpp"

namespace seqlasso {

// Per-replicate random stream: a 64-bit Mersenne Twister whose seed is a
// SplitMix64 mix of (seed, replicate, stream), so replicates can be generated
// in any order or thread and still be identical.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream = 0);

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    bool bernoulli(double prob) { return uniform() < prob; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

enum class StructureKind { A1, A2, A3, B1, B2, B3 };

StructureKind parse_structure(const std::string& name);
const char* to_string(StructureKind kind);
bool structure_uses_rho(StructureKind kind);

struct StructureSpec {
    StructureKind kind = StructureKind::A1;
    double rho = 0.0;  // required for A2, A3, B2, B3

    // Throws InvalidRho outside [0, 1) for structures that use rho.
    void validate() const;
};

struct Dims {
    Index p0 = 0;
    Index p = 0;
};

// p0 = round(4 n^0.16), p = round(5 exp(n^0.3)).
Dims dims(Index n);

// Phi^{-1}(0.875): the type-1 coefficient noise z has P(|z| >= 0.1) = 0.25.
inline constexpr double kNormalQuantile0875 = 1.1503493803760079;
inline constexpr double kTypeOneSigmaZ = 0.1 / kNormalQuantile0875;

// Coefficients for the causal features, in causal order (length p0).
// Type 1: (-1)^u (4 n^-0.15 + |z|), u ~ Bernoulli(0.4), z ~ N(0, sigma_z^2).
// Type 2: 2 sqrt(j) n^-0.15, j = 1..p0.
Eigen::VectorXd gen_coefficients(int type, Index p0, Index n, Rng& rng);

struct Design {
    Eigen::MatrixXd x;               // raw, n x p
    std::vector<Index> support;      // causal indices, ascending
    Eigen::MatrixXd sigma_causal;    // population covariance of the causal block
};

// Cluster layout used by A3: sizes 3 or 2, evenly spaced starts.
std::vector<Index> a3_support(Index p, Index p0);

Design gen_design(const StructureSpec& spec, Index n, Index p, Index p0, Rng& rng);

struct Response {
    Eigen::VectorXd y;
    double sigma = 0.0;
};

// sigma^2 = beta^T Sigma beta (1 - h) / h, y = X beta + N(0, sigma^2).
double noise_variance(const Eigen::VectorXd& beta_causal, const Eigen::MatrixXd& sigma_causal,
                      double h);
Response gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_causal,
                      const std::vector<Index>& support, double h,
                      const Eigen::MatrixXd& sigma_causal, Rng& rng);

// Population covariance builders.
Eigen::MatrixXd constant_correlation(Index p, double rho);
Eigen::MatrixXd ar1_correlation(Index p, double rho);
// Orthonormal causal block {0..p0-1}; each non-causal feature has covariance
// sign(beta_k)/p0 with causal k and 1/p0 with every other non-causal feature.
Eigen::MatrixXd special_case_two_covariance(Index p, const Eigen::VectorXd& beta_causal);

}  // namespace seqlasso
