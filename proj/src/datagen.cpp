#include "seqlasso/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqlasso {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) {
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ replicate) ^ stream);
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(stream)};
    engine_.seed(seq);
}

StructureKind parse_structure(const std::string& name) {
    if (name == "A1") return StructureKind::A1;
    if (name == "A2") return StructureKind::A2;
    if (name == "A3") return StructureKind::A3;
    if (name == "B1") return StructureKind::B1;
    if (name == "B2") return StructureKind::B2;
    if (name == "B3") return StructureKind::B3;
    throw Error(ErrorCode::InvalidArgument, "unknown structure '" + name + "'");
}

const char* to_string(StructureKind kind) {
    switch (kind) {
    case StructureKind::A1: return "A1";
    case StructureKind::A2: return "A2";
    case StructureKind::A3: return "A3";
    case StructureKind::B1: return "B1";
    case StructureKind::B2: return "B2";
    case StructureKind::B3: return "B3";
    }
    return "?";
}

bool structure_uses_rho(StructureKind kind) {
    return kind != StructureKind::A1 && kind != StructureKind::B1;
}

void StructureSpec::validate() const {
    if (structure_uses_rho(kind) && !(rho >= 0.0 && rho < 1.0))
        throw Error(ErrorCode::InvalidRho, std::string("rho must lie in [0, 1) for structure ") +
                                               to_string(kind));
}

Dims dims(Index n) {
    if (n < 10) throw Error(ErrorCode::InvalidArgument, "dims needs n >= 10");
    const double nd = static_cast<double>(n);
    Dims out;
    out.p0 = static_cast<Index>(std::llround(4.0 * std::pow(nd, 0.16)));
    out.p = static_cast<Index>(std::llround(5.0 * std::exp(std::pow(nd, 0.3))));
    return out;
}

Eigen::VectorXd gen_coefficients(int type, Index p0, Index n, Rng& rng) {
    const double scale = std::pow(static_cast<double>(n), -0.15);
    Eigen::VectorXd beta(p0);
    if (type == 1) {
        for (Index j = 0; j < p0; ++j) {
            const bool negative = rng.bernoulli(0.4);
            const double magnitude = 4.0 * scale + std::abs(kTypeOneSigmaZ * rng.normal());
            beta(j) = negative ? -magnitude : magnitude;
        }
    } else if (type == 2) {
        for (Index j = 0; j < p0; ++j) beta(j) = 2.0 * std::sqrt(static_cast<double>(j + 1)) * scale;
    } else {
        throw Error(ErrorCode::InvalidArgument, "coefficient type must be 1 or 2");
    }
    return beta;
}

std::vector<Index> a3_support(Index p, Index p0) {
    std::vector<Index> sizes;
    if (p0 < 2) {
        sizes.push_back(p0);
    } else {
        const Index clusters = (p0 + 2) / 3;
        const Index threes = p0 - 2 * clusters;
        for (Index c = 0; c < clusters; ++c) sizes.push_back(c < threes ? 3 : 2);
    }
    const Index spacing = p / std::max<Index>(4, static_cast<Index>(sizes.size()));
    std::vector<Index> out;
    for (std::size_t c = 0; c < sizes.size(); ++c)
        for (Index k = 0; k < sizes[c]; ++k) out.push_back(static_cast<Index>(c) * spacing + k);
    return out;
}

Eigen::MatrixXd constant_correlation(Index p, double rho) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(p, p, rho);
    s.diagonal().setOnes();
    return s;
}

Eigen::MatrixXd ar1_correlation(Index p, double rho) {
    Eigen::MatrixXd s(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) s(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    return s;
}

Eigen::MatrixXd special_case_two_covariance(Index p, const Eigen::VectorXd& beta_causal) {
    const Index p0 = beta_causal.size();
    if (p0 < 2 || p <= p0)
        throw Error(ErrorCode::InvalidArgument, "special case II needs 2 <= p0 < p");
    const double inv = 1.0 / static_cast<double>(p0);
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(p, p, inv);
    s.topLeftCorner(p0, p0).setIdentity();
    for (Index j = p0; j < p; ++j)
        for (Index k = 0; k < p0; ++k) {
            const double v = beta_causal(k) < 0 ? -inv : inv;
            s(j, k) = v;
            s(k, j) = v;
        }
    s.diagonal().setOnes();
    return s;
}

namespace {

std::vector<Index> random_support(Index p, Index p0, Rng& rng) {
    std::vector<Index> all(static_cast<std::size_t>(p));
    std::iota(all.begin(), all.end(), Index{0});
    // Partial Fisher-Yates with our own uniform draws (portable across stdlibs).
    for (Index k = 0; k < p0; ++k) {
        const Index pick = k + static_cast<Index>(rng.uniform() * static_cast<double>(p - k));
        std::swap(all[static_cast<std::size_t>(k)], all[static_cast<std::size_t>(std::min(pick, p - 1))]);
    }
    std::vector<Index> s(all.begin(), all.begin() + p0);
    std::sort(s.begin(), s.end());
    return s;
}

Eigen::MatrixXd standard_normal(Index n, Index p, Rng& rng) {
    Eigen::MatrixXd m(n, p);
    // Column-major fill keeps the draw order independent of Eigen internals.
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) m(i, j) = rng.normal();
    return m;
}

// Rows from (1-rho) I + rho 11^T: sqrt(1-rho) z_j + sqrt(rho) w.
Eigen::MatrixXd constant_correlated(Index n, Index p, double rho, Rng& rng) {
    Eigen::MatrixXd z = standard_normal(n, p, rng);
    Eigen::VectorXd w(n);
    for (Index i = 0; i < n; ++i) w(i) = rng.normal();
    z *= std::sqrt(1.0 - rho);
    z.colwise() += std::sqrt(rho) * w;
    return z;
}

// Rows from rho^{|i-j|}: stationary AR(1) recursion across columns.
Eigen::MatrixXd ar1_correlated(Index n, Index p, double rho, Rng& rng) {
    Eigen::MatrixXd z = standard_normal(n, p, rng);
    const double innov = std::sqrt(1.0 - rho * rho);
    for (Index j = 1; j < p; ++j) z.col(j) = rho * z.col(j - 1) + innov * z.col(j);
    return z;
}

}  // namespace

Design gen_design(const StructureSpec& spec, Index n, Index p, Index p0, Rng& rng) {
    spec.validate();
    if (p0 < 1 || p0 >= p) throw Error(ErrorCode::InvalidArgument, "need 1 <= p0 < p");
    const double rho = spec.rho;
    Design out;
    switch (spec.kind) {
    case StructureKind::A1:
        out.support = random_support(p, p0, rng);
        out.x = standard_normal(n, p, rng);
        out.sigma_causal = Eigen::MatrixXd::Identity(p0, p0);
        break;
    case StructureKind::A2:
        out.support = random_support(p, p0, rng);
        out.x = constant_correlated(n, p, rho, rng);
        out.sigma_causal = constant_correlation(p0, rho);
        break;
    case StructureKind::A3: {
        out.support = a3_support(p, p0);
        out.x = ar1_correlated(n, p, rho, rng);
        out.sigma_causal.resize(p0, p0);
        for (Index a = 0; a < p0; ++a)
            for (Index b = 0; b < p0; ++b)
                out.sigma_causal(a, b) = std::pow(
                    rho, static_cast<double>(std::abs(out.support[static_cast<std::size_t>(a)] -
                                                      out.support[static_cast<std::size_t>(b)])));
        break;
    }
    case StructureKind::B1: {
        out.support = random_support(p, p0, rng);
        const Eigen::MatrixXd z = standard_normal(n, p, rng);
        const Eigen::MatrixXd w = standard_normal(n, p0, rng);
        Eigen::VectorXd zsum = Eigen::VectorXd::Zero(n);
        for (Index k : out.support) zsum += z.col(k);
        out.x.resize(n, p);
        std::vector<char> causal(static_cast<std::size_t>(p), 0);
        for (std::size_t c = 0; c < out.support.size(); ++c) {
            const Index j = out.support[c];
            causal[static_cast<std::size_t>(j)] = 1;
            out.x.col(j) = (z.col(j) + w.col(static_cast<Index>(c))) / std::sqrt(2.0);
        }
        const double denom = std::sqrt(1.0 + static_cast<double>(p0));
        for (Index j = 0; j < p; ++j)
            if (!causal[static_cast<std::size_t>(j)]) out.x.col(j) = (z.col(j) + zsum) / denom;
        out.sigma_causal = Eigen::MatrixXd::Identity(p0, p0);
        break;
    }
    case StructureKind::B2:
    case StructureKind::B3: {
        Eigen::MatrixXd xc;
        if (spec.kind == StructureKind::B2) {
            out.support = random_support(p, p0, rng);
            xc = constant_correlated(n, p0, rho, rng);
            out.sigma_causal = constant_correlation(p0, rho);
        } else {
            out.support.resize(static_cast<std::size_t>(p0));
            std::iota(out.support.begin(), out.support.end(), Index{0});
            xc = ar1_correlated(n, p0, rho, rng);
            out.sigma_causal = ar1_correlation(p0, rho);
        }
        const Eigen::VectorXd mean_causal = xc.rowwise().mean();
        const Eigen::MatrixXd eps = standard_normal(n, p - p0, rng) * std::sqrt(0.08);
        out.x.resize(n, p);
        std::vector<char> causal(static_cast<std::size_t>(p), 0);
        for (std::size_t c = 0; c < out.support.size(); ++c) {
            causal[static_cast<std::size_t>(out.support[c])] = 1;
            out.x.col(out.support[c]) = xc.col(static_cast<Index>(c));
        }
        Index e = 0;
        for (Index j = 0; j < p; ++j)
            if (!causal[static_cast<std::size_t>(j)]) out.x.col(j) = eps.col(e++) + mean_causal;
        break;
    }
    }
    return out;
}

double noise_variance(const Eigen::VectorXd& beta_causal, const Eigen::MatrixXd& sigma_causal,
                      double h) {
    if (!(h > 0.0 && h <= 1.0)) throw Error(ErrorCode::InvalidArgument, "h must lie in (0, 1)");
    const double signal = beta_causal.dot(sigma_causal * beta_causal);
    return signal * (1.0 - h) / h;
}

Response gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_causal,
                      const std::vector<Index>& support, double h,
                      const Eigen::MatrixXd& sigma_causal, Rng& rng) {
    Response r;
    r.sigma = std::sqrt(noise_variance(beta_causal, sigma_causal, h));
    r.y = Eigen::VectorXd::Zero(x.rows());
    for (std::size_t c = 0; c < support.size(); ++c)
        r.y += beta_causal(static_cast<Index>(c)) * x.col(support[c]);
    for (Index i = 0; i < x.rows(); ++i) r.y(i) += r.sigma * rng.normal();
    return r;
}

}  // namespace seqlasso
