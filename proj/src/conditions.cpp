#include "seqlasso/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "seqlasso/datagen.hpp"

namespace seqlasso {

namespace {

constexpr double kRankThreshold = 1e-10;

std::vector<Index> support_of(const Coefficients& beta) {
    std::vector<Index> s;
    for (auto [j, b] : beta.beta)
        if (b != 0.0) s.push_back(j);
    return s;
}

std::vector<Index> complement(Index p, const std::vector<Index>& a, const std::vector<Index>& b = {}) {
    std::vector<char> mark(static_cast<std::size_t>(p), 0);
    for (Index j : a) mark[static_cast<std::size_t>(j)] = 1;
    for (Index j : b) mark[static_cast<std::size_t>(j)] = 1;
    std::vector<Index> out;
    for (Index j = 0; j < p; ++j)
        if (!mark[static_cast<std::size_t>(j)]) out.push_back(j);
    return out;
}

std::string set_string(const std::vector<Index>& s) {
    std::ostringstream os;
    os << '{';
    for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
    os << '}';
    return os.str();
}

void finish(ConditionReport& r) {
    r.boundary = std::abs(r.margin) <= kStrictMargin;
    r.holds = r.margin > kStrictMargin;
    if (r.boundary && r.note.empty()) r.note = "fails (boundary)";
}

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> checked_qr(const Eigen::MatrixXd& m, const char* what) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < m.cols())
        throw Error(ErrorCode::RankDeficient, std::string(what) + " is singular");
    return qr;
}

}  // namespace

Covariance::Covariance(Eigen::MatrixXd sigma) : src_(std::move(sigma)) {
    const auto& m = std::get<Eigen::MatrixXd>(src_);
    if (m.rows() != m.cols())
        throw Error(ErrorCode::InvalidArgument, "covariance matrix must be square");
    if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "covariance has non-finite entries");
}

Index Covariance::dim() const {
    if (is_sample()) return std::get<const Dataset*>(src_)->p();
    return std::get<Eigen::MatrixXd>(src_).rows();
}

double Covariance::at(Index i, Index j) const {
    if (is_sample()) {
        const Dataset& d = *std::get<const Dataset*>(src_);
        return d.x().col(i).dot(d.x().col(j)) / static_cast<double>(d.n());
    }
    return std::get<Eigen::MatrixXd>(src_)(i, j);
}

Eigen::MatrixXd Covariance::block(const std::vector<Index>& rows,
                                  const std::vector<Index>& cols) const {
    if (is_sample()) {
        const Dataset& d = *std::get<const Dataset*>(src_);
        return columns(d.x(), rows).transpose() * columns(d.x(), cols) /
               static_cast<double>(d.n());
    }
    const auto& m = std::get<Eigen::MatrixXd>(src_);
    Eigen::MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out(static_cast<Index>(r), static_cast<Index>(c)) = m(rows[r], cols[c]);
    return out;
}

Eigen::MatrixXd conditional_block(const Covariance& cov, const std::vector<Index>& s,
                                  const std::vector<Index>& rows,
                                  const std::vector<Index>& cols) {
    Eigen::MatrixXd out = cov.block(rows, cols);
    if (s.empty()) return out;
    const auto qr = checked_qr(cov.block(s, s), "Sigma_ss");
    out.noalias() -= cov.block(rows, s) * qr.solve(cov.block(s, cols));
    return out;
}

FeatureScores gamma_profile(const Covariance& cov, const std::vector<Index>& s,
                            const Coefficients& beta) {
    const std::vector<Index> b = support_of(beta);
    FeatureScores out;
    out.index = complement(cov.dim(), s);
    out.value = Eigen::VectorXd::Zero(static_cast<Index>(out.index.size()));
    if (b.empty()) return out;
    Eigen::VectorXd bv(static_cast<Index>(b.size()));
    for (std::size_t k = 0; k < b.size(); ++k) bv(static_cast<Index>(k)) = beta.at(b[k]);
    out.value = conditional_block(cov, s, out.index, b) * bv;
    return out;
}

FeatureScores gamma_profile(const Dataset& d, const std::vector<Index>& s,
                            const Coefficients& beta) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d.n());
    for (auto [j, b] : beta.beta) mu += b * d.x().col(j);
    if (!s.empty()) {
        const Eigen::MatrixXd xs = columns(d.x(), s);
        const auto qr = checked_qr(xs, "X(s)");
        mu -= xs * qr.solve(mu);
    }
    FeatureScores out;
    out.index = complement(d.p(), s);
    out.value.resize(static_cast<Index>(out.index.size()));
    for (std::size_t k = 0; k < out.index.size(); ++k)
        out.value(static_cast<Index>(k)) = d.x().col(out.index[k]).dot(mu) / static_cast<double>(d.n());
    return out;
}

FeatureScores gamma_profile_pop(const Eigen::MatrixXd& sigma, const std::vector<Index>& s,
                                const Coefficients& beta) {
    return gamma_profile(Covariance(sigma), s, beta);
}

ConditionReport check_a1(const Covariance& cov, const std::vector<Index>& s,
                         const Coefficients& beta) {
    const std::vector<Index> s0 = support_of(beta);
    const std::set<Index> s0set(s0.begin(), s0.end());
    for (Index j : s)
        if (!s0set.count(j))
            throw Error(ErrorCode::InvalidArgument, "A1 needs s inside the causal set", j);
    if (s.size() >= s0.size())
        throw Error(ErrorCode::EmptyRemainder, "conditioning set already covers the causal set");

    const FeatureScores g = gamma_profile(cov, s, beta);
    double causal = 0.0, noncausal = 0.0;
    Index witness = -1;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double v = std::abs(g.value(static_cast<Index>(k)));
        if (s0set.count(g.index[k])) {
            causal = std::max(causal, v);
        } else if (v > noncausal) {
            noncausal = v;
            witness = g.index[k];
        }
    }
    ConditionReport r;
    r.name = "A1 (s=" + set_string(s) + ")";
    r.quantity = causal > 0.0 ? noncausal / causal : std::numeric_limits<double>::infinity();
    r.margin = 1.0 - r.quantity;
    if (witness >= 0 && r.margin <= kStrictMargin) r.witness = {witness};
    finish(r);
    return r;
}

ConeResult cone_condition(const Eigen::MatrixXd& gram, const std::vector<Index>& tie_set,
                          const std::vector<double>& signs) {
    const Index m = gram.rows();
    Eigen::VectorXd d = Eigen::VectorXd::Ones(m);
    for (Index i = 0; i < m && i < static_cast<Index>(signs.size()); ++i)
        d(i) = signs[static_cast<std::size_t>(i)] < 0 ? -1.0 : 1.0;
    const Eigen::MatrixXd g = d.asDiagonal() * gram * d.asDiagonal();

    ConeResult out;
    out.report.name = "A2 cone (|A|=" + std::to_string(m) + ")";
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
    qr.setThreshold(kRankThreshold);
    if (m == 0 || qr.rank() < m) {
        out.rank_deficient = true;
        out.report.holds = false;
        out.report.margin = -std::numeric_limits<double>::infinity();
        out.report.quantity = out.report.margin;
        out.report.note = "rank deficient";
        out.report.witness = tie_set;
        return out;
    }
    out.solution = qr.solve(Eigen::VectorXd::Ones(m));
    out.report.margin = out.solution.minCoeff();
    out.report.quantity = out.report.margin;
    for (Index i = 0; i < m; ++i)
        if (out.solution(i) <= kStrictMargin && i < static_cast<Index>(tie_set.size()))
            out.report.witness.push_back(tie_set[static_cast<std::size_t>(i)]);
    finish(out.report);

    out.row_sum_form = Eigen::VectorXd::Ones(m);
    if (m > 1) {
        for (Index i = 0; i < m; ++i) {
            std::vector<Index> rest;
            for (Index k = 0; k < m; ++k)
                if (k != i) rest.push_back(k);
            Eigen::MatrixXd sub(m - 1, m - 1);
            Eigen::VectorXd cross(m - 1);
            for (Index a = 0; a < m - 1; ++a) {
                cross(a) = g(rest[static_cast<std::size_t>(a)], i);
                for (Index b = 0; b < m - 1; ++b)
                    sub(a, b) = g(rest[static_cast<std::size_t>(a)], rest[static_cast<std::size_t>(b)]);
            }
            out.row_sum_form(i) =
                1.0 - cross.dot(sub.ldlt().solve(Eigen::VectorXd::Ones(m - 1)));
        }
    }
    // Both forms share sign member by member; only compare away from zero.
    const double scale = std::max(1.0, out.solution.cwiseAbs().maxCoeff());
    for (Index i = 0; i < m; ++i) {
        const double a = out.solution(i), b = out.row_sum_form(i);
        if (std::abs(a) > 1e-8 * scale && std::abs(b) > 1e-8 && (a > 0) != (b > 0))
            out.forms_agree = false;
    }
    if (!out.forms_agree) out.report.note = "row-sum form disagrees";
    return out;
}

ConditionReport check_cone(const Covariance& cov, const std::vector<Index>& s,
                           const std::vector<Index>& tie_set, const std::vector<double>& signs) {
    if (tie_set.empty()) throw Error(ErrorCode::InvalidArgument, "empty tie set");
    const Eigen::MatrixXd g = conditional_block(cov, s, tie_set, tie_set);
    ConeResult res = cone_condition(g, tie_set, signs);
    if (res.rank_deficient)
        throw Error(ErrorCode::RankDeficient, "conditional Gram of the tie set is singular");
    res.report.name = "A2 cone (s=" + set_string(s) + ", A=" + set_string(tie_set) + ")";
    return res.report;
}

ConditionReport check_erc(const Covariance& cov, const std::vector<Index>& s0,
                          const std::vector<Index>& s) {
    const std::set<Index> sset(s.begin(), s.end());
    std::vector<Index> remainder;
    for (Index j : s0)
        if (!sset.count(j)) remainder.push_back(j);
    if (remainder.empty())
        throw Error(ErrorCode::EmptyRemainder, "conditioning set already covers the causal set");

    const std::vector<Index> rows = complement(cov.dim(), s0, s);
    ConditionReport r;
    r.name = "ERC (s=" + set_string(s) + ")";
    if (rows.empty()) {
        r.margin = 1.0;
        finish(r);
        return r;
    }
    const auto qr = checked_qr(conditional_block(cov, s, remainder, remainder), "Sigma_{s- s-|s}");
    const Eigen::MatrixXd cross = conditional_block(cov, s, rows, remainder);
    // Rows of cross * G^{-1} = (G^{-1} cross^T)^T since G is symmetric.
    const Eigen::MatrixXd coef = qr.solve(cross.transpose());
    Index arg = 0;
    const double worst = coef.cwiseAbs().colwise().sum().maxCoeff(&arg);
    r.quantity = worst;
    r.margin = 1.0 - worst;
    if (r.margin <= kStrictMargin) r.witness = {rows[static_cast<std::size_t>(arg)]};
    finish(r);
    return r;
}

ConditionReport check_irrepresentable(const Covariance& cov, const Coefficients& beta) {
    const std::vector<Index> s0 = support_of(beta);
    if (s0.empty()) throw Error(ErrorCode::InvalidArgument, "beta has empty support");
    ConditionReport r;
    r.name = "irrepresentable";
    const std::vector<Index> rows = complement(cov.dim(), s0);
    if (rows.empty()) {
        r.margin = 1.0;
        finish(r);
        return r;
    }
    Eigen::VectorXd sign(static_cast<Index>(s0.size()));
    for (std::size_t k = 0; k < s0.size(); ++k) sign(static_cast<Index>(k)) = beta.at(s0[k]) > 0 ? 1.0 : -1.0;
    const auto qr = checked_qr(cov.block(s0, s0), "Sigma_{s0 s0}");
    const Eigen::VectorXd v = cov.block(rows, s0) * qr.solve(sign);
    Index arg = 0;
    r.quantity = v.cwiseAbs().maxCoeff(&arg);
    r.margin = 1.0 - r.quantity;
    if (r.margin <= kStrictMargin) r.witness = {rows[static_cast<std::size_t>(arg)]};
    finish(r);
    return r;
}

ConditionReport check_mip(const Covariance& cov, Index k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "MIP needs k >= 1");
    const Index p = cov.dim();
    std::vector<Index> all(static_cast<std::size_t>(p));
    std::iota(all.begin(), all.end(), Index{0});
    Eigen::VectorXd diag(p);
    for (Index j = 0; j < p; ++j) diag(j) = std::sqrt(cov.at(j, j));

    double worst = 0.0;
    Index wi = -1, wj = -1;
    constexpr Index kBlock = 256;
    for (Index start = 0; start < p; start += kBlock) {
        const Index len = std::min(kBlock, p - start);
        std::vector<Index> rows(all.begin() + start, all.begin() + start + len);
        std::vector<Index> cols(all.begin() + start, all.end());
        const Eigen::MatrixXd b = cov.block(rows, cols);
        for (Index r = 0; r < len; ++r)
            for (Index c = r + 1; c < b.cols(); ++c) {
                const Index i = start + r, j = start + c;
                const double corr = std::abs(b(r, c)) / (diag(i) * diag(j));
                if (corr > worst) {
                    worst = corr;
                    wi = i;
                    wj = j;
                }
            }
    }
    ConditionReport r;
    r.name = "MIP (k=" + std::to_string(k) + ")";
    r.quantity = worst;
    r.margin = 1.0 / static_cast<double>(2 * k - 1) - worst;
    if (r.margin <= kStrictMargin && wi >= 0) r.witness = {wi, wj};
    finish(r);
    return r;
}

SpecialCaseOne special_case_one_closed_form(double rho, Index s_size) {
    SpecialCaseOne c;
    c.rho = rho;
    c.s_size = s_size;
    const double s = static_cast<double>(s_size);
    const double denom = 1.0 + (s - 1.0) * rho;
    c.a = (1.0 - rho) * (rho * s + 1.0) / denom;
    c.b = rho * (1.0 - rho) / denom;
    return c;
}

namespace {

// Runs the noiseless selection path (argmax |gamma| with tie sets) and checks
// A1 and the cone condition at every step while the model stays causal.
void condition_path(const Covariance& cov, const Coefficients& beta, ConditionSuite& suite) {
    const std::vector<Index> s0 = support_of(beta);
    const std::set<Index> s0set(s0.begin(), s0.end());
    std::vector<Index> s;
    while (s.size() < s0.size()) {
        suite.reports.push_back(check_a1(cov, s, beta));
        const FeatureScores g = gamma_profile(cov, s, beta);
        const double top = g.value.cwiseAbs().maxCoeff();
        std::vector<Index> tie;
        std::vector<double> signs;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double v = g.value(static_cast<Index>(k));
            if (std::abs(v) >= (1.0 - 1e-10) * top) {
                tie.push_back(g.index[k]);
                signs.push_back(v < 0 ? -1.0 : 1.0);
            }
        }
        suite.reports.push_back(check_cone(cov, s, tie, signs));
        bool causal = true;
        for (Index j : tie) causal = causal && s0set.count(j);
        if (!causal) {
            suite.reports.back().note += " path left the causal set";
            break;
        }
        s.insert(s.end(), tie.begin(), tie.end());
    }
}

}  // namespace

ConditionSuite evaluate_special_case(int which, Index p0, double rho, Index p) {
    if (p0 < 1) throw Error(ErrorCode::InvalidArgument, "p0 must be positive");
    if (p == 0) p = 5 * p0;
    if (p <= p0) throw Error(ErrorCode::InvalidArgument, "p must exceed p0");

    ConditionSuite suite;
    Coefficients beta;
    Eigen::MatrixXd sigma;
    if (which == 1) {
        if (!(rho > 0.0 && rho < 1.0))
            throw Error(ErrorCode::InvalidRho, "special case I needs 0 < rho < 1");
        sigma = constant_correlation(p, rho);
        for (Index j = 0; j < p0; ++j) beta.beta[j] = std::sqrt(static_cast<double>(j + 1));
        std::ostringstream os;
        os << "special case I: constant correlation rho=" << rho << ", p0=" << p0 << ", p=" << p;
        suite.title = os.str();
    } else if (which == 2) {
        Eigen::VectorXd b(p0);
        for (Index j = 0; j < p0; ++j) b(j) = static_cast<double>(p0 - j) / static_cast<double>(p0);
        sigma = special_case_two_covariance(p, b);
        for (Index j = 0; j < p0; ++j) beta.beta[j] = b(j);
        std::ostringstream os;
        os << "special case II: orthonormal causal block, non-causal rows sign(beta)/p0, p0=" << p0
           << ", p=" << p;
        suite.title = os.str();
    } else {
        throw Error(ErrorCode::InvalidArgument, "special case must be 1 or 2");
    }

    const Covariance cov(sigma);
    condition_path(cov, beta, suite);

    if (which == 1) {
        // Whole causal block as a tie set: closed form 1/(a + (nu-1) b).
        std::vector<Index> tie(static_cast<std::size_t>(p0));
        std::iota(tie.begin(), tie.end(), Index{0});
        ConditionReport r = check_cone(cov, {}, tie);
        const Eigen::MatrixXd g = conditional_block(cov, {}, tie, tie);
        const Eigen::VectorXd sol = g.ldlt().solve(Eigen::VectorXd::Ones(p0));
        const double expected = special_case_one_closed_form(rho, 0).cone_value(p0);
        std::ostringstream os;
        os << "closed form 1/(a+(nu-1)b)=" << expected
           << " max deviation=" << (sol.array() - expected).abs().maxCoeff();
        r.note = os.str();
        suite.reports.push_back(r);
    }
    suite.reports.push_back(check_irrepresentable(cov, beta));
    suite.reports.push_back(check_erc(cov, support_of(beta)));
    suite.reports.push_back(check_mip(cov, p0));
    return suite;
}

ConditionSuite evaluate_dataset_conditions(const Dataset& d, const Coefficients& beta) {
    ConditionSuite suite;
    const std::vector<Index> s0 = support_of(beta);
    suite.title = "dataset n=" + std::to_string(d.n()) + " p=" + std::to_string(d.p()) +
                  " support=" + set_string(s0);
    const Covariance cov(d);
    condition_path(cov, beta, suite);
    suite.reports.push_back(check_irrepresentable(cov, beta));
    suite.reports.push_back(check_erc(cov, s0));
    suite.reports.push_back(check_mip(cov, static_cast<Index>(s0.size())));
    return suite;
}

}  // namespace seqlasso
