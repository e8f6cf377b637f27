#include "coda/robust.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coda/rng.hpp"
#include "coda/stats.hpp"

namespace coda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r *= static_cast<double>(n - k + i) / static_cast<double>(i);
        if (r > 1e18) return r;
    }
    return r;
}

struct SubsetStats {
    VectorXd mean;
    MatrixXd cov;       // divisor h-1
    double det = kInf;  // +inf when singular
    Eigen::LLT<MatrixXd> llt;
    bool ok = false;
};

SubsetStats subset_stats(const MatrixXd& data, const std::vector<std::size_t>& idx) {
    SubsetStats s;
    const auto p = data.cols();
    const auto h = static_cast<Eigen::Index>(idx.size());
    s.mean = VectorXd::Zero(p);
    for (std::size_t i : idx) s.mean += data.row(static_cast<Eigen::Index>(i)).transpose();
    s.mean /= static_cast<double>(h);
    s.cov = MatrixXd::Zero(p, p);
    for (std::size_t i : idx) {
        const VectorXd d = data.row(static_cast<Eigen::Index>(i)).transpose() - s.mean;
        s.cov += d * d.transpose();
    }
    s.cov /= static_cast<double>(h - 1);
    s.llt.compute(s.cov);
    if (s.llt.info() == Eigen::Success) {
        double det = 1.0;
        const auto& L = s.llt.matrixLLT();
        for (Eigen::Index i = 0; i < p; ++i) det *= L(i, i) * L(i, i);
        if (det > 0.0 && std::isfinite(det)) {
            s.det = det;
            s.ok = true;
        }
    }
    return s;
}

/// Select the h rows with smallest Mahalanobis distance; ties break by index.
std::vector<std::size_t> smallest_h(const MatrixXd& data, const SubsetStats& s, std::size_t h) {
    const auto n = static_cast<std::size_t>(data.rows());
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const VectorXd diff = data.row(static_cast<Eigen::Index>(i)).transpose() - s.mean;
        d[i] = {diff.dot(s.llt.solve(diff)), i};
    }
    std::sort(d.begin(), d.end());
    std::vector<std::size_t> idx(h);
    for (std::size_t i = 0; i < h; ++i) idx[i] = d[i].second;
    std::sort(idx.begin(), idx.end());
    return idx;
}

struct Candidate {
    std::vector<std::size_t> subset;
    SubsetStats stats;
    std::vector<double> det_trace;
};

/// Run concentration steps until the subset stabilizes. Each step cannot
/// increase the covariance determinant.
void concentrate(const MatrixXd& data, std::size_t h, Candidate& c, std::size_t max_steps) {
    for (std::size_t it = 0; it < max_steps; ++it) {
        if (!c.stats.ok) return;
        std::vector<std::size_t> next = smallest_h(data, c.stats, h);
        if (next == c.subset) return;
        SubsetStats ns = subset_stats(data, next);
        if (!ns.ok) {
            c.subset = next;
            c.stats = ns;
            return;
        }
        const double prev = c.stats.det;
        c.subset = std::move(next);
        c.stats = std::move(ns);
        c.det_trace.push_back(c.stats.det);
        if (std::abs(prev - c.stats.det) <= 1e-12 * std::max(1.0, prev)) return;
    }
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    std::size_t i = k;
    while (i > 0) {
        --i;
        if (idx[i] != i + n - k) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

RobustEstimate finish_estimate(const MatrixXd& data, Candidate best, bool exhaustive) {
    const auto n = static_cast<std::size_t>(data.rows());
    const auto p = static_cast<std::size_t>(data.cols());
    RobustEstimate est;
    est.h = best.subset.size();
    est.subset = best.subset;
    est.location = best.stats.mean;
    est.consistency_factor = mcd_consistency_factor(est.h, n, p);
    est.covariance = est.consistency_factor * best.stats.cov;
    est.determinant = best.stats.det;
    est.exhaustive = exhaustive;
    est.cstep_determinants = std::move(best.det_trace);
    return est;
}

}  // namespace

double mcd_scale_1d(const VectorXd& x, std::size_t h) {
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<double> v(x.data(), x.data() + n);
    std::sort(v.begin(), v.end());
    // prefix sums for O(1) window variance
    std::vector<double> s(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s[i + 1] = s[i] + v[i];
        s2[i + 1] = s2[i] + v[i] * v[i];
    }
    double best = kInf;
    for (std::size_t i = 0; i + h <= n; ++i) {
        const double sum = s[i + h] - s[i];
        const double sumsq = s2[i + h] - s2[i];
        const double hv = static_cast<double>(h);
        double var = (sumsq - sum * sum / hv) / (hv - 1.0);
        if (var < 0.0) var = 0.0;  // cancellation guard
        best = std::min(best, var);
    }
    return best;
}

RobustEstimate fast_mcd(const MatrixXd& data, const McdOptions& options) {
    const auto n = static_cast<std::size_t>(data.rows());
    const auto p = static_cast<std::size_t>(data.cols());
    if (n <= p) throw DimensionError("fast_mcd needs n > p");
    const std::size_t h_lo = (n + p + 1) / 2;
    const std::size_t h =
        options.h.value_or(static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(n))));
    if (h < h_lo || h > n) {
        throw DimensionError("fast_mcd: h must lie in [(n+p+1)/2, n]");
    }

    if (h == n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        Candidate c{all, subset_stats(data, all), {}};
        if (!c.stats.ok) throw SingularSubsetError("full-sample covariance is singular");
        c.det_trace.push_back(c.stats.det);
        return finish_estimate(data, std::move(c), true);
    }

    // Univariate MCD: the optimal subset is a contiguous window of the
    // sorted sample, so locate it by direct scan.
    if (p == 1) {
        std::vector<std::pair<double, std::size_t>> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = {data(static_cast<Eigen::Index>(i), 0), i};
        std::sort(v.begin(), v.end());
        double best = kInf;
        std::size_t best_start = 0;
        for (std::size_t i = 0; i + h <= n; ++i) {
            double mean = 0.0;
            for (std::size_t j = i; j < i + h; ++j) mean += v[j].first;
            mean /= static_cast<double>(h);
            double var = 0.0;
            for (std::size_t j = i; j < i + h; ++j) {
                var += (v[j].first - mean) * (v[j].first - mean);
            }
            var /= static_cast<double>(h - 1);
            if (var < best) {
                best = var;
                best_start = i;
            }
        }
        std::vector<std::size_t> idx;
        for (std::size_t j = best_start; j < best_start + h; ++j) idx.push_back(v[j].second);
        std::sort(idx.begin(), idx.end());
        Candidate c{idx, subset_stats(data, idx), {}};
        c.det_trace.push_back(c.stats.det);
        return finish_estimate(data, std::move(c), true);
    }

    const bool exhaustive = options.mode == SearchMode::Exhaustive ||
                            (options.mode == SearchMode::Auto &&
                             binomial(n, h) <= options.exhaustive_limit);

    if (exhaustive) {
        std::vector<std::size_t> idx(h);
        std::iota(idx.begin(), idx.end(), 0);
        Candidate best;
        best.stats.det = kInf;
        do {
            SubsetStats s = subset_stats(data, idx);
            if (s.ok && s.det < best.stats.det) {
                best.subset = idx;
                best.stats = std::move(s);
            }
        } while (next_combination(idx, n));
        if (!best.stats.ok) throw SingularSubsetError("every h-subset covariance is singular");
        best.det_trace.push_back(best.stats.det);
        return finish_estimate(data, std::move(best), true);
    }

    Rng rng(options.seed);
    std::vector<Candidate> candidates;
    candidates.reserve(options.n_starts);
    for (std::size_t s = 0; s < options.n_starts; ++s) {
        // Elemental start of p+1 points, extended while singular.
        std::vector<std::size_t> order = rng.sample_indices(n, n);
        std::size_t take = p + 1;
        SubsetStats stats;
        std::vector<std::size_t> sub;
        while (take <= n) {
            sub.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
            std::sort(sub.begin(), sub.end());
            stats = subset_stats(data, sub);
            if (stats.ok) break;
            ++take;
        }
        if (!stats.ok) continue;
        // Move to an h-subset right away, then apply the initial C-steps.
        Candidate c;
        c.subset = smallest_h(data, stats, h);
        c.stats = subset_stats(data, c.subset);
        if (!c.stats.ok) continue;
        c.det_trace.push_back(c.stats.det);
        concentrate(data, h, c, options.n_initial_csteps);
        if (c.stats.ok) candidates.push_back(std::move(c));
    }
    if (candidates.empty()) throw SingularSubsetError("no nonsingular start found");

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.stats.det < b.stats.det; });
    const std::size_t keep = std::min(options.n_best, candidates.size());
    Candidate best;
    best.stats.det = kInf;
    for (std::size_t i = 0; i < keep; ++i) {
        Candidate c = candidates[i];
        concentrate(data, h, c, 100);
        if (c.stats.ok && c.stats.det < best.stats.det) best = std::move(c);
    }
    if (!best.stats.ok) throw SingularSubsetError("refinement produced no nonsingular subset");
    return finish_estimate(data, std::move(best), false);
}

namespace {

struct OlsResult {
    VectorXd beta;
    bool ok = false;
};

OlsResult ols(const MatrixXd& design, const VectorXd& y, const std::vector<std::size_t>& rows) {
    const auto q = design.cols();
    MatrixXd A(static_cast<Eigen::Index>(rows.size()), q);
    VectorXd b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        A.row(static_cast<Eigen::Index>(i)) = design.row(static_cast<Eigen::Index>(rows[i]));
        b[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(rows[i])];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    OlsResult r;
    if (qr.rank() < q) return r;
    r.beta = qr.solve(b);
    r.ok = true;
    return r;
}

/// Sum of the h smallest squared residuals and the retained row set.
std::pair<double, std::vector<std::size_t>> trimmed_objective(const MatrixXd& design,
                                                              const VectorXd& y,
                                                              const VectorXd& beta,
                                                              std::size_t h) {
    const auto n = static_cast<std::size_t>(design.rows());
    const VectorXd r = y - design * beta;
    std::vector<std::pair<double, std::size_t>> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = r[static_cast<Eigen::Index>(i)];
        sq[i] = {ri * ri, i};
    }
    std::sort(sq.begin(), sq.end());
    double obj = 0.0;
    std::vector<std::size_t> keep(h);
    for (std::size_t i = 0; i < h; ++i) {
        obj += sq[i].first;
        keep[i] = sq[i].second;
    }
    std::sort(keep.begin(), keep.end());
    return {obj, keep};
}

}  // namespace

LtsFit lts_regression(const MatrixXd& X, const VectorXd& y, const LtsOptions& options) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto q = static_cast<std::size_t>(X.cols());
    if (static_cast<std::size_t>(y.size()) != n) throw DimensionError("lts: X and y disagree on n");
    if (n < q + 2) throw DimensionError("lts needs n >= q + 2");
    if (!(options.trim_fraction > 0.0) || options.trim_fraction > 0.5) {
        throw DimensionError("lts trim_fraction must lie in (0, 0.5]");
    }
    const auto h = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * (1.0 - options.trim_fraction)));
    if (h < q + 1) throw DimensionError("lts retained count too small for the design");

    MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q) + 1);
    design.col(0).setOnes();
    design.rightCols(static_cast<Eigen::Index>(q)) = X;
    const auto ncoef = static_cast<std::size_t>(design.cols());

    const bool exhaustive = options.mode == SearchMode::Exhaustive ||
                            (options.mode == SearchMode::Auto &&
                             binomial(n, h) <= options.exhaustive_limit);

    LtsFit best;
    best.objective = kInf;
    best.trim_fraction = options.trim_fraction;

    auto consider = [&](const VectorXd& beta) {
        auto [obj, keep] = trimmed_objective(design, y, beta, h);
        // Refit on the retained set (one extra concentration refinement).
        OlsResult refit = ols(design, y, keep);
        if (refit.ok) {
            auto [obj2, keep2] = trimmed_objective(design, y, refit.beta, h);
            if (obj2 < obj) {
                obj = obj2;
                keep = std::move(keep2);
                if (obj < best.objective) {
                    best.objective = obj;
                    best.coefficients = refit.beta;
                    best.trimmed_indices = keep;
                }
                return;
            }
        }
        if (obj < best.objective) {
            best.objective = obj;
            best.coefficients = beta;
            best.trimmed_indices = keep;
        }
    };

    if (exhaustive) {
        std::vector<std::size_t> idx(h);
        std::iota(idx.begin(), idx.end(), 0);
        do {
            OlsResult r = ols(design, y, idx);
            if (r.ok) consider(r.beta);
        } while (next_combination(idx, n));
    } else {
        Rng rng(options.seed);
        for (std::size_t s = 0; s < options.n_starts; ++s) {
            std::vector<std::size_t> order = rng.sample_indices(n, n);
            std::size_t take = ncoef;
            OlsResult r;
            while (take <= n) {
                std::vector<std::size_t> sub(order.begin(),
                                             order.begin() + static_cast<std::ptrdiff_t>(take));
                r = ols(design, y, sub);
                if (r.ok) break;
                ++take;
            }
            if (!r.ok) continue;
            // Concentration steps to a fixed point.
            VectorXd beta = r.beta;
            double prev = kInf;
            for (int it = 0; it < 100; ++it) {
                auto [obj, keep] = trimmed_objective(design, y, beta, h);
                OlsResult refit = ols(design, y, keep);
                if (!refit.ok) break;
                beta = refit.beta;
                if (std::abs(prev - obj) <= 1e-12 * std::max(1.0, prev)) break;
                prev = obj;
            }
            consider(beta);
        }
    }

    if (!std::isfinite(best.objective)) {
        throw DegenerateDesignError("lts: retained predictor block is rank-deficient");
    }
    return best;
}

VariationMatrix variation_matrix_robust(const CompositionTable& t, std::uint64_t seed) {
    validate(t);
    (void)seed;  // the univariate search is exact; kept for interface stability
    const auto n = t.rows();
    if (n <= 2) throw InsufficientRowsError("robust variation matrix needs n > 2");
    const auto D = static_cast<Eigen::Index>(t.dim());
    const auto h = static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(n)));
    const double c = mcd_consistency_factor(h, n, 1);
    const MatrixXd logs = t.values.array().log().matrix();
    VariationMatrix out;
    out.method = VariationMethod::Robust;
    out.component_labels = t.component_labels;
    out.t = MatrixXd::Zero(D, D);
    for (Eigen::Index j = 0; j < D; ++j) {
        for (Eigen::Index k = j + 1; k < D; ++k) {
            const VectorXd z = logs.col(j) - logs.col(k);
            out.t(j, k) = out.t(k, j) = c * mcd_scale_1d(z, h);
        }
    }
    return out;
}

}  // namespace coda
