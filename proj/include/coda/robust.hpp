#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coda/types.hpp"

namespace coda {

enum class SearchMode {
    Auto,        // exhaustive when C(n, h) <= exhaustive_limit, else heuristic
    Heuristic,   // random elemental starts + concentration steps
    Exhaustive,  // enumerate every h-subset (small n only)
};

struct McdOptions {
    std::optional<std::size_t> h;     // default ceil(0.75 * n)
    std::uint64_t seed = 20221;
    SearchMode mode = SearchMode::Auto;
    std::size_t n_starts = 500;       // elemental starts in heuristic mode
    std::size_t n_initial_csteps = 2; // C-steps per start before shortlisting
    std::size_t n_best = 10;          // candidates refined to convergence
    double exhaustive_limit = 50000.0;
};

/// MCD location/scatter estimate over the best h-subset found.
struct RobustEstimate {
    VectorXd location;
    MatrixXd covariance;          // subset covariance scaled by consistency_factor
    std::vector<std::size_t> subset;
    std::size_t h = 0;
    double consistency_factor = 1.0;
    double determinant = 0.0;     // det of the unscaled subset covariance
    bool exhaustive = false;
    // Determinant after each concentration step of the winning candidate;
    // must be non-increasing.
    std::vector<double> cstep_determinants;
};

/// FAST-MCD (random elemental starts, concentration steps, shortlist
/// refinement). For p = 1 the optimal subset is a contiguous window of the
/// sorted sample, which is located exactly. Deterministic for a fixed seed.
RobustEstimate fast_mcd(const MatrixXd& data, const McdOptions& options = {});

struct LtsOptions {
    double trim_fraction = 0.25;  // retained h = floor(n * (1 - trim))
    std::uint64_t seed = 20221;
    SearchMode mode = SearchMode::Auto;
    std::size_t n_starts = 100;
    double exhaustive_limit = 50000.0;
};

struct LtsFit {
    VectorXd coefficients;  // intercept first
    std::vector<std::size_t> trimmed_indices;  // rows retained by the fit
    double trim_fraction = 0.0;
    double objective = 0.0;  // sum of the h smallest squared residuals
};

/// Least trimmed squares regression of y on X (intercept added internally).
LtsFit lts_regression(const MatrixXd& X, const VectorXd& y, const LtsOptions& options = {});

/// Robust variation matrix: each entry is the consistency-corrected MCD
/// variance of the pairwise log-ratio series.
VariationMatrix variation_matrix_robust(const CompositionTable& t, std::uint64_t seed = 20221);

/// Univariate MCD scale (exact sorted-window search); exposed for reuse.
double mcd_scale_1d(const VectorXd& x, std::size_t h);

}  // namespace coda
