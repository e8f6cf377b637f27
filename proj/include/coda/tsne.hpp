#pragma once

#include <cstdint>
#include <vector>

#include "coda/types.hpp"

namespace coda {

/// Symmetrized joint input probabilities with the calibrated bandwidths.
struct AffinityMatrix {
    MatrixXd p;               // n x n, symmetric, zero diagonal, sums to 1
    double perplexity = 0.0;
    VectorXd sigmas;          // per-point Gaussian bandwidths
};

/// Per-point bandwidths found by bisection so every conditional
/// distribution hits the target perplexity, then P = (P_c + P_c^T) / (2n).
AffinityMatrix affinities(const MatrixXd& dist, double perplexity);

struct TsneOptions {
    double learning_rate = 200.0;
    std::size_t iterations = 1000;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iters = 250;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    std::size_t momentum_switch = 250;
    std::size_t trace_interval = 50;
    std::uint64_t seed = 20221;
};

struct Embedding {
    MatrixXd y;  // n x 2
    double kl = 0.0;
    std::vector<double> kl_trace;        // KL against the unexaggerated P
    std::vector<std::size_t> trace_iters;
    double max_qsum_error = 0.0;         // max |sum q - 1| observed
    std::size_t denominator_floors = 0;  // underflow guards triggered
    TsneOptions options;
};

/// Gradient descent on the KL divergence with the heavy-tailed q kernel.
Embedding tsne_embed(const AffinityMatrix& p, const TsneOptions& options = {});

/// KL divergence C = sum P ln(P/q) over P > 0 for a given map.
double kl_divergence(const MatrixXd& p, const MatrixXd& y);

/// Analytic KL gradient, 4 sum_j (P_ij - q_ij)(y_i - y_j)(1+||y_i-y_j||^2)^-1.
MatrixXd tsne_gradient(const MatrixXd& p, const MatrixXd& y);

}  // namespace coda
