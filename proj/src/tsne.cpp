#include "coda/tsne.hpp"

#include <cmath>
#include <limits>

#include "coda/rng.hpp"

namespace coda {

namespace {

constexpr double kDenominatorFloor = 1e-12;

/// Conditional row probabilities for precision beta, returning the
/// perplexity in nats space; log-sum-exp for stability.
double row_perplexity(const VectorXd& d2, Eigen::Index self, double beta, VectorXd& prob) {
    const auto n = d2.size();
    double max_log = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == self) continue;
        max_log = std::max(max_log, -beta * d2[j]);
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == self) {
            prob[j] = 0.0;
            continue;
        }
        prob[j] = std::exp(-beta * d2[j] - max_log);
        sum += prob[j];
    }
    double entropy = 0.0;  // nats
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == self) continue;
        prob[j] /= sum;
        if (prob[j] > 0.0) entropy -= prob[j] * std::log(prob[j]);
    }
    return std::exp(entropy);
}

}  // namespace

AffinityMatrix affinities(const MatrixXd& dist, double perplexity) {
    const auto n = dist.rows();
    if (dist.rows() != dist.cols()) throw DimensionError("distance matrix must be square");
    if (!(perplexity > 1.0) || perplexity >= static_cast<double>(n)) {
        throw DimensionError("perplexity must lie in (1, n)");
    }

    MatrixXd cond = MatrixXd::Zero(n, n);
    AffinityMatrix out;
    out.perplexity = perplexity;
    out.sigmas.resize(n);

    const MatrixXd d2 = dist.array().square().matrix();
    VectorXd prob(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
        double perp = row_perplexity(d2.row(i).transpose(), i, beta, prob);
        // bracket, then bisect
        for (int step = 0; step < 200 && std::abs(perp - perplexity) > 1e-5; ++step) {
            if (perp > perplexity) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = lo == 0.0 ? beta / 2.0 : 0.5 * (beta + lo);
            }
            if (!(beta > 0.0) || !std::isfinite(beta)) {
                throw PerplexityUnreachableError(static_cast<std::size_t>(i),
                                                 "bisection left the positive range");
            }
            perp = row_perplexity(d2.row(i).transpose(), i, beta, prob);
        }
        if (std::abs(perp - perplexity) > 1e-5) {
            throw PerplexityUnreachableError(static_cast<std::size_t>(i),
                                             "no bandwidth reaches the target perplexity");
        }
        cond.row(i) = prob.transpose();
        out.sigmas[i] = std::sqrt(0.5 / beta);
    }

    out.p = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
    out.p.diagonal().setZero();
    return out;
}

namespace {

/// Student-t kernel weights w_ij = (1+||y_i-y_j||^2)^-1 and their sum.
double q_weights(const MatrixXd& y, MatrixXd& w) {
    const auto n = y.rows();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
            w(i, j) = w(j, i) = v;
            sum += 2.0 * v;
        }
    }
    return sum;
}

}  // namespace

double kl_divergence(const MatrixXd& p, const MatrixXd& y) {
    const auto n = p.rows();
    MatrixXd w(n, n);
    double sum = q_weights(y, w);
    sum = std::max(sum, kDenominatorFloor);
    double kl = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            const double q = std::max(w(i, j) / sum, 1e-300);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return kl;
}

MatrixXd tsne_gradient(const MatrixXd& p, const MatrixXd& y) {
    const auto n = y.rows();
    MatrixXd w(n, n);
    double sum = q_weights(y, w);
    sum = std::max(sum, kDenominatorFloor);
    MatrixXd grad = MatrixXd::Zero(n, y.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double q = w(i, j) / sum;
            const double mult = 4.0 * (p(i, j) - q) * w(i, j);
            grad.row(i) += mult * (y.row(i) - y.row(j));
        }
    }
    return grad;
}

Embedding tsne_embed(const AffinityMatrix& p, const TsneOptions& options) {
    const auto n = p.p.rows();
    Embedding emb;
    emb.options = options;
    emb.y.resize(n, 2);
    Rng rng(options.seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        emb.y(i, 0) = rng.normal(0.0, 1e-4);
        emb.y(i, 1) = rng.normal(0.0, 1e-4);
    }

    MatrixXd velocity = MatrixXd::Zero(n, 2);
    MatrixXd w(n, n);

    for (std::size_t it = 0; it < options.iterations; ++it) {
        const bool exaggerate = it < options.exaggeration_iters;
        const double ex = exaggerate ? options.early_exaggeration : 1.0;
        const double momentum =
            it < options.momentum_switch ? options.momentum_initial : options.momentum_final;

        double sum = q_weights(emb.y, w);
        if (sum < kDenominatorFloor) {
            sum = kDenominatorFloor;
            ++emb.denominator_floors;
        }
        // record the normalization error of q over the off-diagonal
        emb.max_qsum_error = std::max(emb.max_qsum_error, std::abs(w.sum() / sum - 1.0));

        MatrixXd grad = MatrixXd::Zero(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = w(i, j) / sum;
                const double mult = 4.0 * (ex * p.p(i, j) - q) * w(i, j);
                grad.row(i) += mult * (emb.y.row(i) - emb.y.row(j));
            }
        }

        velocity = momentum * velocity - options.learning_rate * grad;
        emb.y += velocity;

        if ((it + 1) % options.trace_interval == 0 || it + 1 == options.iterations) {
            emb.kl_trace.push_back(kl_divergence(p.p, emb.y));
            emb.trace_iters.push_back(it + 1);
        }
    }
    emb.kl = kl_divergence(p.p, emb.y);
    return emb;
}

}  // namespace coda
