#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coda/types.hpp"

namespace coda {

/// Per-entity cluster labels in 1..K.
struct ClusterAssignment {
    std::vector<int> labels;
    std::size_t k = 0;
    std::string method;
    double objective = 0.0;          // WSS (k-means) or log-likelihood (GMM)
    std::vector<double> trace;       // per-iteration objective of the winning run
    std::size_t empty_cluster_repairs = 0;
};

struct KmeansOptions {
    std::size_t restarts = 50;
    std::uint64_t seed = 20221;
    std::size_t max_iterations = 300;
};

/// Lloyd's algorithm from k-means++ starts, best of `restarts` by WSS.
/// Exact distance ties resolve to the lowest cluster index.
ClusterAssignment kmeans(const MatrixXd& coords, std::size_t k, const KmeansOptions& options = {});

/// Mean silhouette coefficient; `labels` are 1-based. Singletons score 0.
double mean_silhouette(const MatrixXd& dist, const std::vector<int>& labels);
std::vector<double> silhouette_values(const MatrixXd& dist, const std::vector<int>& labels);

struct DiagnosticsEntry {
    std::size_t k;
    double wss;
    double silhouette;
};

struct DiagnosticsCurve {
    std::vector<DiagnosticsEntry> entries;
};

/// Elbow/silhouette curve over a K range (inclusive).
DiagnosticsCurve diagnostics(const MatrixXd& coords, std::size_t k_min, std::size_t k_max,
                             const KmeansOptions& options = {});

/// Binary merge tree, scipy convention: ids 0..n-1 are leaves, id n+k is the
/// cluster created by merges[k]. Heights are non-decreasing in merge order.
struct Merge {
    std::size_t left;
    std::size_t right;
    double height;
    std::size_t size;
};

struct Dendrogram {
    std::vector<Merge> merges;
    std::vector<std::string> leaf_labels;
    std::string method;

    std::size_t leaves() const { return merges.size() + 1; }
    /// Labels in 1..K from cutting the tree into K clusters.
    std::vector<int> cut(std::size_t k) const;
};

/// Divisive analysis clustering (Macnaughton-Smith splinter rule); heights
/// are cluster diameters.
Dendrogram divisive_hierarchical(const MatrixXd& dist, const std::vector<std::string>& labels = {});

/// Agglomerative Ward linkage on a variation matrix, treating its entries as
/// squared dissimilarities (no square root is taken; heights stay on the
/// variance scale).
Dendrogram qmode_ward(const VariationMatrix& varmat);

enum class GmmCovarianceModel { Full, Diagonal };

struct GmmModel {
    ClusterAssignment assignment;
    std::vector<double> weights;
    std::vector<VectorXd> means;
    std::vector<MatrixXd> covariances;
    double log_likelihood = 0.0;
    double bic = 0.0;
    GmmCovarianceModel model = GmmCovarianceModel::Full;
    std::size_t regularizations = 0;  // covariance-collapse ridge events
};

struct GmmOptions {
    std::uint64_t seed = 20221;
    std::size_t max_iterations = 500;
    double tolerance = 1e-8;
    bool allow_diagonal_fallback = true;
};

/// EM for a Gaussian mixture on the given coordinates. Full covariances by
/// default; falls back to diagonal when n < 2 * dim * k. Labels come from
/// maximum posterior responsibility.
GmmModel gmm_em(const MatrixXd& coords, std::size_t k, const GmmOptions& options = {});

/// Chance-corrected partition agreement.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace coda
