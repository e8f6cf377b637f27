#pragma once

#include <cstdint>
#include <string>

#include "coda/robust.hpp"
#include "coda/types.hpp"

namespace coda {

enum class PcaMethod { Classical, Robust };

/// Principal components of ilr coordinates, with clr-space loadings for
/// biplot axes.
struct PcaModel {
    MatrixXd loadings_ilr;   // (D-1) x p, orthonormal columns
    MatrixXd scores;         // n x p
    VectorXd variances;      // descending
    double explained_ratio_2pc = 0.0;
    PcaMethod method = PcaMethod::Classical;
    MatrixXd loadings_clr;   // D x p, zero-sum columns
    VectorXd centering;      // column center removed before projection
    std::size_t n = 0;

    VectorXd cumulative_ratios() const;
};

/// SVD principal components of mean-centered ilr coordinates.
/// Throws DegenerateDataError when all rows coincide.
PcaModel pca_classical(const CoordinateMatrix& coords);

/// Eigendecomposition of the MCD covariance; scores are computed from
/// MCD-centered coordinates.
PcaModel pca_robust(const CoordinateMatrix& coords, std::uint64_t seed = 20221);

/// First-two-PC loadings mapped to clr space through the pivot basis.
MatrixXd biplot_loadings_clr(const PcaModel& model);

struct PcaSelection {
    PcaModel chosen;
    double ratio_classical = 0.0;
    double ratio_robust = 0.0;
};

/// Fits both methods and keeps the one with the higher two-component
/// explained-variance ratio; classical wins ties.
PcaSelection select_pca(const CoordinateMatrix& coords, std::uint64_t seed = 20221);

}  // namespace coda
