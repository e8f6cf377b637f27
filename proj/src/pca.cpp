#include "coda/pca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "coda/geometry.hpp"

namespace coda {

namespace {

/// Flip each loading column so its largest-magnitude entry is positive;
/// scores flip with the loadings so scores * loadings^T is unchanged.
void fix_signs(MatrixXd& loadings, MatrixXd& scores) {
    for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
        Eigen::Index arg = 0;
        loadings.col(j).cwiseAbs().maxCoeff(&arg);
        if (loadings(arg, j) < 0.0) {
            loadings.col(j) = -loadings.col(j);
            scores.col(j) = -scores.col(j);
        }
    }
}

double two_pc_ratio(const VectorXd& variances) {
    const double total = variances.sum();
    if (total <= 0.0) return 0.0;
    double top = variances[0];
    if (variances.size() > 1) top += variances[1];
    return top / total;
}

void finish_model(PcaModel& model, const CoordinateMatrix& coords) {
    if (coords.kind != CoordKind::Ilr) {
        throw BasisMismatchError("pca expects ilr coordinates");
    }
    model.explained_ratio_2pc = two_pc_ratio(model.variances);
    const auto D = coords.coords() + 1;
    model.loadings_clr = ilr_pivot_basis(D) * model.loadings_ilr;
    model.n = coords.rows();
}

}  // namespace

VectorXd PcaModel::cumulative_ratios() const {
    VectorXd c(variances.size());
    const double total = variances.sum();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < variances.size(); ++i) {
        acc += variances[i];
        c[i] = total > 0.0 ? acc / total : 0.0;
    }
    return c;
}

PcaModel pca_classical(const CoordinateMatrix& coords) {
    const auto n = static_cast<Eigen::Index>(coords.rows());
    if (n < 2) throw InsufficientRowsError("pca needs n >= 2");
    const VectorXd mean = coords.values.colwise().mean();
    MatrixXd centered = coords.values.rowwise() - mean.transpose();
    if (centered.lpNorm<Eigen::Infinity>() == 0.0) {
        throw DegenerateDataError("all coordinate rows are identical");
    }

    const auto p = std::min<Eigen::Index>(n, coords.values.cols());
    Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);

    PcaModel model;
    model.method = PcaMethod::Classical;
    model.centering = mean;
    const auto keep = std::min<Eigen::Index>(p, svd.singularValues().size());
    model.loadings_ilr = svd.matrixV().leftCols(keep);
    model.scores =
        svd.matrixU().leftCols(keep) * svd.singularValues().head(keep).asDiagonal();
    model.variances =
        svd.singularValues().head(keep).array().square() / static_cast<double>(n - 1);
    fix_signs(model.loadings_ilr, model.scores);
    finish_model(model, coords);
    return model;
}

PcaModel pca_robust(const CoordinateMatrix& coords, std::uint64_t seed) {
    const auto n = coords.rows();
    const auto dim = coords.coords();
    if (n <= dim) throw DimensionError("robust pca needs n > coordinate dimension");

    McdOptions mo;
    mo.seed = seed;
    const RobustEstimate mcd = fast_mcd(coords.values, mo);

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(mcd.covariance);
    if (eig.info() != Eigen::Success) throw SingularSubsetError("eigendecomposition failed");

    // SelfAdjointEigenSolver sorts ascending; flip to descending.
    const auto p = static_cast<Eigen::Index>(dim);
    PcaModel model;
    model.method = PcaMethod::Robust;
    model.centering = mcd.location;
    model.loadings_ilr.resize(p, p);
    model.variances.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        model.loadings_ilr.col(j) = eig.eigenvectors().col(p - 1 - j);
        model.variances[j] = std::max(eig.eigenvalues()[p - 1 - j], 0.0);
    }
    const MatrixXd centered = coords.values.rowwise() - mcd.location.transpose();
    model.scores = centered * model.loadings_ilr;
    fix_signs(model.loadings_ilr, model.scores);
    finish_model(model, coords);
    return model;
}

MatrixXd biplot_loadings_clr(const PcaModel& model) {
    if (model.loadings_clr.cols() < 1) throw BasisMismatchError("model has no loadings");
    const auto take = std::min<Eigen::Index>(2, model.loadings_clr.cols());
    return model.loadings_clr.leftCols(take);
}

PcaSelection select_pca(const CoordinateMatrix& coords, std::uint64_t seed) {
    PcaSelection sel;
    PcaModel classical = pca_classical(coords);
    PcaModel robust = pca_robust(coords, seed);
    sel.ratio_classical = classical.explained_ratio_2pc;
    sel.ratio_robust = robust.explained_ratio_2pc;
    // classical wins exact ties
    if (sel.ratio_robust > sel.ratio_classical + 1e-9) {
        sel.chosen = std::move(robust);
    } else {
        sel.chosen = std::move(classical);
    }
    return sel;
}

}  // namespace coda
