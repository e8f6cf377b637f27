#include "coda/geometry.hpp"

#include <cmath>
#include <set>

namespace coda {

void validate(const Composition& c) {
    if (c.dim() < 2) throw DimensionError("composition needs at least 2 parts");
    for (Eigen::Index i = 0; i < c.parts.size(); ++i) {
        if (!(c.parts[i] > 0.0)) {
            throw NonPositivePartError(static_cast<std::size_t>(i), c.parts[i]);
        }
    }
    if (!c.labels.empty()) {
        if (c.labels.size() != c.dim()) {
            throw LabelMismatchError("label count does not match part count");
        }
        std::set<std::string> seen(c.labels.begin(), c.labels.end());
        if (seen.size() != c.labels.size()) {
            throw LabelMismatchError("component labels are not unique");
        }
    }
}

void validate(const CompositionTable& t) {
    if (t.rows() < 2) throw InsufficientRowsError("composition table needs n >= 2 rows");
    if (t.dim() < 2) throw DimensionError("composition table needs D >= 2 components");
    if (t.row_ids.size() != t.rows()) throw LabelMismatchError("row id count does not match n");
    std::set<std::string> ids(t.row_ids.begin(), t.row_ids.end());
    if (ids.size() != t.row_ids.size()) throw DuplicateEntityError("row ids are not unique");
    if (t.component_labels.size() != t.dim()) {
        throw LabelMismatchError("component label count does not match D");
    }
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
            if (!(t.values(i, j) > 0.0)) {
                throw NonPositivePartError(static_cast<std::size_t>(j), t.values(i, j));
            }
        }
    }
}

Composition closure(const VectorXd& parts, const std::vector<std::string>& labels) {
    for (Eigen::Index i = 0; i < parts.size(); ++i) {
        if (!(parts[i] > 0.0)) throw NonPositivePartError(static_cast<std::size_t>(i), parts[i]);
    }
    Composition out{parts / parts.sum(), labels};
    validate(out);
    return out;
}

Composition closure(const Composition& c) { return closure(c.parts, c.labels); }

CompositionTable closure(const CompositionTable& t) {
    CompositionTable out = t;
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        const double s = out.values.row(i).sum();
        out.values.row(i) /= s;
    }
    return out;
}

VectorXd clr(const VectorXd& parts) {
    const VectorXd logs = parts.array().log().matrix();
    return logs.array() - logs.mean();
}

VectorXd clr(const Composition& c) {
    validate(c);
    return clr(c.parts);
}

CoordinateMatrix clr(const CompositionTable& t) {
    validate(t);
    CoordinateMatrix out;
    out.kind = CoordKind::Clr;
    out.component_labels = t.component_labels;
    out.values.resize(t.values.rows(), t.values.cols());
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        out.values.row(i) = clr(VectorXd(t.values.row(i).transpose())).transpose();
    }
    return out;
}

MatrixXd ilr_pivot_basis(std::size_t dim) {
    if (dim < 2) throw DimensionError("ilr basis needs D >= 2");
    const auto D = static_cast<Eigen::Index>(dim);
    MatrixXd v = MatrixXd::Zero(D, D - 1);
    for (Eigen::Index j = 0; j < D - 1; ++j) {
        const double r = static_cast<double>(D - 1 - j);  // parts after position j
        const double a = std::sqrt(r / (r + 1.0));
        v(j, j) = a;
        for (Eigen::Index l = j + 1; l < D; ++l) v(l, j) = -a / r;
    }
    return v;
}

VectorXd ilr_pivot(const VectorXd& parts) {
    const auto D = parts.size();
    if (D < 2) throw DimensionError("ilr needs D >= 2");
    const VectorXd logs = parts.array().log().matrix();
    // Suffix means of the log values give the geometric means of the tails.
    VectorXd suffix(D + 1);
    suffix[D] = 0.0;
    for (Eigen::Index i = D - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + logs[i];
    VectorXd z(D - 1);
    for (Eigen::Index j = 0; j < D - 1; ++j) {
        const double r = static_cast<double>(D - 1 - j);
        const double tail_mean = suffix[j + 1] / r;
        z[j] = std::sqrt(r / (r + 1.0)) * (logs[j] - tail_mean);
    }
    return z;
}

VectorXd ilr_pivot(const Composition& c) {
    validate(c);
    return ilr_pivot(c.parts);
}

CoordinateMatrix ilr_pivot(const CompositionTable& t) {
    validate(t);
    CoordinateMatrix out;
    out.kind = CoordKind::Ilr;
    out.component_labels = t.component_labels;
    out.values.resize(t.values.rows(), t.values.cols() - 1);
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        out.values.row(i) = ilr_pivot(VectorXd(t.values.row(i).transpose())).transpose();
    }
    return out;
}

VectorXd ilr_inverse_parts(const VectorXd& z) {
    const auto D = z.size() + 1;
    const MatrixXd v = ilr_pivot_basis(static_cast<std::size_t>(D));
    const VectorXd logs = v * z;
    VectorXd parts = logs.array().exp().matrix();
    return parts / parts.sum();
}

Composition ilr_inverse(const VectorXd& z, const std::vector<std::string>& labels) {
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(z.size()) + 1) {
        throw BasisMismatchError("coordinate length does not match label count minus one");
    }
    return Composition{ilr_inverse_parts(z), labels};
}

VectorXd alr(const Composition& c) {
    validate(c);
    const auto D = c.parts.size();
    VectorXd y(D - 1);
    for (Eigen::Index i = 0; i < D - 1; ++i) y[i] = std::log(c.parts[i] / c.parts[D - 1]);
    return y;
}

Composition alr_inverse(const VectorXd& y, const std::vector<std::string>& labels) {
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(y.size()) + 1) {
        throw BasisMismatchError("coordinate length does not match label count minus one");
    }
    VectorXd parts(y.size() + 1);
    parts.head(y.size()) = y.array().exp().matrix();
    parts[y.size()] = 1.0;
    return closure(parts, labels);
}

double aitchison_distance(const Composition& a, const Composition& b) {
    if (!a.labels.empty() && !b.labels.empty() && a.labels != b.labels) {
        throw LabelMismatchError("compositions have different label sets");
    }
    if (a.dim() != b.dim()) throw LabelMismatchError("compositions have different sizes");
    return (clr(a) - clr(b)).norm();
}

MatrixXd aitchison_distance_matrix(const CompositionTable& t) {
    const CoordinateMatrix c = clr(t);
    const auto n = c.values.rows();
    MatrixXd d = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = (c.values.row(i) - c.values.row(j)).norm();
        }
    }
    return d;
}

Composition center(const CompositionTable& t) {
    if (t.rows() < 1) throw InsufficientRowsError("center needs n >= 1");
    const double n = static_cast<double>(t.rows());
    VectorXd log_mean = VectorXd::Zero(t.values.cols());
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        log_mean += t.values.row(i).array().log().matrix().transpose();
    }
    log_mean /= n;
    return closure(log_mean.array().exp().matrix(), t.component_labels);
}

VariationMatrix variation_matrix_classical(const CompositionTable& t) {
    validate(t);
    const auto n = t.values.rows();
    const auto D = t.values.cols();
    const MatrixXd logs = t.values.array().log().matrix();
    VariationMatrix out;
    out.method = VariationMethod::Classical;
    out.component_labels = t.component_labels;
    out.t = MatrixXd::Zero(D, D);
    for (Eigen::Index j = 0; j < D; ++j) {
        for (Eigen::Index k = j + 1; k < D; ++k) {
            const VectorXd z = logs.col(j) - logs.col(k);
            const double mean = z.mean();
            const double var = (z.array() - mean).square().sum() / static_cast<double>(n - 1);
            out.t(j, k) = out.t(k, j) = var;
        }
    }
    return out;
}

}  // namespace coda
