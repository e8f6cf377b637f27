#pragma once

#include "coda/types.hpp"

namespace coda {

/// Normalize a positive vector to unit sum. Ratios are preserved exactly.
/// Throws NonPositivePartError (with the offending index) on any entry <= 0.
Composition closure(const VectorXd& parts, const std::vector<std::string>& labels = {});

Composition closure(const Composition& c);

/// Close every row of a table.
CompositionTable closure(const CompositionTable& t);

/// Centered log-ratio: ln(x_i / g(x)) with g the geometric mean.
/// Output sums to zero.
VectorXd clr(const Composition& c);
VectorXd clr(const VectorXd& parts);

/// clr transform of every row.
CoordinateMatrix clr(const CompositionTable& t);

/// Pivot (sequential binary partition) ilr contrast matrix, D x (D-1).
/// Columns are orthonormal and sum to zero, so ilr(x) = V^T clr(x).
MatrixXd ilr_pivot_basis(std::size_t dim);

/// Isometric log-ratio pivot coordinates,
///   z_j = sqrt((D-j)/(D-j+1)) * ln(x_j / gm(x_{j+1},...,x_D)).
VectorXd ilr_pivot(const Composition& c);
VectorXd ilr_pivot(const VectorXd& parts);

CoordinateMatrix ilr_pivot(const CompositionTable& t);

/// Inverse of ilr_pivot; returns the closed composition.
/// Throws BasisMismatchError when z has the wrong length for `labels`.
Composition ilr_inverse(const VectorXd& z, const std::vector<std::string>& labels);
VectorXd ilr_inverse_parts(const VectorXd& z);

/// Additive log-ratio with the last part as denominator (kept for
/// completeness; analyses use clr/ilr).
VectorXd alr(const Composition& c);
Composition alr_inverse(const VectorXd& y, const std::vector<std::string>& labels);

/// Aitchison distance, ||clr(a) - clr(b)||_2. Throws LabelMismatchError.
double aitchison_distance(const Composition& a, const Composition& b);

/// Pairwise Aitchison distance matrix of table rows.
MatrixXd aitchison_distance_matrix(const CompositionTable& t);

/// Closed geometric mean by component.
Composition center(const CompositionTable& t);

/// Classical variation matrix: t_jk = sample variance of ln(x_ij / x_ik).
/// Throws InsufficientRowsError when n < 2.
VariationMatrix variation_matrix_classical(const CompositionTable& t);

}  // namespace coda
