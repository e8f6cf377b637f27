#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "coda/errors.hpp"

namespace coda {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A D-part composition: strictly positive parts carrying relative
/// information only. Two vectors that differ by a positive scalar factor
/// represent the same composition.
struct Composition {
    VectorXd parts;
    std::vector<std::string> labels;

    std::size_t dim() const { return static_cast<std::size_t>(parts.size()); }
};

/// Validate part positivity, D >= 2 and label uniqueness; throws on failure.
void validate(const Composition& c);

/// n rows sharing one ordered component label set.
struct CompositionTable {
    MatrixXd values;  // n x D, strictly positive
    std::vector<std::string> row_ids;
    std::vector<std::string> component_labels;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }

    Composition row(std::size_t i) const {
        return Composition{values.row(static_cast<Eigen::Index>(i)).transpose(), component_labels};
    }
};

void validate(const CompositionTable& t);

enum class CoordKind { Clr, Ilr, Alr };

/// Log-ratio coordinate representation of a composition table.
/// For ilr the basis is the pivot (sequential binary partition by column
/// order) contrast matrix; `basis_order` records the column permutation the
/// pivot sequence was built on.
struct CoordinateMatrix {
    MatrixXd values;  // n x k, k = D for clr, D-1 for ilr/alr
    CoordKind kind = CoordKind::Ilr;
    std::vector<std::string> component_labels;
    std::vector<std::size_t> basis_order;  // identity permutation unless pivoted

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t coords() const { return static_cast<std::size_t>(values.cols()); }
};

enum class VariationMethod { Classical, Robust };

/// D x D matrix of pairwise log-ratio variances.
struct VariationMatrix {
    MatrixXd t;
    VariationMethod method = VariationMethod::Classical;
    std::vector<std::string> component_labels;

    std::size_t dim() const { return static_cast<std::size_t>(t.rows()); }
};

}  // namespace coda
