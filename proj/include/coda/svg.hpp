#pragma once

#include <string>
#include <vector>

#include "coda/cluster.hpp"
#include "coda/pca.hpp"
#include "coda/tsne.hpp"

namespace coda {

/// Scatter of a 2-D embedding, points colored by cluster and annotated with
/// entity labels.
std::string render_scatter_svg(const MatrixXd& y, const std::vector<std::string>& labels,
                               const std::vector<int>& clusters, const std::string& title);

/// Classic dendrogram with leaf labels along the bottom.
std::string render_dendrogram_svg(const Dendrogram& dendrogram, const std::string& title);

/// Biplot: numbered score points plus clr loading arrows (symmetric alpha=0.5
/// scaling applied to both layers).
std::string render_biplot_svg(const PcaModel& model, const std::vector<std::string>& point_labels,
                              const std::vector<std::string>& arrow_labels,
                              const std::string& title);

}  // namespace coda
