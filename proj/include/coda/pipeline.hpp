#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coda/cluster.hpp"
#include "coda/config.hpp"
#include "coda/impute.hpp"
#include "coda/pca.hpp"
#include "coda/tsne.hpp"
#include "coda/types.hpp"

namespace coda {

/// Ingested main table: raw rates with NaN in missing cells, plus the
/// missingness mask and the historical sidecar.
struct IngestResult {
    MatrixXd values;
    MissingMask mask;
    std::vector<std::string> row_ids;
    std::vector<std::string> component_labels;
    HistoricalSeries history;
};

/// CSV ingestion with entity aggregation (arithmetic mean) and row/column
/// exclusion applied.
IngestResult ingest(const PipelineConfig& config);

struct StageStatus {
    std::string name;
    bool ok = false;
    std::string error;
};

struct QmodePcaReport {
    int cluster_index = 0;               // 1-based id from the Q-mode cut
    std::vector<std::string> components;
    double ratio_classical = 0.0;
    double ratio_robust = 0.0;
    PcaMethod selected = PcaMethod::Classical;
    PcaModel model;
};

struct PipelineResult {
    bool ok = false;
    std::vector<StageStatus> stages;

    std::vector<std::string> row_ids;
    std::vector<std::string> component_labels;
    std::size_t missing_cells = 0;

    ImputationReport imputation;
    CompositionTable completed;          // imputed, closed

    ClusterAssignment kmeans_result;
    GmmModel gmm_result;
    Dendrogram rmode_divisive;
    DiagnosticsCurve diagnostics_curve;

    std::optional<Embedding> tsne;

    VariationMatrix qmode_variation;
    Dendrogram qmode_dendrogram;
    std::vector<int> qmode_cut;          // per-component cluster ids, 1..K
    std::vector<QmodePcaReport> qmode_pca;
    std::vector<int> qmode_skipped;      // singleton variable clusters
};

/// Runs ingest -> impute -> transform -> R-mode -> t-SNE -> Q-mode/PCA and
/// writes report.json, assignments.csv, variation_matrix.csv, the SVG
/// figures and imputation_report.json into config.out_dir. A stage failure
/// marks the stage, skips the rest and leaves ok = false; the partial
/// report is still written.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Checks config consistency and input availability without running.
/// Returns human-readable findings; empty means valid.
std::vector<std::string> validate_config(const PipelineConfig& config);

}  // namespace coda
