#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coda {

/// Pipeline run configuration, parsed from a sectioned key = value file.
struct PipelineConfig {
    // [input]
    std::string table_path;
    std::string history_path;  // optional sidecar
    int target_year = 0;

    // [preprocess]
    // aggregation: new entity id -> raw entity ids averaged into it
    std::vector<std::pair<std::string, std::vector<std::string>>> aggregate;
    std::vector<std::string> exclude_rows;
    std::vector<std::string> exclude_columns;

    // [params]
    std::size_t kmeans_k = 3;
    std::size_t qmode_k = 3;
    std::size_t kmeans_restarts = 50;
    std::size_t repetitions = 100;
    std::uint64_t seed = 20221;
    std::size_t diagnostics_k_min = 2;
    std::size_t diagnostics_k_max = 8;

    // [tsne]
    bool tsne_enabled = true;
    double tsne_perplexity = 10.0;
    double tsne_learning_rate = 200.0;
    std::size_t tsne_iterations = 1000;
    double tsne_early_exaggeration = 12.0;
    std::size_t tsne_exaggeration_iters = 250;

    // [output]
    std::string out_dir = "out";

    /// Raw key/value view kept for hashing and provenance.
    std::map<std::string, std::string> raw;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text);

/// FNV-1a over the normalized key = value pairs; stable across reruns.
std::string config_hash(const PipelineConfig& config);

}  // namespace coda
