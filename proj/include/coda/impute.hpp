#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coda/robust.hpp"
#include "coda/types.hpp"

namespace coda {

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Missingness pattern of an n x D table; true marks a missing cell.
struct MissingMask {
    BoolGrid missing;

    std::size_t count() const { return static_cast<std::size_t>(missing.cast<int>().sum()); }
    std::size_t row_count(std::size_t i) const {
        return static_cast<std::size_t>(missing.row(static_cast<Eigen::Index>(i)).cast<int>().sum());
    }
    std::size_t col_count(std::size_t j) const {
        return static_cast<std::size_t>(missing.col(static_cast<Eigen::Index>(j)).cast<int>().sum());
    }
};

/// Throws when a row or column is entirely missing.
void validate(const MissingMask& mask);

struct YearValue {
    int year;
    double value;
};

/// Prior-year observations per (entity, component).
using HistoricalSeries = std::map<std::pair<std::string, std::string>, std::vector<YearValue>>;

enum class CellMethod { Observed, TrendRegression, IterativeKnnLts };

struct CellReport {
    std::size_t row;
    std::size_t col;
    CellMethod method;
    double value;
    double std_across_reps;  // zero for trend cells
};

struct ImputationReport {
    std::size_t repetitions = 0;
    std::vector<CellReport> cells;              // one entry per originally-missing cell
    std::size_t trend_filled = 0;
    std::size_t iterative_filled = 0;
    std::size_t nonconverged_repetitions = 0;   // hit the iteration cap
    std::size_t degenerate_column_fallbacks = 0;
    double max_final_delta = 0.0;               // worst final relative change
};

/// OLS of value on year evaluated at the target year. Returns nothing when
/// the series has fewer than 3 points or the prediction is not positive.
std::optional<double> impute_by_trend(const std::vector<YearValue>& series, int target_year);

struct ImputeOptions {
    std::size_t repetitions = 100;
    std::uint64_t seed = 20221;
    std::size_t knn_k = 5;
    double lts_trim = 0.25;
    double tolerance = 1e-6;
    std::size_t max_iterations = 50;
};

struct ImputationResult {
    MatrixXd completed;  // observed cells bit-exact, missing cells filled
    ImputationReport report;
};

/// KNN initialization followed by per-column LTS regression in pivot
/// coordinates, iterated to convergence; cell values are averaged across
/// repetitions in coordinate space (geometric mean per cell).
ImputationResult impute_iterative(const MatrixXd& values, const MissingMask& mask,
                                  const ImputeOptions& options = {});

/// Full imputation stage: trend regression first for cells with usable
/// history, the remainder via impute_iterative.
ImputationResult impute_table(const MatrixXd& values, const MissingMask& mask,
                              const std::vector<std::string>& row_ids,
                              const std::vector<std::string>& component_labels,
                              const HistoricalSeries& history, int target_year,
                              const ImputeOptions& options = {});

}  // namespace coda
