#include "coda/impute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "coda/geometry.hpp"
#include "coda/rng.hpp"

namespace coda {

void validate(const MissingMask& mask) {
    for (Eigen::Index i = 0; i < mask.missing.rows(); ++i) {
        if (mask.missing.row(i).all()) {
            throw DegenerateDesignError("row " + std::to_string(i) + " is entirely missing");
        }
    }
    for (Eigen::Index j = 0; j < mask.missing.cols(); ++j) {
        if (mask.missing.col(j).all()) {
            throw DegenerateDesignError("column " + std::to_string(j) + " is entirely missing");
        }
    }
}

std::optional<double> impute_by_trend(const std::vector<YearValue>& series, int target_year) {
    if (series.size() < 3) return std::nullopt;
    const double n = static_cast<double>(series.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& yv : series) {
        const double x = static_cast<double>(yv.year);
        sx += x;
        sy += yv.value;
        sxx += x * x;
        sxy += x * yv.value;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;  // all observations share one year
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    const double pred = intercept + slope * static_cast<double>(target_year);
    if (!(pred > 0.0)) return std::nullopt;
    return pred;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> observed_columns(const MissingMask& mask, std::size_t row) {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < mask.missing.cols(); ++j) {
        if (!mask.missing(static_cast<Eigen::Index>(row), j)) {
            out.push_back(static_cast<std::size_t>(j));
        }
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Aitchison distance between two rows restricted to the given columns.
double restricted_distance(const MatrixXd& values, std::size_t a, std::size_t b,
                           const std::vector<std::size_t>& cols) {
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t c : cols) {
        mean_a += std::log(values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)));
        mean_b += std::log(values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)));
    }
    mean_a /= static_cast<double>(cols.size());
    mean_b /= static_cast<double>(cols.size());
    double d2 = 0.0;
    for (std::size_t c : cols) {
        const double da =
            std::log(values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c))) - mean_a;
        const double db =
            std::log(values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c))) - mean_b;
        d2 += (da - db) * (da - db);
    }
    return std::sqrt(d2);
}

/// Pivot coordinates of one row with column `first` moved to the front.
/// Coordinate 0 carries the pivoted column; the rest only involve the others.
VectorXd pivot_coords_first(const VectorXd& row, std::size_t first) {
    const auto D = static_cast<std::size_t>(row.size());
    VectorXd perm(row.size());
    perm[0] = row[static_cast<Eigen::Index>(first)];
    Eigen::Index at = 1;
    for (std::size_t j = 0; j < D; ++j) {
        if (j == first) continue;
        perm[at++] = row[static_cast<Eigen::Index>(j)];
    }
    return ilr_pivot(perm);
}

/// Geometric mean of a row excluding one column.
double gm_excluding(const VectorXd& row, std::size_t skip) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (static_cast<std::size_t>(j) == skip) continue;
        s += std::log(row[j]);
    }
    return std::exp(s / static_cast<double>(row.size() - 1));
}

struct RepetitionOutcome {
    MatrixXd values;
    bool converged = true;
    double final_delta = 0.0;
    std::size_t degenerate_columns = 0;
};

RepetitionOutcome run_repetition(MatrixXd values, const MissingMask& mask,
                                 const std::vector<std::size_t>& complete_rows,
                                 const ImputeOptions& options, std::uint64_t rep_seed) {
    const auto n = static_cast<std::size_t>(values.rows());
    const auto D = static_cast<std::size_t>(values.cols());
    RepetitionOutcome out;

    // (a) KNN initialization from complete rows.
    const std::size_t k = std::min(options.knn_k, complete_rows.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.row_count(i) == 0) continue;
        const auto obs = observed_columns(mask, i);
        std::vector<std::pair<double, std::size_t>> dists;
        dists.reserve(complete_rows.size());
        for (std::size_t r : complete_rows) {
            dists.push_back({obs.size() >= 2 ? restricted_distance(values, i, r, obs) : 0.0, r});
        }
        std::sort(dists.begin(), dists.end());
        const std::size_t ref = obs.front();
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(D); ++j) {
            if (!mask.missing(static_cast<Eigen::Index>(i), j)) continue;
            std::vector<double> ratios;
            for (std::size_t t = 0; t < k; ++t) {
                const auto r = static_cast<Eigen::Index>(dists[t].second);
                ratios.push_back(std::log(values(r, j) / values(r, static_cast<Eigen::Index>(ref))));
            }
            values(static_cast<Eigen::Index>(i), j) =
                values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ref)) *
                std::exp(median(ratios));
        }
    }

    // Columns that still need refinement.
    std::vector<std::size_t> target_cols;
    for (std::size_t j = 0; j < D; ++j) {
        if (mask.col_count(j) > 0) target_cols.push_back(j);
    }
    const double pivot_scale =
        std::sqrt(static_cast<double>(D - 1) / static_cast<double>(D));

    // (b) per-column LTS regression in pivot coordinates, iterated.
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        double max_delta = 0.0;
        for (std::size_t j : target_cols) {
            // response: coordinate 0 with column j pivoted first
            // predictors: remaining coordinates (independent of column j)
            MatrixXd X(static_cast<Eigen::Index>(complete_rows.size()),
                       static_cast<Eigen::Index>(D - 2));
            VectorXd y(static_cast<Eigen::Index>(complete_rows.size()));
            for (std::size_t r = 0; r < complete_rows.size(); ++r) {
                const VectorXd z = pivot_coords_first(
                    values.row(static_cast<Eigen::Index>(complete_rows[r])).transpose(), j);
                y[static_cast<Eigen::Index>(r)] = z[0];
                X.row(static_cast<Eigen::Index>(r)) = z.tail(z.size() - 1).transpose();
            }

            VectorXd beta;
            bool have_fit = false;
            try {
                LtsOptions lo;
                lo.trim_fraction = options.lts_trim;
                lo.seed = mix_seed(rep_seed, 0x1000 + j);
                lo.mode = SearchMode::Heuristic;
                lo.n_starts = 100;
                const LtsFit fit = lts_regression(X, y, lo);
                beta = fit.coefficients;
                have_fit = true;
            } catch (const DegenerateDesignError&) {
                ++out.degenerate_columns;
            } catch (const DimensionError&) {
                ++out.degenerate_columns;
            }

            for (std::size_t i = 0; i < n; ++i) {
                if (!mask.missing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                    continue;
                const VectorXd z =
                    pivot_coords_first(values.row(static_cast<Eigen::Index>(i)).transpose(), j);
                double pred;
                if (have_fit) {
                    pred = beta[0];
                    for (Eigen::Index c = 1; c < beta.size(); ++c) pred += beta[c] * z[c];
                } else {
                    // no usable linear structure: fall back to the location
                    pred = y.mean();
                }
                const double gm = gm_excluding(
                    values.row(static_cast<Eigen::Index>(i)).transpose(), j);
                const double updated = gm * std::exp(pred / pivot_scale);
                const double old =
                    values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                max_delta = std::max(max_delta, std::abs(updated - old) / std::abs(old));
                values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = updated;
            }
        }
        out.final_delta = max_delta;
        if (max_delta < options.tolerance) break;
        if (iter + 1 == options.max_iterations) out.converged = false;
    }

    out.values = std::move(values);
    return out;
}

}  // namespace

ImputationResult impute_iterative(const MatrixXd& values, const MissingMask& mask,
                                  const ImputeOptions& options) {
    if (values.rows() != mask.missing.rows() || values.cols() != mask.missing.cols()) {
        throw DimensionError("mask shape does not match table shape");
    }
    if (options.repetitions < 1) throw DimensionError("repetitions must be >= 1");
    validate(mask);

    const auto n = static_cast<std::size_t>(values.rows());
    const auto D = static_cast<std::size_t>(values.cols());

    ImputationResult result;
    result.completed = values;
    result.report.repetitions = options.repetitions;

    std::vector<std::pair<std::size_t, std::size_t>> missing_cells;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < D; ++j) {
            if (mask.missing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) {
                missing_cells.push_back({i, j});
            }
        }
    }
    if (missing_cells.empty()) return result;

    std::vector<std::size_t> complete_rows;
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.row_count(i) == 0) complete_rows.push_back(i);
    }
    if (complete_rows.empty()) {
        throw DegenerateDesignError("iterative imputation needs at least one complete row");
    }

    // Observed cells must be strictly positive for the log-ratio machinery.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < D; ++j) {
            if (mask.missing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) continue;
            const double v = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (!(v > 0.0)) throw NonPositivePartError(j, v);
        }
    }

    MatrixXd log_sum = MatrixXd::Zero(values.rows(), values.cols());
    MatrixXd raw_sum = MatrixXd::Zero(values.rows(), values.cols());
    MatrixXd raw_sumsq = MatrixXd::Zero(values.rows(), values.cols());

    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        const auto outcome = run_repetition(values, mask, complete_rows, options,
                                            mix_seed(options.seed, rep));
        if (!outcome.converged) ++result.report.nonconverged_repetitions;
        result.report.degenerate_column_fallbacks += outcome.degenerate_columns;
        result.report.max_final_delta =
            std::max(result.report.max_final_delta, outcome.final_delta);
        for (const auto& [i, j] : missing_cells) {
            const double v =
                outcome.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            log_sum(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += std::log(v);
            raw_sum(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v;
            raw_sumsq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v * v;
        }
    }

    const double reps = static_cast<double>(options.repetitions);
    for (const auto& [i, j] : missing_cells) {
        const auto ei = static_cast<Eigen::Index>(i);
        const auto ej = static_cast<Eigen::Index>(j);
        // coordinate-space average == per-cell geometric mean across reps
        const double value = std::exp(log_sum(ei, ej) / reps);
        result.completed(ei, ej) = value;
        double sd = 0.0;
        if (options.repetitions > 1) {
            const double mean = raw_sum(ei, ej) / reps;
            double var = (raw_sumsq(ei, ej) - reps * mean * mean) / (reps - 1.0);
            sd = std::sqrt(std::max(var, 0.0));
        }
        result.report.cells.push_back({i, j, CellMethod::IterativeKnnLts, value, sd});
        ++result.report.iterative_filled;
    }
    return result;
}

ImputationResult impute_table(const MatrixXd& values, const MissingMask& mask,
                              const std::vector<std::string>& row_ids,
                              const std::vector<std::string>& component_labels,
                              const HistoricalSeries& history, int target_year,
                              const ImputeOptions& options) {
    validate(mask);
    MatrixXd working = values;
    MissingMask remaining = mask;
    ImputationReport trend_report;

    std::vector<CellReport> trend_cells;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (!mask.missing(i, j)) continue;
            const auto key = std::make_pair(row_ids[static_cast<std::size_t>(i)],
                                            component_labels[static_cast<std::size_t>(j)]);
            const auto it = history.find(key);
            if (it == history.end()) continue;
            const auto filled = impute_by_trend(it->second, target_year);
            if (!filled) continue;
            working(i, j) = *filled;
            remaining.missing(i, j) = false;
            trend_cells.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                   CellMethod::TrendRegression, *filled, 0.0});
        }
    }

    ImputationResult result;
    if (remaining.count() > 0) {
        result = impute_iterative(working, remaining, options);
    } else {
        result.completed = working;
        result.report.repetitions = options.repetitions;
    }
    result.report.trend_filled = trend_cells.size();
    result.report.cells.insert(result.report.cells.begin(), trend_cells.begin(),
                               trend_cells.end());
    std::sort(result.report.cells.begin(), result.report.cells.end(),
              [](const CellReport& a, const CellReport& b) {
                  return std::tie(a.row, a.col) < std::tie(b.row, b.col);
              });
    return result;
}

}  // namespace coda
