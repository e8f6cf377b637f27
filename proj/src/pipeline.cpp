#include "coda/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "coda/csv.hpp"
#include "coda/geometry.hpp"
#include "coda/robust.hpp"
#include "coda/rng.hpp"
#include "coda/svg.hpp"
#include "json.hpp"

namespace coda {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// fixed stream ids for per-stage seed derivation; t-SNE gets its own stream
// so skipping it cannot shift any other stage
enum SeedStream : std::uint64_t {
    kSeedImpute = 1,
    kSeedKmeans = 2,
    kSeedGmm = 3,
    kSeedTsne = 4,
    kSeedQmode = 5,
    kSeedPcaBase = 16,
};

double parse_cell(const std::string& field, std::size_t row, std::size_t col) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (...) {
        throw ParseError(row, col, "not a number: '" + field + "'");
    }
    if (used != field.size()) throw ParseError(row, col, "trailing junk: '" + field + "'");
    return v;
}

std::string trim_ws(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

HistoricalSeries load_history(const std::string& path) {
    HistoricalSeries history;
    const CsvTable csv = read_csv(path);
    if (csv.header.size() != 4) {
        throw ParseError(0, csv.header.size(),
                         "history csv needs entity_id, component, year, value");
    }
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        const int year = static_cast<int>(parse_cell(row[2], r + 1, 2));
        const double value = parse_cell(row[3], r + 1, 3);
        if (!(value > 0.0)) {
            throw NegativeValueError("history value must be positive at data row " +
                                     std::to_string(r + 1));
        }
        history[{row[0], row[1]}].push_back({year, value});
    }
    for (auto& [key, series] : history) {
        std::sort(series.begin(), series.end(),
                  [](const YearValue& a, const YearValue& b) { return a.year < b.year; });
        for (std::size_t i = 1; i < series.size(); ++i) {
            if (series[i].year == series[i - 1].year) {
                throw DuplicateEntityError("duplicate history year for " + key.first + "/" +
                                           key.second);
            }
        }
    }
    return history;
}

}  // namespace

IngestResult ingest(const PipelineConfig& config) {
    const CsvTable csv = read_csv(config.table_path);
    if (csv.header.size() < 3) throw ParseError(0, csv.header.size(), "need id column plus >= 2 components");

    std::vector<std::string> raw_ids;
    std::set<std::string> seen;
    const std::size_t D_raw = csv.header.size() - 1;
    MatrixXd raw(static_cast<Eigen::Index>(csv.rows.size()), static_cast<Eigen::Index>(D_raw));
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const std::string id = trim_ws(csv.rows[r][0]);
        if (id.empty()) throw ParseError(r + 1, 0, "empty entity id");
        if (!seen.insert(id).second) throw DuplicateEntityError("duplicate entity id: " + id);
        raw_ids.push_back(id);
        for (std::size_t c = 0; c < D_raw; ++c) {
            const std::string field = trim_ws(csv.rows[r][c + 1]);
            if (field.empty()) {
                raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = kNaN;
                continue;
            }
            const double v = parse_cell(field, r + 1, c + 1);
            if (!(v > 0.0)) {
                throw NegativeValueError("non-positive value " + std::to_string(v) + " at row " +
                                         id + ", column " + csv.header[c + 1]);
            }
            raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }

    // entity aggregation by arithmetic mean of the observed members
    std::map<std::string, std::pair<std::string, std::size_t>> member_of;  // raw id -> (group, pos)
    for (std::size_t g = 0; g < config.aggregate.size(); ++g) {
        for (const auto& member : config.aggregate[g].second) {
            member_of[member] = {config.aggregate[g].first, g};
        }
    }

    std::vector<std::string> ids;
    std::vector<VectorXd> rows;
    std::map<std::string, std::size_t> group_row;
    std::vector<VectorXd> group_sum(config.aggregate.size());
    std::vector<Eigen::VectorXi> group_count(config.aggregate.size());

    for (std::size_t r = 0; r < raw_ids.size(); ++r) {
        const auto it = member_of.find(raw_ids[r]);
        if (it == member_of.end()) {
            ids.push_back(raw_ids[r]);
            rows.push_back(raw.row(static_cast<Eigen::Index>(r)).transpose());
            continue;
        }
        const std::size_t g = it->second.second;
        if (group_sum[g].size() == 0) {
            group_sum[g] = VectorXd::Zero(static_cast<Eigen::Index>(D_raw));
            group_count[g] = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(D_raw));
            group_row[it->second.first] = ids.size();
            ids.push_back(it->second.first);
            rows.push_back(VectorXd::Constant(static_cast<Eigen::Index>(D_raw), kNaN));
        }
        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(D_raw); ++c) {
            const double v = raw(static_cast<Eigen::Index>(r), c);
            if (!std::isnan(v)) {
                group_sum[g][c] += v;
                group_count[g][c] += 1;
            }
        }
    }
    for (const auto& [gid, pos] : group_row) {
        const std::size_t g = member_of.begin() == member_of.end() ? 0 : 0;
        (void)g;
        // find the group's index again (small count, linear scan is fine)
        for (std::size_t gi = 0; gi < config.aggregate.size(); ++gi) {
            if (config.aggregate[gi].first != gid) continue;
            for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(D_raw); ++c) {
                rows[pos][c] = group_count[gi][c] > 0
                                   ? group_sum[gi][c] / static_cast<double>(group_count[gi][c])
                                   : kNaN;
            }
        }
    }

    // row/column exclusion
    const std::set<std::string> drop_rows(config.exclude_rows.begin(), config.exclude_rows.end());
    const std::set<std::string> drop_cols(config.exclude_columns.begin(),
                                          config.exclude_columns.end());
    std::vector<std::size_t> keep_cols;
    IngestResult out;
    for (std::size_t c = 0; c < D_raw; ++c) {
        if (drop_cols.count(csv.header[c + 1])) continue;
        keep_cols.push_back(c);
        out.component_labels.push_back(csv.header[c + 1]);
    }
    std::vector<std::size_t> keep_rows;
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (drop_rows.count(ids[r])) continue;
        keep_rows.push_back(r);
        out.row_ids.push_back(ids[r]);
    }

    out.values.resize(static_cast<Eigen::Index>(keep_rows.size()),
                      static_cast<Eigen::Index>(keep_cols.size()));
    out.mask.missing.resize(static_cast<Eigen::Index>(keep_rows.size()),
                            static_cast<Eigen::Index>(keep_cols.size()));
    for (std::size_t r = 0; r < keep_rows.size(); ++r) {
        for (std::size_t c = 0; c < keep_cols.size(); ++c) {
            const double v = rows[keep_rows[r]][static_cast<Eigen::Index>(keep_cols[c])];
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
            out.mask.missing(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::isnan(v);
        }
    }
    validate(out.mask);

    if (!config.history_path.empty()) out.history = load_history(config.history_path);
    return out;
}

std::vector<std::string> validate_config(const PipelineConfig& config) {
    std::vector<std::string> findings;
    if (!std::filesystem::exists(config.table_path)) {
        findings.push_back("input.table does not exist: " + config.table_path);
    }
    if (!config.history_path.empty() && !std::filesystem::exists(config.history_path)) {
        findings.push_back("input.history does not exist: " + config.history_path);
    }
    if (config.kmeans_k < 2) findings.push_back("params.kmeans_k must be >= 2");
    if (config.qmode_k < 2) findings.push_back("params.qmode_k must be >= 2");
    if (config.repetitions < 1) findings.push_back("params.repetitions must be >= 1");
    if (!(config.tsne_perplexity > 1.0)) findings.push_back("tsne.perplexity must be > 1");
    if (findings.empty()) {
        try {
            ingest(config);
        } catch (const std::exception& e) {
            findings.push_back(std::string("ingest check failed: ") + e.what());
        }
    }
    return findings;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_vector(const VectorXd& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

ordered_json json_matrix(const MatrixXd& m) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        a.push_back(json_vector(m.row(i).transpose()));
    }
    return a;
}

ordered_json json_dendrogram(const Dendrogram& d) {
    ordered_json j;
    j["method"] = d.method;
    j["leaf_labels"] = d.leaf_labels;
    ordered_json merges = ordered_json::array();
    for (const auto& m : d.merges) {
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height},
                          {"size", m.size}});
    }
    j["merges"] = merges;
    return j;
}

std::string method_name(PcaMethod m) {
    return m == PcaMethod::Classical ? "classical" : "robust";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    PipelineResult result;
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out_dir(config.out_dir);

    ordered_json report;
    report["provenance"] = {
        {"version", kVersion},
        {"config_hash", config_hash(config)},
        {"base_seed", config.seed},
        {"generated_at", timestamp_utc()},
    };
    ordered_json seeds;

    auto run_stage = [&](const std::string& name, const std::function<void()>& body) {
        if (!result.stages.empty() && !result.stages.back().ok) {
            result.stages.push_back({name, false, "skipped: earlier stage failed"});
            return;
        }
        StageStatus status{name, true, ""};
        try {
            body();
        } catch (const std::exception& e) {
            status.ok = false;
            status.error = e.what();
        }
        result.stages.push_back(status);
    };

    IngestResult ing;
    run_stage("ingest", [&] {
        ing = ingest(config);
        result.row_ids = ing.row_ids;
        result.component_labels = ing.component_labels;
        result.missing_cells = ing.mask.count();
        report["dataset"] = {
            {"entities", ing.row_ids.size()},
            {"components", ing.component_labels.size()},
            {"missing_cells", result.missing_cells},
            {"row_ids", ing.row_ids},
            {"component_labels", ing.component_labels},
        };
    });

    run_stage("impute", [&] {
        ImputeOptions io;
        io.repetitions = config.repetitions;
        io.seed = mix_seed(config.seed, kSeedImpute);
        seeds["impute"] = io.seed;
        auto imputed = impute_table(ing.values, ing.mask, ing.row_ids, ing.component_labels,
                                    ing.history, config.target_year, io);
        result.imputation = imputed.report;

        CompositionTable table;
        table.values = imputed.completed;
        table.row_ids = ing.row_ids;
        table.component_labels = ing.component_labels;
        result.completed = closure(table);

        ordered_json cells = ordered_json::array();
        for (const auto& cell : imputed.report.cells) {
            cells.push_back({
                {"entity", ing.row_ids[cell.row]},
                {"component", ing.component_labels[cell.col]},
                {"method", cell.method == CellMethod::TrendRegression ? "trend_regression"
                                                                      : "iterative_knn_lts"},
                {"value", cell.value},
                {"std_across_reps", cell.std_across_reps},
            });
        }
        ordered_json imp;
        imp["repetitions"] = imputed.report.repetitions;
        imp["trend_filled"] = imputed.report.trend_filled;
        imp["iterative_filled"] = imputed.report.iterative_filled;
        imp["nonconverged_repetitions"] = imputed.report.nonconverged_repetitions;
        imp["degenerate_column_fallbacks"] = imputed.report.degenerate_column_fallbacks;
        imp["max_final_delta"] = imputed.report.max_final_delta;
        imp["cells"] = cells;
        report["imputation"] = {
            {"repetitions", imputed.report.repetitions},
            {"trend_filled", imputed.report.trend_filled},
            {"iterative_filled", imputed.report.iterative_filled},
        };
        write_text(out_dir / "imputation_report.json", imp.dump(2) + "\n");
    });

    CoordinateMatrix coords;
    MatrixXd dist;
    run_stage("transform", [&] {
        coords = ilr_pivot(result.completed);
        dist = aitchison_distance_matrix(result.completed);
    });

    run_stage("rmode", [&] {
        KmeansOptions ko;
        ko.restarts = config.kmeans_restarts;
        ko.seed = mix_seed(config.seed, kSeedKmeans);
        seeds["kmeans"] = ko.seed;
        result.kmeans_result = kmeans(coords.values, config.kmeans_k, ko);

        GmmOptions go;
        go.seed = mix_seed(config.seed, kSeedGmm);
        seeds["gmm"] = go.seed;
        result.gmm_result = gmm_em(coords.values, config.kmeans_k, go);

        result.rmode_divisive = divisive_hierarchical(dist, result.row_ids);

        const std::size_t k_max =
            std::min(config.diagnostics_k_max, result.row_ids.size() - 1);
        result.diagnostics_curve =
            diagnostics(coords.values, config.diagnostics_k_min, k_max, ko);

        ordered_json diag = ordered_json::array();
        for (const auto& e : result.diagnostics_curve.entries) {
            diag.push_back({{"k", e.k}, {"wss", e.wss}, {"silhouette", e.silhouette}});
        }
        MatrixXd dist_euclid = dist;  // Aitchison == Euclidean on ilr coords
        report["rmode"] = {
            {"kmeans",
             {{"k", config.kmeans_k},
              {"labels", result.kmeans_result.labels},
              {"wss", result.kmeans_result.objective},
              {"silhouette", mean_silhouette(dist_euclid, result.kmeans_result.labels)},
              {"empty_cluster_repairs", result.kmeans_result.empty_cluster_repairs}}},
            {"gmm",
             {{"k", config.kmeans_k},
              {"labels", result.gmm_result.assignment.labels},
              {"log_likelihood", result.gmm_result.log_likelihood},
              {"bic", result.gmm_result.bic},
              {"covariance_model",
               result.gmm_result.model == GmmCovarianceModel::Full ? "full" : "diagonal"},
              {"regularizations", result.gmm_result.regularizations}}},
            {"divisive", json_dendrogram(result.rmode_divisive)},
            {"diagnostics", diag},
            {"headline", "kmeans"},
        };

        CsvTable assignments;
        assignments.header = {"#", "entity_id", "cluster"};
        for (std::size_t i = 0; i < result.row_ids.size(); ++i) {
            assignments.rows.push_back({std::to_string(i + 1), result.row_ids[i],
                                        std::to_string(result.kmeans_result.labels[i])});
        }
        write_csv((out_dir / "assignments.csv").string(), assignments);
    });

    run_stage("tsne", [&] {
        if (!config.tsne_enabled) {
            report["tsne"] = {{"enabled", false}};
            return;
        }
        TsneOptions to;
        to.learning_rate = config.tsne_learning_rate;
        to.iterations = config.tsne_iterations;
        to.early_exaggeration = config.tsne_early_exaggeration;
        to.exaggeration_iters = config.tsne_exaggeration_iters;
        to.seed = mix_seed(config.seed, kSeedTsne);
        seeds["tsne"] = to.seed;
        const auto aff = affinities(dist, config.tsne_perplexity);
        result.tsne = tsne_embed(aff, to);
        report["tsne"] = {
            {"enabled", true},
            {"perplexity", config.tsne_perplexity},
            {"learning_rate", to.learning_rate},
            {"iterations", to.iterations},
            {"kl_divergence", result.tsne->kl},
            {"kl_trace", result.tsne->kl_trace},
            {"embedding", json_matrix(result.tsne->y)},
        };
        write_text(out_dir / "tsne.svg",
                   render_scatter_svg(result.tsne->y, result.row_ids,
                                      result.kmeans_result.labels, "t-SNE embedding"));
    });

    run_stage("qmode", [&] {
        const std::uint64_t qseed = mix_seed(config.seed, kSeedQmode);
        seeds["qmode"] = qseed;
        result.qmode_variation = variation_matrix_robust(result.completed, qseed);
        result.qmode_dendrogram = qmode_ward(result.qmode_variation);
        result.qmode_cut = result.qmode_dendrogram.cut(config.qmode_k);

        CsvTable vm;
        vm.header.push_back("component");
        for (const auto& label : result.component_labels) vm.header.push_back(label);
        for (std::size_t i = 0; i < result.component_labels.size(); ++i) {
            std::vector<std::string> row{result.component_labels[i]};
            for (std::size_t j = 0; j < result.component_labels.size(); ++j) {
                row.push_back(format_value(result.qmode_variation.t(
                    static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
            }
            vm.rows.push_back(row);
        }
        write_csv((out_dir / "variation_matrix.csv").string(), vm);
        write_text(out_dir / "qmode_dendrogram.svg",
                   render_dendrogram_svg(result.qmode_dendrogram,
                                         "Component clustering (Ward on robust variation)"));

        ordered_json clusters_json = ordered_json::array();
        ordered_json pca_json = ordered_json::array();
        for (std::size_t k = 1; k <= config.qmode_k; ++k) {
            std::vector<std::size_t> members;
            for (std::size_t j = 0; j < result.qmode_cut.size(); ++j) {
                if (result.qmode_cut[j] == static_cast<int>(k)) members.push_back(j);
            }
            ordered_json cj;
            cj["cluster"] = k;
            std::vector<std::string> names;
            for (std::size_t j : members) names.push_back(result.component_labels[j]);
            cj["components"] = names;
            clusters_json.push_back(cj);

            if (members.size() < 2) {
                result.qmode_skipped.push_back(static_cast<int>(k));
                continue;
            }

            CompositionTable sub;
            sub.row_ids = result.row_ids;
            sub.values.resize(result.completed.values.rows(),
                              static_cast<Eigen::Index>(members.size()));
            for (std::size_t j = 0; j < members.size(); ++j) {
                sub.values.col(static_cast<Eigen::Index>(j)) =
                    result.completed.values.col(static_cast<Eigen::Index>(members[j]));
                sub.component_labels.push_back(result.component_labels[members[j]]);
            }
            sub = closure(sub);

            const CoordinateMatrix sub_coords = ilr_pivot(sub);
            const std::uint64_t pca_seed = mix_seed(config.seed, kSeedPcaBase + k);
            seeds["pca_cluster" + std::to_string(k)] = pca_seed;
            PcaSelection sel = select_pca(sub_coords, pca_seed);

            QmodePcaReport rep;
            rep.cluster_index = static_cast<int>(k);
            rep.components = sub.component_labels;
            rep.ratio_classical = sel.ratio_classical;
            rep.ratio_robust = sel.ratio_robust;
            rep.selected = sel.chosen.method;
            rep.model = sel.chosen;

            pca_json.push_back({
                {"cluster", k},
                {"components", sub.component_labels},
                {"ratio_classical", sel.ratio_classical},
                {"ratio_robust", sel.ratio_robust},
                {"selected", method_name(sel.chosen.method)},
                {"explained_ratio_2pc", sel.chosen.explained_ratio_2pc},
                {"variances", json_vector(sel.chosen.variances)},
                {"loadings_clr", json_matrix(sel.chosen.loadings_clr)},
                {"scores", json_matrix(sel.chosen.scores)},
            });

            std::vector<std::string> numbers;
            for (std::size_t i = 0; i < result.row_ids.size(); ++i) {
                numbers.push_back(std::to_string(i + 1));
            }
            write_text(out_dir / ("biplot_cluster" + std::to_string(k) + ".svg"),
                       render_biplot_svg(rep.model, numbers, rep.components,
                                         "Variable cluster " + std::to_string(k) + " (" +
                                             method_name(rep.selected) + ")"));
            result.qmode_pca.push_back(std::move(rep));
        }

        report["qmode"] = {
            {"variation_method", "robust"},
            {"cut_k", config.qmode_k},
            {"dendrogram", json_dendrogram(result.qmode_dendrogram)},
            {"clusters", clusters_json},
            {"pca", pca_json},
        };
    });

    result.ok = std::all_of(result.stages.begin(), result.stages.end(),
                            [](const StageStatus& s) { return s.ok; });

    ordered_json stages_json = ordered_json::array();
    for (const auto& s : result.stages) {
        stages_json.push_back({{"name", s.name}, {"ok", s.ok}, {"error", s.error}});
    }
    report["stages"] = stages_json;
    report["provenance"]["seeds"] = seeds;
    write_text(out_dir / "report.json", report.dump(2) + "\n");
    return result;
}

}  // namespace coda
