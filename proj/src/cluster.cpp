#include "coda/cluster.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "coda/rng.hpp"

namespace coda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double sq_dist(const MatrixXd& coords, Eigen::Index i, const VectorXd& center) {
    return (coords.row(i).transpose() - center).squaredNorm();
}

std::vector<VectorXd> kmeanspp_init(const MatrixXd& coords, std::size_t k, Rng& rng) {
    const auto n = coords.rows();
    std::vector<VectorXd> centers;
    centers.reserve(k);
    centers.push_back(coords.row(static_cast<Eigen::Index>(rng.uniform_index(
        static_cast<std::size_t>(n)))).transpose());
    VectorXd d2(n);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = sq_dist(coords, i, centers[0]);
    while (centers.size() < k) {
        const double total = d2.sum();
        if (total <= 0.0) {
            // all remaining points coincide with a center; pick uniformly
            centers.push_back(coords.row(static_cast<Eigen::Index>(rng.uniform_index(
                static_cast<std::size_t>(n)))).transpose());
        } else {
            double target = rng.uniform() * total;
            Eigen::Index pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[i];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
            centers.push_back(coords.row(pick).transpose());
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(coords, i, centers.back()));
        }
    }
    return centers;
}

struct LloydRun {
    std::vector<int> labels;  // 0-based here
    double wss = kInf;
    std::vector<double> trace;
    std::size_t repairs = 0;
};

LloydRun lloyd(const MatrixXd& coords, std::size_t k, Rng& rng, std::size_t max_iterations) {
    const auto n = coords.rows();
    std::vector<VectorXd> centers = kmeanspp_init(coords, k, rng);
    LloydRun run;
    run.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> prev(static_cast<std::size_t>(n), -1);

    for (std::size_t it = 0; it < max_iterations; ++it) {
        // assignment; ties go to the lowest cluster index
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = kInf;
            int arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_dist(coords, i, centers[c]);
                if (d < best) {
                    best = d;
                    arg = static_cast<int>(c);
                }
            }
            run.labels[static_cast<std::size_t>(i)] = arg;
        }
        // empty-cluster repair: farthest point becomes the missing center
        for (std::size_t c = 0; c < k; ++c) {
            if (std::count(run.labels.begin(), run.labels.end(), static_cast<int>(c)) > 0) continue;
            double far = -1.0;
            Eigen::Index pick = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = sq_dist(coords, i,
                                         centers[static_cast<std::size_t>(
                                             run.labels[static_cast<std::size_t>(i)])]);
                if (d > far) {
                    far = d;
                    pick = i;
                }
            }
            run.labels[static_cast<std::size_t>(pick)] = static_cast<int>(c);
            centers[c] = coords.row(pick).transpose();
            ++run.repairs;
        }
        // update
        std::vector<VectorXd> sums(k, VectorXd::Zero(coords.cols()));
        std::vector<std::size_t> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])] +=
                coords.row(i).transpose();
            ++counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) centers[c] = sums[c] / static_cast<double>(counts[c]);
        }
        double wss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            wss += sq_dist(coords, i,
                           centers[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])]);
        }
        run.wss = wss;
        run.trace.push_back(wss);
        if (run.labels == prev) break;
        prev = run.labels;
    }
    return run;
}

}  // namespace

ClusterAssignment kmeans(const MatrixXd& coords, std::size_t k, const KmeansOptions& options) {
    const auto n = static_cast<std::size_t>(coords.rows());
    if (k < 1 || k > n) throw DimensionError("kmeans needs 1 <= K <= n");
    LloydRun best;
    for (std::size_t r = 0; r < options.restarts; ++r) {
        Rng rng(mix_seed(options.seed, r));
        LloydRun run = lloyd(coords, k, rng, options.max_iterations);
        if (run.wss < best.wss) best = std::move(run);
    }
    ClusterAssignment out;
    out.k = k;
    out.method = "kmeans";
    out.objective = best.wss;
    out.trace = std::move(best.trace);
    out.empty_cluster_repairs = best.repairs;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = best.labels[i] + 1;
    return out;
}

std::vector<double> silhouette_values(const MatrixXd& dist, const std::vector<int>& labels) {
    const auto n = static_cast<std::size_t>(dist.rows());
    std::set<int> ks(labels.begin(), labels.end());
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int own = labels[i];
        double a = 0.0;
        std::size_t own_count = 0;
        double b = kInf;
        for (int c : ks) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (labels[j] != c || j == i) continue;
                sum += dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                ++count;
            }
            if (c == own) {
                a = count > 0 ? sum / static_cast<double>(count) : 0.0;
                own_count = count;
            } else if (count > 0) {
                b = std::min(b, sum / static_cast<double>(count));
            }
        }
        if (own_count == 0 || !std::isfinite(b)) {
            s[i] = 0.0;  // singleton convention
        } else {
            s[i] = (b - a) / std::max(a, b);
        }
    }
    return s;
}

double mean_silhouette(const MatrixXd& dist, const std::vector<int>& labels) {
    const auto vals = silhouette_values(dist, labels);
    return std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
}

DiagnosticsCurve diagnostics(const MatrixXd& coords, std::size_t k_min, std::size_t k_max,
                             const KmeansOptions& options) {
    const auto n = static_cast<std::size_t>(coords.rows());
    if (k_min < 2 || k_max >= n || k_min > k_max) {
        throw DimensionError("diagnostics needs 2 <= k_min <= k_max <= n-1");
    }
    MatrixXd dist(coords.rows(), coords.rows());
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        for (Eigen::Index j = 0; j < coords.rows(); ++j) {
            dist(i, j) = (coords.row(i) - coords.row(j)).norm();
        }
    }
    DiagnosticsCurve curve;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        auto a = kmeans(coords, k, options);
        curve.entries.push_back({k, a.objective, mean_silhouette(dist, a.labels)});
    }
    return curve;
}

std::vector<int> Dendrogram::cut(std::size_t k) const {
    const std::size_t n = leaves();
    if (k < 1 || k > n) throw DimensionError("cut needs 1 <= K <= number of leaves");
    // union-find over the first n-k merges
    std::vector<std::size_t> parent(n + merges.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t m = 0; m + k < n; ++m) {
        const std::size_t target = n + m;
        parent[find(merges[m].left)] = target;
        parent[find(merges[m].right)] = target;
    }
    std::vector<int> labels(n, 0);
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            labels[i] = static_cast<int>(roots.size());
        } else {
            labels[i] = static_cast<int>(it - roots.begin()) + 1;
        }
    }
    return labels;
}

namespace {

double cluster_diameter(const MatrixXd& dist, const std::vector<std::size_t>& members) {
    double d = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            d = std::max(d, dist(static_cast<Eigen::Index>(members[a]),
                                 static_cast<Eigen::Index>(members[b])));
        }
    }
    return d;
}

double avg_dissim(const MatrixXd& dist, std::size_t obj, const std::vector<std::size_t>& group) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t g : group) {
        if (g == obj) continue;
        sum += dist(static_cast<Eigen::Index>(obj), static_cast<Eigen::Index>(g));
        ++count;
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

struct DivisiveNode {
    std::vector<std::size_t> members;
    double height = 0.0;       // diameter at the split
    int left = -1, right = -1; // child node indices, -1 for unsplit
};

}  // namespace

Dendrogram divisive_hierarchical(const MatrixXd& dist, const std::vector<std::string>& labels) {
    const auto n = static_cast<std::size_t>(dist.rows());
    if (dist.rows() != dist.cols()) throw DimensionError("distance matrix must be square");

    std::vector<DivisiveNode> nodes;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    nodes.push_back({all, 0.0, -1, -1});
    std::vector<std::size_t> active = {0};  // indices of splittable nodes

    while (!active.empty()) {
        // split the cluster with the largest diameter
        std::size_t pick = 0;
        double best = -1.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const double d = cluster_diameter(dist, nodes[active[a]].members);
            if (d > best) {
                best = d;
                pick = a;
            }
        }
        const std::size_t node_id = active[pick];
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(pick));
        auto& node = nodes[node_id];
        node.height = best;

        // splinter seed: maximal average dissimilarity to the rest
        std::vector<std::size_t> rest = node.members;
        double seed_score = -1.0;
        std::size_t seed_pos = 0;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            const double s = avg_dissim(dist, rest[i], rest);
            if (s > seed_score) {
                seed_score = s;
                seed_pos = i;
            }
        }
        std::vector<std::size_t> splinter = {rest[seed_pos]};
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(seed_pos));

        // migrate objects with positive attraction difference
        while (rest.size() > 1) {
            double best_diff = 0.0;
            std::ptrdiff_t best_pos = -1;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                const double diff =
                    avg_dissim(dist, rest[i], rest) - avg_dissim(dist, rest[i], splinter);
                if (diff > best_diff) {
                    best_diff = diff;
                    best_pos = static_cast<std::ptrdiff_t>(i);
                }
            }
            if (best_pos < 0) break;
            splinter.push_back(rest[static_cast<std::size_t>(best_pos)]);
            rest.erase(rest.begin() + best_pos);
        }

        std::sort(splinter.begin(), splinter.end());
        std::sort(rest.begin(), rest.end());
        node.left = static_cast<int>(nodes.size());
        nodes.push_back({splinter, 0.0, -1, -1});
        node.right = static_cast<int>(nodes.size());
        nodes.push_back({rest, 0.0, -1, -1});
        if (splinter.size() > 1) active.push_back(static_cast<std::size_t>(node.left));
        if (rest.size() > 1) active.push_back(static_cast<std::size_t>(node.right));
    }

    // Convert the split tree to merge records, children before parents.
    // Diameters shrink down the tree, so sorting internal nodes by height
    // (ties by deeper-first construction order) yields a valid sequence.
    std::vector<std::size_t> internal;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].left >= 0) internal.push_back(i);
    }
    std::stable_sort(internal.begin(), internal.end(), [&](std::size_t a, std::size_t b) {
        if (nodes[a].height != nodes[b].height) return nodes[a].height < nodes[b].height;
        return a > b;  // deeper nodes were created later
    });

    Dendrogram dg;
    dg.method = "divisive";
    dg.leaf_labels = labels;
    if (dg.leaf_labels.empty()) {
        for (std::size_t i = 0; i < n; ++i) dg.leaf_labels.push_back(std::to_string(i));
    }
    // map node id -> dendrogram id (leaf index or n + merge index)
    std::vector<std::size_t> dendro_id(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].left < 0) dendro_id[i] = nodes[i].members[0];
    }
    for (std::size_t rank = 0; rank < internal.size(); ++rank) {
        const std::size_t id = internal[rank];
        dendro_id[id] = n + rank;
        dg.merges.push_back({dendro_id[static_cast<std::size_t>(nodes[id].left)],
                             dendro_id[static_cast<std::size_t>(nodes[id].right)],
                             nodes[id].height, nodes[id].members.size()});
    }
    return dg;
}

Dendrogram qmode_ward(const VariationMatrix& varmat) {
    const auto D = static_cast<std::size_t>(varmat.t.rows());
    if (varmat.t.rows() != varmat.t.cols()) throw DimensionError("variation matrix must be square");

    // Lance-Williams recursion on the entries used as squared dissimilarities.
    MatrixXd d2 = varmat.t;
    std::vector<std::size_t> size(D, 1), id(D);
    std::iota(id.begin(), id.end(), 0);
    std::vector<bool> alive(D, true);

    Dendrogram dg;
    dg.method = "ward";
    dg.leaf_labels = varmat.component_labels;
    if (dg.leaf_labels.empty()) {
        for (std::size_t i = 0; i < D; ++i) dg.leaf_labels.push_back("v" + std::to_string(i));
    }

    for (std::size_t m = 0; m + 1 < D; ++m) {
        double best = kInf;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < D; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < D; ++j) {
                if (!alive[j]) continue;
                if (d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < best) {
                    best = d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    bi = i;
                    bj = j;
                }
            }
        }
        const double ni = static_cast<double>(size[bi]);
        const double nj = static_cast<double>(size[bj]);
        for (std::size_t k = 0; k < D; ++k) {
            if (!alive[k] || k == bi || k == bj) continue;
            const double nk = static_cast<double>(size[k]);
            const double dik = d2(static_cast<Eigen::Index>(bi), static_cast<Eigen::Index>(k));
            const double djk = d2(static_cast<Eigen::Index>(bj), static_cast<Eigen::Index>(k));
            const double upd =
                ((ni + nk) * dik + (nj + nk) * djk - nk * best) / (ni + nj + nk);
            d2(static_cast<Eigen::Index>(bi), static_cast<Eigen::Index>(k)) = upd;
            d2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(bi)) = upd;
        }
        dg.merges.push_back({id[bi], id[bj], best, size[bi] + size[bj]});
        id[bi] = D + m;
        size[bi] += size[bj];
        alive[bj] = false;
    }
    return dg;
}

namespace {

double log_mvn_pdf_full(const VectorXd& x, const VectorXd& mean, const Eigen::LLT<MatrixXd>& llt,
                        double log_det) {
    const auto d = static_cast<double>(x.size());
    const VectorXd diff = x - mean;
    const double maha = diff.dot(llt.solve(diff));
    return -0.5 * (d * kLog2Pi + log_det + maha);
}

}  // namespace

GmmModel gmm_em(const MatrixXd& coords, std::size_t k, const GmmOptions& options) {
    const auto n = static_cast<std::size_t>(coords.rows());
    const auto dim = static_cast<std::size_t>(coords.cols());
    if (k < 1 || k > n) throw DimensionError("gmm needs 1 <= K <= n");

    GmmModel model;
    model.model = (options.allow_diagonal_fallback && n < 2 * dim * k)
                      ? GmmCovarianceModel::Diagonal
                      : GmmCovarianceModel::Full;

    // responsibilities initialized from a short k-means pass
    KmeansOptions ko;
    ko.restarts = 10;
    ko.seed = mix_seed(options.seed, 0x67);
    const auto init = kmeans(coords, k, ko);
    MatrixXd resp = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < n; ++i) {
        resp(static_cast<Eigen::Index>(i), init.labels[i] - 1) = 1.0;
    }

    std::vector<double> weights(k, 0.0);
    std::vector<VectorXd> means(k, VectorXd::Zero(static_cast<Eigen::Index>(dim)));
    std::vector<MatrixXd> covs(
        k, MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));

    auto m_step = [&]() {
        for (std::size_t c = 0; c < k; ++c) {
            const double nc = resp.col(static_cast<Eigen::Index>(c)).sum();
            weights[c] = nc / static_cast<double>(n);
            VectorXd mu = VectorXd::Zero(static_cast<Eigen::Index>(dim));
            for (std::size_t i = 0; i < n; ++i) {
                mu += resp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) *
                      coords.row(static_cast<Eigen::Index>(i)).transpose();
            }
            mu /= std::max(nc, 1e-300);
            MatrixXd cov = MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim));
            for (std::size_t i = 0; i < n; ++i) {
                const VectorXd d = coords.row(static_cast<Eigen::Index>(i)).transpose() - mu;
                cov += resp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) *
                       (d * d.transpose());
            }
            cov /= std::max(nc, 1e-300);
            if (model.model == GmmCovarianceModel::Diagonal) {
                cov = cov.diagonal().asDiagonal();
            }
            means[c] = mu;
            covs[c] = cov;
        }
    };

    m_step();

    double prev_ll = -kInf;
    std::vector<double> trace;
    std::vector<Eigen::LLT<MatrixXd>> llts(k);
    std::vector<double> log_dets(k, 0.0);

    auto prepare_components = [&]() {
        for (std::size_t c = 0; c < k; ++c) {
            Eigen::LLT<MatrixXd> llt(covs[c]);
            bool bad = llt.info() != Eigen::Success;
            if (!bad) {
                double log_det = 0.0;
                for (Eigen::Index i = 0; i < covs[c].rows(); ++i) {
                    const double l = llt.matrixLLT()(i, i);
                    if (!(l > 0.0) || !std::isfinite(l)) {
                        bad = true;
                        break;
                    }
                    log_det += 2.0 * std::log(l);
                }
                if (!bad) {
                    llts[c] = llt;
                    log_dets[c] = log_det;
                    continue;
                }
            }
            // covariance collapse: add a trace-scaled ridge and retry
            const double ridge =
                1e-6 * std::max(covs[c].trace(), 1e-12) / static_cast<double>(dim);
            covs[c] += ridge * MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim));
            ++model.regularizations;
            llts[c].compute(covs[c]);
            if (llts[c].info() != Eigen::Success) {
                throw SingularSubsetError("gmm covariance not repairable");
            }
            double log_det = 0.0;
            for (Eigen::Index i = 0; i < covs[c].rows(); ++i) {
                log_det += 2.0 * std::log(llts[c].matrixLLT()(i, i));
            }
            log_dets[c] = log_det;
        }
    };

    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        prepare_components();
        // E-step with log-sum-exp
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            VectorXd logp(static_cast<Eigen::Index>(k));
            for (std::size_t c = 0; c < k; ++c) {
                logp[static_cast<Eigen::Index>(c)] =
                    std::log(std::max(weights[c], 1e-300)) +
                    log_mvn_pdf_full(coords.row(static_cast<Eigen::Index>(i)).transpose(),
                                     means[c], llts[c], log_dets[c]);
            }
            const double mx = logp.maxCoeff();
            const double lse = mx + std::log((logp.array() - mx).exp().sum());
            ll += lse;
            for (std::size_t c = 0; c < k; ++c) {
                resp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                    std::exp(logp[static_cast<Eigen::Index>(c)] - lse);
            }
        }
        trace.push_back(ll);
        if (std::abs(ll - prev_ll) < options.tolerance) {
            prev_ll = ll;
            break;
        }
        prev_ll = ll;
        m_step();
    }

    model.weights = weights;
    model.means = means;
    model.covariances = covs;
    model.log_likelihood = prev_ll;

    const double cov_params = model.model == GmmCovarianceModel::Full
                                  ? static_cast<double>(dim * (dim + 1) / 2)
                                  : static_cast<double>(dim);
    const double n_params =
        static_cast<double>(k) * (static_cast<double>(dim) + cov_params) + (static_cast<double>(k) - 1.0);
    model.bic = -2.0 * prev_ll + n_params * std::log(static_cast<double>(n));

    model.assignment.k = k;
    model.assignment.method = "gmm";
    model.assignment.objective = prev_ll;
    model.assignment.trace = trace;
    model.assignment.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index arg = 0;
        resp.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
        model.assignment.labels[i] = static_cast<int>(arg) + 1;
    }
    return model;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw DimensionError("ari: partitions differ in length");
    const auto n = a.size();
    std::vector<int> ka(a), kb(b);
    std::sort(ka.begin(), ka.end());
    ka.erase(std::unique(ka.begin(), ka.end()), ka.end());
    std::sort(kb.begin(), kb.end());
    kb.erase(std::unique(kb.begin(), kb.end()), kb.end());

    MatrixXd table = MatrixXd::Zero(static_cast<Eigen::Index>(ka.size()),
                                    static_cast<Eigen::Index>(kb.size()));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ra = std::find(ka.begin(), ka.end(), a[i]) - ka.begin();
        const auto rb = std::find(kb.begin(), kb.end(), b[i]) - kb.begin();
        table(ra, rb) += 1.0;
    }
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.cols(); ++j) sum_ij += choose2(table(i, j));
        sum_a += choose2(table.row(i).sum());
    }
    for (Eigen::Index j = 0; j < table.cols(); ++j) sum_b += choose2(table.col(j).sum());
    const double total = choose2(static_cast<double>(n));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // degenerate: both single-cluster
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace coda
