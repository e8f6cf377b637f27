#include <cmath>

#include "coda/geometry.hpp"
#include "coda/rng.hpp"
#include "doctest.h"

using namespace coda;

namespace {

Composition random_composition(Rng& rng, std::size_t dim) {
    VectorXd v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = std::exp(rng.normal(0.0, 1.5));
    return closure(v);
}

CompositionTable random_table(Rng& rng, std::size_t n, std::size_t dim) {
    CompositionTable t;
    t.values.resize(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        t.row_ids.push_back("r" + std::to_string(i));
        for (std::size_t j = 0; j < dim; ++j) {
            t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::exp(rng.normal(0.0, 1.0));
        }
    }
    for (std::size_t j = 0; j < dim; ++j) t.component_labels.push_back("c" + std::to_string(j));
    return t;
}

}  // namespace

TEST_CASE("closure normalizes and preserves ratios") {
    VectorXd v(2);
    v << 2.0, 2.0;
    auto c = closure(v);
    CHECK(c.parts[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.parts[1] == doctest::Approx(0.5).epsilon(1e-14));

    VectorXd w(3);
    w << 1.0, 2.0, 4.0;
    auto cw = closure(w);
    CHECK(cw.parts[0] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
    CHECK(cw.parts[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(cw.parts[2] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(cw.parts.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("closure is idempotent") {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = random_composition(rng, 5);
        auto cc = closure(c);
        CHECK((cc.parts - c.parts).lpNorm<Eigen::Infinity>() < 1e-15);
    }
}

TEST_CASE("closure rejects non-positive parts with index") {
    VectorXd v(3);
    v << 1.0, 0.0, 2.0;
    try {
        closure(v);
        FAIL("expected NonPositivePartError");
    } catch (const NonPositivePartError& e) {
        CHECK(e.index == 1);
    }
    v << 1.0, 2.0, -3.0;
    CHECK_THROWS_AS(closure(v), NonPositivePartError);
}

TEST_CASE("clr of equal parts is zero") {
    VectorXd v(3);
    v << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    CHECK(clr(closure(v)).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("clr of (1,2,4) is (-ln2, 0, ln2)") {
    VectorXd v(3);
    v << 1.0, 2.0, 4.0;
    const VectorXd z = clr(closure(v));
    CHECK(z[0] == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z[2] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("clr is scale invariant and sums to zero") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 2 + rng.uniform_index(14);
        VectorXd v(dim);
        for (std::size_t i = 0; i < dim; ++i)
            v[static_cast<Eigen::Index>(i)] = std::exp(rng.normal(0.0, 2.0));
        const double lambda = std::exp(rng.normal(0.0, 2.0));
        const VectorXd a = clr(closure(v));
        const VectorXd b = clr(closure(VectorXd(lambda * v)));
        CHECK(std::abs(a.sum()) < 1e-10);
        CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("ilr pivot basis is orthonormal with zero-sum columns") {
    for (std::size_t dim : {2, 3, 7, 15}) {
        const MatrixXd v = ilr_pivot_basis(dim);
        const MatrixXd gram = v.transpose() * v;
        CHECK((gram - MatrixXd::Identity(dim - 1, dim - 1)).lpNorm<Eigen::Infinity>() < 1e-12);
        for (Eigen::Index j = 0; j < v.cols(); ++j) CHECK(std::abs(v.col(j).sum()) < 1e-12);
    }
}

TEST_CASE("ilr pivot matches the contrast-matrix route") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = 2 + rng.uniform_index(10);
        auto c = random_composition(rng, dim);
        const VectorXd direct = ilr_pivot(c);
        const VectorXd via_basis = ilr_pivot_basis(dim).transpose() * clr(c);
        CHECK((direct - via_basis).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("ilr of D=2 composition (e,1)") {
    VectorXd v(2);
    v << std::exp(1.0), 1.0;
    const VectorXd z = ilr_pivot(closure(v));
    CHECK(z.size() == 1);
    CHECK(z[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("ilr of equal parts is zero") {
    for (std::size_t dim : {2, 5, 9}) {
        VectorXd v = VectorXd::Constant(static_cast<Eigen::Index>(dim), 1.0 / static_cast<double>(dim));
        CHECK(ilr_pivot(closure(v)).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("ilr is an isometry for Aitchison distance") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 2 + rng.uniform_index(14);
        auto a = random_composition(rng, dim);
        auto b = random_composition(rng, dim);
        const double d_ilr = (ilr_pivot(a) - ilr_pivot(b)).norm();
        const double d_ait = aitchison_distance(a, b);
        CHECK(std::abs(d_ilr - d_ait) < 1e-10);
    }
}

TEST_CASE("ilr inverse round-trips") {
    Rng rng(5);
    SUBCASE("zero vector gives equal parts") {
        const VectorXd z = VectorXd::Zero(3);
        const VectorXd p = ilr_inverse_parts(z);
        CHECK((p.array() - 0.25).abs().maxCoeff() < 1e-14);
    }
    SUBCASE("inverse of the D=2 example") {
        VectorXd z(1);
        z << std::sqrt(0.5);
        const VectorXd p = ilr_inverse_parts(z);
        VectorXd expected(2);
        expected << std::exp(1.0), 1.0;
        expected /= expected.sum();
        CHECK((p - expected).lpNorm<Eigen::Infinity>() < 1e-12);
    }
    SUBCASE("random round trips") {
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t dim = 2 + rng.uniform_index(12);
            auto c = random_composition(rng, dim);
            const VectorXd back = ilr_inverse_parts(ilr_pivot(c));
            CHECK(((back - c.parts).array().abs() / c.parts.array()).maxCoeff() < 1e-10);
        }
    }
    SUBCASE("basis mismatch is rejected") {
        VectorXd z(3);
        z << 0.1, 0.2, 0.3;
        CHECK_THROWS_AS(ilr_inverse(z, {"a", "b"}), BasisMismatchError);
    }
}

TEST_CASE("alr round-trips") {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = random_composition(rng, 6);
        auto back = alr_inverse(alr(c), c.labels);
        CHECK(((back.parts - c.parts).array().abs() / c.parts.array()).maxCoeff() < 1e-10);
    }
}

TEST_CASE("aitchison distance properties") {
    Rng rng(7);
    auto a = random_composition(rng, 4);
    CHECK(aitchison_distance(a, a) == doctest::Approx(0.0).epsilon(1e-15));

    auto b = random_composition(rng, 4);
    auto scaled = Composition{3.7 * a.parts, a.labels};
    CHECK(aitchison_distance(a, b) ==
          doctest::Approx(aitchison_distance(closure(scaled), b)).epsilon(1e-12));

    VectorXd u(3), w(3);
    u << 1.0, 2.0, 4.0;
    w << 1.0, 1.0, 1.0;
    const double d = aitchison_distance(closure(u), closure(w));
    CHECK(d == doctest::Approx(std::sqrt(2.0) * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("aitchison distance rejects label mismatch") {
    VectorXd v(2);
    v << 1.0, 2.0;
    auto a = closure(v, {"x", "y"});
    auto b = closure(v, {"x", "z"});
    CHECK_THROWS_AS(aitchison_distance(a, b), LabelMismatchError);
}

TEST_CASE("center of a table") {
    SUBCASE("single row returns that row closed") {
        CompositionTable t;
        t.values.resize(1, 3);
        t.values << 2.0, 4.0, 2.0;
        t.row_ids = {"a"};
        t.component_labels = {"x", "y", "z"};
        auto c = center(t);
        CHECK(c.parts[0] == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(c.parts[1] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("two rows (1,4),(4,1) give (0.5,0.5)") {
        CompositionTable t;
        t.values.resize(2, 2);
        t.values << 1.0, 4.0, 4.0, 1.0;
        t.row_ids = {"a", "b"};
        t.component_labels = {"x", "y"};
        t = closure(t);
        auto c = center(t);
        CHECK(c.parts[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(c.parts[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("row permutation invariance") {
        Rng rng(8);
        auto t = random_table(rng, 6, 4);
        auto c1 = center(t);
        CompositionTable t2 = t;
        t2.values.row(0).swap(t2.values.row(5));
        t2.values.row(1).swap(t2.values.row(3));
        auto c2 = center(t2);
        CHECK((c1.parts - c2.parts).lpNorm<Eigen::Infinity>() < 1e-14);
    }
}

TEST_CASE("classical variation matrix") {
    SUBCASE("proportional rows give the zero matrix") {
        CompositionTable t;
        t.values.resize(3, 4);
        VectorXd base(4);
        base << 1.0, 2.0, 3.0, 4.0;
        t.values.row(0) = base.transpose();
        t.values.row(1) = 2.0 * base.transpose();
        t.values.row(2) = 0.5 * base.transpose();
        t.row_ids = {"a", "b", "c"};
        t.component_labels = {"w", "x", "y", "z"};
        auto vm = variation_matrix_classical(t);
        CHECK(vm.t.lpNorm<Eigen::Infinity>() < 1e-12);
    }
    SUBCASE("hand-computed 2x2 case") {
        CompositionTable t;
        t.values.resize(2, 2);
        t.values << 1.0, 1.0, 1.0, std::exp(2.0);
        t.row_ids = {"a", "b"};
        t.component_labels = {"x", "y"};
        auto vm = variation_matrix_classical(t);
        CHECK(vm.t(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(vm.t(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(vm.t(0, 0) == 0.0);
    }
    SUBCASE("row permutation invariance") {
        Rng rng(9);
        auto t = random_table(rng, 8, 5);
        auto v1 = variation_matrix_classical(t);
        CompositionTable t2 = t;
        t2.values.row(2).swap(t2.values.row(7));
        auto v2 = variation_matrix_classical(t2);
        CHECK((v1.t - v2.t).lpNorm<Eigen::Infinity>() < 1e-12);
    }
    SUBCASE("brute-force per-pair oracle") {
        Rng rng(10);
        auto t = random_table(rng, 12, 6);
        auto vm = variation_matrix_classical(t);
        for (Eigen::Index j = 0; j < 6; ++j) {
            for (Eigen::Index k = 0; k < 6; ++k) {
                std::vector<double> z;
                for (Eigen::Index i = 0; i < 12; ++i)
                    z.push_back(std::log(t.values(i, j) / t.values(i, k)));
                double mean = 0.0;
                for (double v : z) mean += v;
                mean /= static_cast<double>(z.size());
                double var = 0.0;
                for (double v : z) var += (v - mean) * (v - mean);
                var /= static_cast<double>(z.size() - 1);
                CHECK(vm.t(j, k) == doctest::Approx(var).epsilon(1e-12));
            }
        }
    }
    SUBCASE("insufficient rows rejected") {
        CompositionTable t;
        t.values.resize(1, 2);
        t.values << 1.0, 2.0;
        t.row_ids = {"a"};
        t.component_labels = {"x", "y"};
        CHECK_THROWS_AS(variation_matrix_classical(t), InsufficientRowsError);
    }
}

TEST_CASE("component permutation equivariance") {
    Rng rng(11);
    auto t = random_table(rng, 10, 5);
    std::vector<Eigen::Index> perm = {3, 0, 4, 1, 2};

    CompositionTable tp = t;
    for (std::size_t j = 0; j < 5; ++j) {
        tp.values.col(static_cast<Eigen::Index>(j)) = t.values.col(perm[j]);
        tp.component_labels[j] = t.component_labels[static_cast<std::size_t>(perm[j])];
    }

    const CoordinateMatrix c = clr(t), cp = clr(tp);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK((cp.values.col(static_cast<Eigen::Index>(j)) - c.values.col(perm[j]))
                  .lpNorm<Eigen::Infinity>() < 1e-12);
    }

    const auto v = variation_matrix_classical(t), vp = variation_matrix_classical(tp);
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(vp.t(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) ==
                  doctest::Approx(v.t(perm[j], perm[k])).epsilon(1e-12));
        }
    }
}
