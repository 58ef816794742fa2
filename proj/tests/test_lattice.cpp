#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "randinfo/errors.hpp"
#include "randinfo/lattice.hpp"

namespace lat = randinfo::lat;
namespace pts = randinfo::pts;

namespace {

lat::LatticeBasis diag_basis(const std::vector<double>& d) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return {m};
}

// columns as initializer list of column vectors
lat::LatticeBasis cols_basis(const std::vector<std::vector<double>>& cols) {
    Eigen::MatrixXd m(cols[0].size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].size(); ++i) m(i, j) = cols[j][i];
    return {m};
}

bool same_column_set(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
    if (a.cols() != b.cols()) return false;
    std::vector<bool> used(a.cols(), false);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        bool hit = false;
        for (Eigen::Index k = 0; k < b.cols() && !hit; ++k) {
            if (used[k]) continue;
            if ((a.col(j) - b.col(k)).cwiseAbs().maxCoeff() <= tol ||
                (a.col(j) + b.col(k)).cwiseAbs().maxCoeff() <= tol) {
                used[k] = true;
                hit = true;
            }
        }
        if (!hit) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("Fibonacci numbers and overflow") {
    CHECK(lat::fibonacci(8) == 21);
    CHECK(lat::fibonacci(7) == 13);
    CHECK_THROWS_AS(lat::fibonacci(200), randinfo::Overflow);
}

TEST_CASE("Fibonacci lattice points and basis") {
    const auto fib = lat::fibonacci_lattice(8);
    CHECK(fib.lattice.n == 21);
    REQUIRE(fib.points.size() == 21);
    CHECK(fib.points.coord(0, 0) == 0.0);
    CHECK(fib.points.coord(0, 1) == 0.0);
    CHECK(fib.points.coord(1, 0) == 1.0 / 21.0);
    CHECK(fib.points.coord(1, 1) == 13.0 / 21.0);

    const Eigen::MatrixXd& b = fib.lattice.basis.b;
    CHECK(b(0, 0) == doctest::Approx(1.0 / 21.0).epsilon(1e-15));
    CHECK(b(1, 0) == doctest::Approx(13.0 / 21.0).epsilon(1e-15));
    CHECK(b(0, 1) == 0.0);
    CHECK(b(1, 1) == 1.0);

    // integration lattice: the inverse has integer entries
    const Eigen::MatrixXd inv = b.inverse();
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            CHECK(std::fabs(inv(i, j) - std::round(inv(i, j))) < 1e-9);
}

TEST_CASE("rank-1 generator reproduces the Fibonacci set") {
    const auto fib = lat::fibonacci_lattice(8);
    const auto r1 = lat::rank1_lattice(21, {1, 13});
    REQUIRE(r1.points.size() == fib.points.size());
    for (std::size_t i = 0; i < r1.points.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(r1.points.coord(i, j) == fib.points.coord(i, j));
}

TEST_CASE("rank-1 edge cases") {
    CHECK_THROWS_AS(lat::rank1_lattice(4, {2, 2}), randinfo::PointCountMismatch);
    const auto single = lat::rank1_lattice(1, {0, 0});
    CHECK(single.points.size() == 1);
    CHECK(single.points.coord(0, 0) == 0.0);
    const auto axis = lat::rank1_lattice(4, {1, 0});
    REQUIRE(axis.points.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(axis.points.coord(i, 1) == 0.0);
}

TEST_CASE("dual basis examples and involution") {
    const auto id = diag_basis({1.0, 1.0, 1.0});
    CHECK((lat::dual_basis(id).b - id.b).cwiseAbs().maxCoeff() < 1e-12);

    const auto scaled = diag_basis({0.2, 0.2});
    CHECK((lat::dual_basis(scaled).b - 5.0 * Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    const auto aniso = diag_basis({1.0, 0.125});
    const auto dual = lat::dual_basis(aniso);
    CHECK(dual.b(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dual.b(1, 1) == doctest::Approx(8.0).epsilon(1e-12));

    const auto fib = lat::fibonacci_lattice(8);
    const auto round_trip = lat::dual_basis(lat::dual_basis(fib.lattice.basis));
    CHECK((round_trip.b - fib.lattice.basis.b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dual basis flags near-singular input") {
    CHECK_THROWS_AS(lat::dual_basis(cols_basis({{1.0, 0.0}, {1.0, 1e-13}})),
                    randinfo::NearSingular);
}

TEST_CASE("LLL on the classic 2x2 example") {
    const auto reduced = lat::lll_reduce(cols_basis({{2.0, 0.0}, {1.0, 1.0}}));
    CHECK(same_column_set(reduced.b,
                          cols_basis({{1.0, 1.0}, {1.0, -1.0}}).b, 1e-12));
    // fixed point on reduced input
    const auto again = lat::lll_reduce(reduced);
    CHECK((again.b - reduced.b).cwiseAbs().maxCoeff() < 1e-12);
    // identity untouched
    const auto id = diag_basis({1.0, 1.0, 1.0});
    CHECK((lat::lll_reduce(id).b - id.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LLL output satisfies the size and exchange conditions") {
    randinfo::Rng r(404);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + static_cast<int>(r.next_below(4));
        Eigen::MatrixXd m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = 2.0 * r.next_double() - 1.0;
        if (std::fabs(m.determinant()) < 1e-3) continue;
        const auto red = lat::lll_reduce({m});

        // recompute the orthogonalization and check both conditions
        Eigen::MatrixXd star = red.b;
        Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(d, d);
        Eigen::VectorXd sq(d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < i; ++j) {
                mu(i, j) = red.b.col(i).dot(star.col(j)) / sq(j);
                star.col(i) -= mu(i, j) * star.col(j);
            }
            sq(i) = star.col(i).squaredNorm();
            for (int j = 0; j < i; ++j) CHECK(std::fabs(mu(i, j)) <= 0.5 + 1e-9);
            if (i > 0)
                CHECK(sq(i) >= (0.75 - mu(i, i - 1) * mu(i, i - 1)) * sq(i - 1) - 1e-12);
        }
    }
}

TEST_CASE("certified shortest vectors") {
    const auto cubic = diag_basis({3.0, 3.0, 3.0});
    CHECK(lat::shortest_vector(cubic).norm == doctest::Approx(3.0).epsilon(1e-12));

    const auto fib = lat::fibonacci_lattice(8);
    const auto dual = lat::dual_basis(fib.lattice.basis);
    const auto sv = lat::shortest_vector(dual);
    CHECK(sv.certified);
    CHECK(sv.norm == doctest::Approx(std::sqrt(18.0)).epsilon(1e-12));
    REQUIRE(sv.vector.size() == 2);
    CHECK(sv.vector(0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(sv.vector(1) == doctest::Approx(3.0).epsilon(1e-9));

    const auto aniso = diag_basis({1.0, 5.0, 5.0});
    CHECK(lat::shortest_vector(aniso).norm == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(
        lat::shortest_vector(diag_basis(std::vector<double>(11, 1.0))),
        randinfo::DimensionTooLarge);
}

TEST_CASE("spectral test on the worked examples") {
    for (int d = 1; d <= 4; ++d) {
        for (int m : {2, 5}) {
            const auto grid = diag_basis(std::vector<double>(d, 1.0 / m));
            CHECK(std::fabs(lat::spectral_test(grid) - 1.0 / m) < 1e-12);
        }
    }
    std::vector<double> axes = {1.0, 0.2, 0.2};
    CHECK(std::fabs(lat::spectral_test(diag_basis(axes)) - 1.0) < 1e-12);

    const auto fib = lat::fibonacci_lattice(8);
    CHECK(lat::spectral_test(fib.lattice.basis) ==
          doctest::Approx(1.0 / std::sqrt(18.0)).epsilon(1e-12));
}

TEST_CASE("spectral test is invariant under re-basing") {
    const auto fib = lat::fibonacci_lattice(8);
    const double sigma = lat::spectral_test(fib.lattice.basis);
    CHECK(lat::spectral_test(lat::lll_reduce(fib.lattice.basis)) ==
          doctest::Approx(sigma).epsilon(1e-12));
    // unimodular re-basing: add column 0 to column 1
    Eigen::MatrixXd m = fib.lattice.basis.b;
    m.col(1) += m.col(0);
    CHECK(lat::spectral_test({m}) == doctest::Approx(sigma).epsilon(1e-12));
}

TEST_CASE("fundamental domain diameter") {
    CHECK(lat::fundamental_domain_diameter(diag_basis({1.0, 1.0})) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(lat::fundamental_domain_diameter(diag_basis({0.3, 0.4})) ==
          doctest::Approx(0.5).epsilon(1e-12));

    const auto fib = lat::fibonacci_lattice(8);
    const auto red = lat::lll_reduce(fib.lattice.basis);
    const double diam = lat::fundamental_domain_diameter(red);
    CHECK(diam == doctest::Approx(std::sqrt(65.0) / 21.0).epsilon(1e-9));
    const double sigma = lat::spectral_test(fib.lattice.basis);
    CHECK(diam <= 2.0 * 2.0 * sigma);  // d 2^(d-1) sigma with d = 2
}

TEST_CASE("Minkowski-style lower bound") {
    for (int n : {1, 2, 10, 100})
        CHECK(lat::minkowski_lower_bound(1, n) ==
              doctest::Approx(1.0 / n).epsilon(1e-12));
    CHECK(lat::minkowski_lower_bound(2, 21) ==
          doctest::Approx(0.19339056994301276).epsilon(1e-9));

    // never exceeds the spectral test on a few integration lattices
    for (auto [n, z1, z2] : std::vector<std::array<long long, 3>>{
             {8, 1, 3}, {13, 1, 5}, {21, 1, 13}, {34, 1, 21}}) {
        const auto lp = lat::rank1_lattice(static_cast<std::uint64_t>(n), {z1, z2});
        CHECK(lat::minkowski_lower_bound(2, static_cast<std::uint64_t>(n)) <=
              lat::spectral_test(lp.lattice.basis) + 1e-12);
    }
}

TEST_CASE("hyperplane section witness") {
    // Z x (1/m)Z^2: every point sits on the plane x_1 = 0
    const auto aniso = diag_basis({1.0, 0.25, 0.25});
    const auto points = lat::lattice_point_set(aniso);
    CHECK(points.size() == 16);
    const auto w = lat::hyperplane_section_witness(aniso, points);
    CHECK(w.fraction == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.level == 0);

    const auto fib = lat::fibonacci_lattice(8);
    const auto wf = lat::hyperplane_section_witness(fib.lattice.basis, fib.points);
    // level counts over <(3,3), x_i>: {0:1, 1:2, 2:5, 3:6, 4:5, 5:2}
    CHECK(wf.fraction == doctest::Approx(6.0 / 21.0).epsilon(1e-12));
    CHECK(wf.level == 3);
    CHECK(wf.dual_vector(0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(wf.dual_vector(1) == doctest::Approx(3.0).epsilon(1e-9));
    const double sigma = lat::spectral_test(fib.lattice.basis);
    CHECK(wf.fraction >= sigma / (std::sqrt(2.0) + sigma) - 1e-9);
}

TEST_CASE("discrepancy sandwich bounds") {
    const auto fib = lat::fibonacci_lattice(8);
    const double sigma = lat::spectral_test(fib.lattice.basis);
    const auto s = lat::iso_discrepancy_sandwich(fib.lattice.basis);
    CHECK(s.lower == doctest::Approx(sigma / (std::sqrt(2.0) + sigma)).epsilon(1e-12));
    CHECK(s.upper == doctest::Approx(std::min(1.0, 2.0 * 64.0 * sigma)).epsilon(1e-12));

    // sigma = 1 family: lower = 1/(sqrt(2)+1), upper clamps to 1
    const auto aniso = diag_basis({1.0, 0.1});
    const auto t = lat::iso_discrepancy_sandwich(aniso);
    CHECK(t.lower == doctest::Approx(1.0 / (std::sqrt(2.0) + 1.0)).epsilon(1e-12));
    CHECK(t.upper == 1.0);
}

TEST_CASE("general point enumeration matches the generator formula") {
    const auto fib = lat::fibonacci_lattice(8);
    const auto enumerated = lat::lattice_point_set(fib.lattice.basis);
    REQUIRE(enumerated.size() == 21);
    // compare as sorted row lists
    auto rows = [](const pts::PointSet& p) {
        std::vector<std::vector<double>> r;
        for (std::size_t i = 0; i < p.size(); ++i) r.push_back(p.point(i));
        std::sort(r.begin(), r.end());
        return r;
    };
    const auto a = rows(enumerated);
    const auto b = rows(fib.points);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(a[i][j] == doctest::Approx(b[i][j]).epsilon(1e-9));
}
