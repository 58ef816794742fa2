#include "randinfo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "randinfo/errors.hpp"

namespace randinfo::lat {
namespace {

using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

constexpr long long kIntGuard = 1LL << 60;

long long floordiv(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void guard_entries(const IMat& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (std::llabs(a(i, j)) > kIntGuard)
                throw Overflow("integer entries grew past the guard");
}

// Column-style Hermite form: A Z^c = H Z^d with H lower triangular, positive
// diagonal, entries left of each pivot reduced modulo it.
IMat hermite_form(IMat a) {
    const Eigen::Index d = a.rows();
    const Eigen::Index c = a.cols();
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index j = r + 1; j < c; ++j) {
            while (a(r, j) != 0) {
                if (a(r, r) == 0) {
                    a.col(r).swap(a.col(j));
                    continue;
                }
                const long long q = a(r, j) / a(r, r);
                a.col(j) -= q * a.col(r);
                if (a(r, j) != 0) a.col(r).swap(a.col(j));
            }
            guard_entries(a);
        }
        if (a(r, r) < 0) a.col(r) = -a.col(r);
        if (a(r, r) != 0)
            for (Eigen::Index j = 0; j < r; ++j)
                a.col(j) -= floordiv(a(r, j), a(r, r)) * a.col(r);
    }
    return a.leftCols(d);
}

void require_square(const LatticeBasis& basis) {
    if (basis.b.rows() == 0 || basis.b.rows() != basis.b.cols())
        throw DimensionMismatch("basis matrix must be square and non-empty");
}

struct Gso {
    Eigen::MatrixXd mu;       // lower-triangular coefficients
    Eigen::VectorXd star_sq;  // squared norms of the orthogonalized vectors
};

Gso gram_schmidt(const Eigen::MatrixXd& b) {
    const Eigen::Index d = b.cols();
    Gso g{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d)};
    Eigen::MatrixXd star = b;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (g.star_sq(j) <= 0.0)
                throw NumericalFailure("degenerate basis in orthogonalization");
            g.mu(i, j) = b.col(i).dot(star.col(j)) / g.star_sq(j);
            star.col(i) -= g.mu(i, j) * star.col(j);
        }
        g.star_sq(i) = star.col(i).squaredNorm();
        if (!(g.star_sq(i) > 0.0))
            throw NumericalFailure("linearly dependent basis vectors");
    }
    return g;
}

struct ReductionResult {
    Eigen::MatrixXd b;
    IMat u;  // change of basis: b = b_in * u
};

ReductionResult lll_core(const Eigen::MatrixXd& input, double delta) {
    const Eigen::Index d = input.cols();
    ReductionResult r{input, IMat::Identity(d, d)};
    if (d == 1) return r;
    const long long cap = 20000 * static_cast<long long>(d) * d + 2000;
    long long iter = 0;
    Eigen::Index k = 1;
    Gso g = gram_schmidt(r.b);
    while (k < d) {
        if (++iter > cap)
            throw NumericalFailure("reduction exceeded its iteration cap");
        for (Eigen::Index j = k - 1; j >= 0; --j) {
            const long long q = std::llround(g.mu(k, j));
            if (q != 0) {
                r.b.col(k) -= static_cast<double>(q) * r.b.col(j);
                r.u.col(k) -= q * r.u.col(j);
                for (Eigen::Index i = 0; i < j; ++i)
                    g.mu(k, i) -= static_cast<double>(q) * g.mu(j, i);
                g.mu(k, j) -= static_cast<double>(q);
            }
        }
        guard_entries(r.u);
        const double lhs = g.star_sq(k);
        const double rhs =
            (delta - g.mu(k, k - 1) * g.mu(k, k - 1)) * g.star_sq(k - 1);
        if (lhs >= rhs) {
            ++k;
        } else {
            r.b.col(k).swap(r.b.col(k - 1));
            r.u.col(k).swap(r.u.col(k - 1));
            g = gram_schmidt(r.b);
            k = std::max<Eigen::Index>(1, k - 1);
        }
    }
    return r;
}

void verify_unimodular(const Eigen::MatrixXd& b_in, const ReductionResult& r) {
    const double scale = std::max(1.0, b_in.cwiseAbs().maxCoeff());
    const double recon = (b_in * r.u.cast<double>() - r.b).cwiseAbs().maxCoeff();
    if (recon > 1e-9 * scale)
        throw NumericalFailure("change-of-basis reconstruction drifted");
    const double det = r.u.cast<double>().determinant();
    if (std::fabs(std::fabs(det) - 1.0) > 1e-9)
        throw NumericalFailure("change-of-basis matrix is not unimodular");
}

// All nonzero integer combinations c with ||R c|| within the radius, by
// depth-first interval search over the triangular factor.
void enumerate_short(const Eigen::MatrixXd& r_mat, double radius_sq,
                     Eigen::VectorXi& c, Eigen::Index level, double used,
                     std::vector<std::pair<double, Eigen::VectorXi>>& found) {
    if (level < 0) {
        if ((c.array() != 0).any()) found.emplace_back(used, c);
        return;
    }
    double offset = 0.0;
    for (Eigen::Index j = level + 1; j < r_mat.cols(); ++j)
        offset += r_mat(level, j) * c(j);
    const double rii = r_mat(level, level);
    const double room = radius_sq - used;
    if (room < 0.0) return;
    const double half = std::sqrt(room);
    const long long lo = static_cast<long long>(std::ceil((-half - offset) / rii - 1e-12));
    const long long hi = static_cast<long long>(std::floor((half - offset) / rii + 1e-12));
    for (long long ci = lo; ci <= hi; ++ci) {
        const double t = rii * static_cast<double>(ci) + offset;
        const double next_used = used + t * t;
        if (next_used > radius_sq) continue;
        c(level) = static_cast<int>(ci);
        enumerate_short(r_mat, radius_sq, c, level - 1, next_used, found);
    }
    c(level) = 0;
}

// Sign-canonical form: first component of clearly nonzero magnitude positive.
Eigen::VectorXd canonical_sign(Eigen::VectorXd v, double tol) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::fabs(v(i)) > tol) {
            if (v(i) < 0.0) v = -v;
            break;
        }
    }
    return v;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::fabs(a(i) - b(i)) <= tol) continue;
        return a(i) < b(i);
    }
    return false;
}

}  // namespace

std::uint64_t fibonacci(unsigned k) {
    std::uint64_t a = 0, b = 1;
    for (unsigned i = 0; i < k; ++i) {
        std::uint64_t next;
        if (__builtin_add_overflow(a, b, &next))
            throw Overflow("Fibonacci number exceeds 64 bits");
        a = b;
        b = next;
    }
    return a;
}

LatticePoints rank1_lattice(std::uint64_t n, const std::vector<long long>& z) {
    if (n < 1 || z.empty())
        throw ParameterOutOfRange("need n >= 1 and a non-empty generator");
    if (n > (std::uint64_t{1} << 31))
        throw Overflow("n too large for exact integer point generation");
    const std::size_t d = z.size();
    std::vector<long long> zn(d);
    long long g = static_cast<long long>(n);
    for (std::size_t j = 0; j < d; ++j) {
        long long r = z[j] % static_cast<long long>(n);
        if (r < 0) r += static_cast<long long>(n);
        zn[j] = r;
        g = std::gcd(g, r);
    }
    if (n > 1 && g > 1)
        throw PointCountMismatch("generator produces fewer than n distinct points");

    std::vector<double> cols(d * n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::uint64_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const long long num =
                static_cast<long long>(i % n) * zn[j] % static_cast<long long>(n);
            cols[j * n + i] = static_cast<double>(num) * inv_n;
        }
    pts::PointSet points(d, std::move(cols), true);

    IMat a(d, d + 1);
    for (std::size_t j = 0; j < d; ++j) a(j, 0) = zn[j];
    a.rightCols(d) =
        static_cast<long long>(n) * IMat::Identity(d, d).eval();
    const IMat h = hermite_form(std::move(a));
    LatticeBasis basis{h.cast<double>() * inv_n};
    return {{std::move(basis), n}, std::move(points)};
}

LatticePoints fibonacci_lattice(unsigned k) {
    if (k < 3) throw ParameterOutOfRange("Fibonacci index must be at least 3");
    const std::uint64_t fk = fibonacci(k);
    const std::uint64_t fk1 = fibonacci(k - 1);
    return rank1_lattice(fk, {1, static_cast<long long>(fk1)});
}

pts::PointSet lattice_point_set(const LatticeBasis& basis, bool torus) {
    require_square(basis);
    const Eigen::Index d = basis.b.rows();
    const Eigen::MatrixXd inv = basis.b.inverse();
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(d), hi = Eigen::VectorXd::Zero(d);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        Eigen::VectorXd v(d);
        for (Eigen::Index j = 0; j < d; ++j) v(j) = (mask >> j) & 1u ? 1.0 : 0.0;
        const Eigen::VectorXd c = inv * v;
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    std::vector<long long> c_lo(d), c_hi(d), c(d);
    double box = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        c_lo[j] = static_cast<long long>(std::floor(lo(j))) - 1;
        c_hi[j] = static_cast<long long>(std::ceil(hi(j))) + 1;
        box *= static_cast<double>(c_hi[j] - c_lo[j] + 1);
        if (box > 5e7) throw GridTooLarge("coefficient box too large to scan");
    }
    std::vector<std::vector<double>> rows;
    c = c_lo;
    for (;;) {
        Eigen::VectorXd cv(d);
        for (Eigen::Index j = 0; j < d; ++j) cv(j) = static_cast<double>(c[j]);
        Eigen::VectorXd x = basis.b * cv;
        bool ok = true;
        for (Eigen::Index j = 0; j < d && ok; ++j) {
            double v = x(j);
            const double snapped = std::round(v);
            if (std::fabs(v - snapped) < 1e-9) v = snapped;
            if (v < 0.0 || v >= 1.0) ok = false;
            x(j) = v;
        }
        if (ok) rows.emplace_back(x.data(), x.data() + d);
        Eigen::Index j = 0;
        while (j < d) {
            if (++c[j] <= c_hi[j]) break;
            c[j] = c_lo[j];
            ++j;
        }
        if (j == d) break;
    }
    return pts::PointSet::from_rows(d, rows, torus);
}

LatticeBasis dual_basis(const LatticeBasis& basis) {
    require_square(basis);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.b);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw NearSingular("basis condition estimate exceeds 1e12");
    return {basis.b.inverse().transpose()};
}

LatticeBasis lll_reduce(const LatticeBasis& basis, LLLParams params) {
    require_square(basis);
    if (!(params.delta > 0.25 && params.delta <= 1.0))
        throw ParameterOutOfRange("delta must lie in (1/4, 1]");
    ReductionResult r = lll_core(basis.b, params.delta);
    verify_unimodular(basis.b, r);
    return {std::move(r.b)};
}

ShortestVector shortest_vector(const LatticeBasis& basis) {
    require_square(basis);
    const Eigen::Index d = basis.b.rows();
    if (d > 10) throw DimensionTooLarge("certified search capped at dimension 10");
    const LatticeBasis red = lll_reduce(basis);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(red.b);
    Eigen::MatrixXd r_mat =
        qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i)
        if (r_mat(i, i) < 0.0) r_mat.row(i) = -r_mat.row(i);

    double radius_sq = red.b.colwise().squaredNorm().minCoeff();
    radius_sq *= 1.0 + 1e-9;
    std::vector<std::pair<double, Eigen::VectorXi>> found;
    Eigen::VectorXi c = Eigen::VectorXi::Zero(d);
    enumerate_short(r_mat, radius_sq, c, d - 1, 0.0, found);
    if (found.empty()) throw NumericalFailure("enumeration returned no candidates");

    double best_sq = std::numeric_limits<double>::infinity();
    for (const auto& f : found) {
        const double nsq = (red.b * f.second.cast<double>()).squaredNorm();
        best_sq = std::min(best_sq, nsq);
    }
    const double norm = std::sqrt(best_sq);
    const double tol = 1e-9 * std::max(1.0, norm);
    Eigen::VectorXd pick;
    for (const auto& f : found) {
        Eigen::VectorXd v = red.b * f.second.cast<double>();
        if (v.norm() > norm + tol) continue;
        v = canonical_sign(std::move(v), tol);
        if (pick.size() == 0 || lex_less(v, pick, tol)) pick = std::move(v);
    }
    return {std::move(pick), norm, true};
}

double spectral_test(const LatticeBasis& basis) {
    return 1.0 / shortest_vector(dual_basis(basis)).norm;
}

double fundamental_domain_diameter(const LatticeBasis& basis) {
    require_square(basis);
    const Eigen::Index d = basis.b.rows();
    if (d > 20) throw DimensionTooLarge("diameter enumeration capped at dimension 20");
    // The squared norm is convex in the sign vector, so the maximum over
    // {-1,0,1}^d is attained on {-1,1}^d.
    double best = 0.0;
    Eigen::VectorXd e(d);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
        for (Eigen::Index j = 0; j < d; ++j)
            e(j) = (mask >> j) & 1u ? 1.0 : -1.0;
        best = std::max(best, (basis.b * e).squaredNorm());
    }
    return std::sqrt(best);
}

double minkowski_lower_bound(std::size_t d, std::uint64_t n) {
    if (d < 1 || n < 1) throw ParameterOutOfRange("d and n must be positive");
    const double dd = static_cast<double>(d);
    const double log_gamma = std::lgamma(dd / 2.0 + 1.0);
    return 0.5 * std::sqrt(M_PI) * std::exp(-log_gamma / dd) *
           std::pow(static_cast<double>(n), -1.0 / dd);
}

HyperplaneWitness hyperplane_section_witness(const LatticeBasis& basis,
                                             const pts::PointSet& points) {
    const ShortestVector h = shortest_vector(dual_basis(basis));
    if (points.dim() != static_cast<std::size_t>(h.vector.size()))
        throw DimensionMismatch("point set and basis dimension differ");
    std::map<long long, std::size_t> counts;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < points.dim(); ++j)
            v += h.vector(static_cast<Eigen::Index>(j)) * points.coord(i, j);
        const long long k = std::llround(v);
        if (std::fabs(v - static_cast<double>(k)) > 1e-9)
            throw NumericalFailure("dual pairing drifted from an integer");
        ++counts[k];
    }
    HyperplaneWitness w;
    w.dual_vector = h.vector;
    std::size_t best = 0;
    for (const auto& [level, count] : counts)
        if (count > best) {
            best = count;
            w.level = level;
        }
    w.fraction = static_cast<double>(best) / static_cast<double>(points.size());
    return w;
}

SandwichBounds iso_discrepancy_sandwich(const LatticeBasis& basis) {
    const double sigma = spectral_test(basis);
    const double d = static_cast<double>(basis.dim());
    SandwichBounds s;
    s.lower = sigma / (std::sqrt(d) + sigma);
    s.upper = std::min(1.0, d * std::exp2(2.0 * (d + 1.0)) * sigma);
    return s;
}

}  // namespace randinfo::lat
