#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "randinfo/pointset.hpp"

namespace randinfo::lat {

// Columns are the basis vectors b_1..b_d.
struct LatticeBasis {
    Eigen::MatrixXd b;
    std::size_t dim() const { return static_cast<std::size_t>(b.rows()); }
};

struct LLLParams {
    double delta = 0.75;  // Lovasz parameter in (1/4, 1]
};

struct ShortestVector {
    Eigen::VectorXd vector;
    double norm = 0.0;
    bool certified = false;
};

// Lattice containing Z^d with 1/|det| = n points per unit cell.
struct Lattice {
    LatticeBasis basis;
    std::uint64_t n = 0;
};

struct LatticePoints {
    Lattice lattice;
    pts::PointSet points;
};

struct HyperplaneWitness {
    double fraction = 0.0;
    long long level = 0;
    Eigen::VectorXd dual_vector;
};

struct SandwichBounds {
    double lower = 0.0;
    double upper = 0.0;
};

std::uint64_t fibonacci(unsigned k);

// Point set {(i/F_k, {i F_{k-1}/F_k})} with basis columns (1/F_k, F_{k-1}/F_k)
// and (0, 1).
LatticePoints fibonacci_lattice(unsigned k);

// Points {i z / n mod 1}; the basis comes from the Hermite form of [z | nI].
LatticePoints rank1_lattice(std::uint64_t n, const std::vector<long long>& z);

// All lattice points inside [0,1)^d for an arbitrary basis.
pts::PointSet lattice_point_set(const LatticeBasis& basis, bool torus = true);

// Inverse transpose.
LatticeBasis dual_basis(const LatticeBasis& basis);

LatticeBasis lll_reduce(const LatticeBasis& basis, LLLParams params = {});

// Exact shortest nonzero vector: LLL then bounded enumeration. Ties resolve
// to the sign-canonical (first nonzero component positive) lexicographically
// smallest candidate.
ShortestVector shortest_vector(const LatticeBasis& basis);

// 1 / norm of the shortest nonzero dual vector.
double spectral_test(const LatticeBasis& basis);

// Exact diameter of the fundamental parallelepiped B[0,1]^d, attained at a
// vertex difference B e with e in {-1,1}^d.
double fundamental_domain_diameter(const LatticeBasis& basis);

// (sqrt(pi)/2) Gamma(d/2+1)^(-1/d) n^(-1/d); no n-point lattice rule can have
// a smaller spectral test.
double minkowski_lower_bound(std::size_t d, std::uint64_t n);

// Largest fraction of lattice points on a single level set <h, x> = k of the
// shortest dual vector h. A certified lower bound for the discrepancy over
// convex sets, since the level set is a zero-volume slice.
HyperplaneWitness hyperplane_section_witness(const LatticeBasis& basis,
                                             const pts::PointSet& points);

// lower = sigma/(sqrt(d)+sigma), upper = min(1, d 2^(2(d+1)) sigma).
SandwichBounds iso_discrepancy_sandwich(const LatticeBasis& basis);

}  // namespace randinfo::lat
