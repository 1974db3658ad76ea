#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace liesym {

// A multi-index J = (j_1,...,j_d) of partial-derivative orders, one entry per
// effective independent variable.
using MultiIndex = std::vector<int>;

int order_of(const MultiIndex& J);

long long binom(int n, int k);

// All multi-indices over d variables with |J| == r, in graded-lexicographic
// order (first entry descending). Size C(d+r-1, r).
std::vector<MultiIndex> multi_indices(int d, int r);

// Coordinate bookkeeping for the jet space M^(k) of a system with d effective
// independent variables (true independents followed by free constants),
// m dependent variables, and maximum prolongation order p.
//
// Canonical coordinate ordering of a level-k point:
//   x_1..x_d, u_1..u_m, then for each level r = 1..k: for each dependent b
//   (outer) and each J in multi_indices(d, r) (inner), the coordinate u_{b,J}.
struct JetLayout {
    int d = 1;
    int m = 1;
    int p = 0;

    // Ambient dimension D_k of M^(k):  d + m + sum_{r=1..k} C(d+r-1, r) * m.
    long long jet_dimension(int k) const;

    // Column offset of x_i (i in [0, d)).
    int x_offset(int i) const { return i; }

    // Column offset of u_{b,J}; |J| == 0 addresses the dependent itself.
    int coordinate_offset(int b, const MultiIndex& J) const;

    // Inverse of coordinate_offset for offsets >= d.
    std::pair<int, MultiIndex> offset_to_pair(int offset) const;

    // The (dependent index, J) pairs introduced at level k, in canonical
    // order. Level 0 returns (b, empty J) for each dependent.
    std::vector<std::pair<int, MultiIndex>> level_coordinates(int k) const;

    // Human-readable coordinate names at level `k` ("x1", "u1", "u1_J(1,0)").
    std::vector<std::string> coordinate_names(int k) const;

    bool operator==(const JetLayout& o) const {
        return d == o.d && m == o.m && p == o.p;
    }
};

// A point of M^(k), laid out per the JetLayout ordering.
using JetPoint = Eigen::VectorXd;

}  // namespace liesym
