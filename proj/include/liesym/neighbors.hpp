#pragma once

#include <Eigen/Core>

#include "liesym/pointcloud.hpp"

namespace liesym {

// Exact k-nearest-neighbor table under squared Euclidean distance in ambient
// coordinates. Row i lists the indices of the k nearest rows to row i,
// distances non-decreasing left to right, ties broken by smaller row index.
// The query point itself is always first (distance zero).
struct NeighborTable {
    Eigen::MatrixXi indices;  // N x k
    int k = 0;
};

// Accelerated exact search: space-partitioning tree for ambient dimension
// <= 16, blocked brute force above.
NeighborTable knn(const Eigen::MatrixXd& points, int k);
NeighborTable knn(const PointCloud& cloud, int k);

// O(N^2) reference implementation (test oracle).
NeighborTable knn_bruteforce(const Eigen::MatrixXd& points, int k);
NeighborTable knn_bruteforce(const PointCloud& cloud, int k);

}  // namespace liesym
