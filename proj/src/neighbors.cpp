#include "liesym/neighbors.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace liesym {

namespace {

struct Candidate {
    double d2;
    int idx;
    // Lexicographic on (distance, index): the strict ordering of neighbor lists.
    bool operator<(const Candidate& o) const {
        return d2 != o.d2 ? d2 < o.d2 : idx < o.idx;
    }
};

void check_args(const Eigen::MatrixXd& points, int k) {
    if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
    if (k > points.rows()) {
        throw std::invalid_argument("knn: k = " + std::to_string(k) + " exceeds N = " +
                                    std::to_string(points.rows()));
    }
}

NeighborTable heap_rows_to_table(std::vector<std::vector<Candidate>>& rows, int k) {
    NeighborTable table;
    table.k = k;
    table.indices.resize(static_cast<long long>(rows.size()), k);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::sort(rows[i].begin(), rows[i].end());
        for (int j = 0; j < k; ++j) table.indices(static_cast<long long>(i), j) = rows[i][j].idx;
    }
    return table;
}

// ---- space-partitioning tree (exact, for moderate ambient dimension) ----

struct KdNode {
    int begin = 0, end = 0;     // range in the permutation array
    int axis = -1;              // -1: leaf
    double split = 0.0;
    int left = -1, right = -1;
};

class KdTree {
  public:
    KdTree(const Eigen::MatrixXd& pts) : pts_(pts), perm_(pts.rows()) {
        std::iota(perm_.begin(), perm_.end(), 0);
        nodes_.reserve(static_cast<std::size_t>(2 * pts.rows() / kLeaf + 2));
        root_ = build(0, static_cast<int>(pts.rows()));
    }

    void query(const Eigen::RowVectorXd& q, int k, std::vector<Candidate>& out) const {
        std::priority_queue<Candidate> heap;  // top = current worst keeper
        search(root_, q, k, heap);
        out.resize(heap.size());
        for (int j = static_cast<int>(heap.size()) - 1; j >= 0; --j) {
            out[j] = heap.top();
            heap.pop();
        }
    }

  private:
    static constexpr int kLeaf = 16;

    int build(int begin, int end) {
        KdNode node;
        node.begin = begin;
        node.end = end;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        if (end - begin <= kLeaf) return id;

        // Split on the axis of maximum spread, at the median.
        int axis = 0;
        double best_spread = -1.0;
        for (int a = 0; a < pts_.cols(); ++a) {
            double lo = pts_(perm_[begin], a), hi = lo;
            for (int i = begin + 1; i < end; ++i) {
                const double v = pts_(perm_[i], a);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                axis = a;
            }
        }
        const int mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](int a, int b) { return pts_(a, axis) < pts_(b, axis); });
        nodes_[id].axis = axis;
        nodes_[id].split = pts_(perm_[mid], axis);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void search(int id, const Eigen::RowVectorXd& q, int k,
                std::priority_queue<Candidate>& heap) const {
        const KdNode& node = nodes_[id];
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int idx = perm_[i];
                const double d2 = (pts_.row(idx) - q).squaredNorm();
                Candidate c{d2, idx};
                if (static_cast<int>(heap.size()) < k) {
                    heap.push(c);
                } else if (c < heap.top()) {
                    heap.pop();
                    heap.push(c);
                }
            }
            return;
        }
        const double delta = q[node.axis] - node.split;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search(near, q, k, heap);
        // Visit the far side unless the slab distance strictly exceeds the
        // current worst keeper (ties can still matter via the index order).
        if (static_cast<int>(heap.size()) < k || delta * delta <= heap.top().d2) {
            search(far, q, k, heap);
        }
    }

    const Eigen::MatrixXd& pts_;
    std::vector<int> perm_;
    std::vector<KdNode> nodes_;
    int root_ = 0;
};

}  // namespace

NeighborTable knn(const Eigen::MatrixXd& points, int k) {
    check_args(points, k);
    if (points.cols() > 16) return knn_bruteforce(points, k);
    const long long N = points.rows();
    KdTree tree(points);
    std::vector<std::vector<Candidate>> rows(static_cast<std::size_t>(N));
    for (long long i = 0; i < N; ++i) {
        tree.query(points.row(i), k, rows[static_cast<std::size_t>(i)]);
    }
    return heap_rows_to_table(rows, k);
}

NeighborTable knn(const PointCloud& cloud, int k) { return knn(cloud.data, k); }

NeighborTable knn_bruteforce(const Eigen::MatrixXd& points, int k) {
    check_args(points, k);
    const long long N = points.rows();
    std::vector<std::vector<Candidate>> rows(static_cast<std::size_t>(N));
    std::vector<Candidate> all(static_cast<std::size_t>(N));
    for (long long i = 0; i < N; ++i) {
        for (long long j = 0; j < N; ++j) {
            all[static_cast<std::size_t>(j)] = {
                (points.row(j) - points.row(i)).squaredNorm(), static_cast<int>(j)};
        }
        std::partial_sort(all.begin(), all.begin() + k, all.end());
        rows[static_cast<std::size_t>(i)].assign(all.begin(), all.begin() + k);
    }
    return heap_rows_to_table(rows, k);
}

NeighborTable knn_bruteforce(const PointCloud& cloud, int k) {
    return knn_bruteforce(cloud.data, k);
}

}  // namespace liesym
