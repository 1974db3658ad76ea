#include "liesym/jetspace.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace liesym {

int order_of(const MultiIndex& J) {
    return std::accumulate(J.begin(), J.end(), 0);
}

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    long long r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

namespace {

void enumerate_rec(int d, int r, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (d == 1) {
        cur.push_back(r);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int first = r; first >= 0; --first) {
        cur.push_back(first);
        enumerate_rec(d - 1, r - first, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int d, int r) {
    if (d < 1) throw std::invalid_argument("multi_indices: d must be >= 1");
    if (r < 0) throw std::invalid_argument("multi_indices: r must be >= 0");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(binom(d + r - 1, r)));
    MultiIndex cur;
    enumerate_rec(d, r, cur, out);
    return out;
}

long long JetLayout::jet_dimension(int k) const {
    if (k < 0 || k > p) {
        throw std::out_of_range("jet_dimension: level " + std::to_string(k) +
                                " outside [0, " + std::to_string(p) + "]");
    }
    long long dim = d + m;
    for (int r = 1; r <= k; ++r) dim += binom(d + r - 1, r) * m;
    return dim;
}

int JetLayout::coordinate_offset(int b, const MultiIndex& J) const {
    if (b < 0 || b >= m) throw std::out_of_range("coordinate_offset: dependent index");
    if (static_cast<int>(J.size()) != d && !J.empty()) {
        throw std::invalid_argument("coordinate_offset: multi-index length != d");
    }
    const int k = J.empty() ? 0 : order_of(J);
    if (k > p) throw std::out_of_range("coordinate_offset: |J| exceeds layout order");
    for (int e : J) {
        if (e < 0) throw std::invalid_argument("coordinate_offset: negative entry");
    }
    if (k == 0) return d + b;
    long long base = jet_dimension(k - 1);
    const auto level = multi_indices(d, k);
    for (std::size_t idx = 0; idx < level.size(); ++idx) {
        if (level[idx] == J) {
            return static_cast<int>(base + static_cast<long long>(b) * level.size() + idx);
        }
    }
    throw std::invalid_argument("coordinate_offset: unknown multi-index");
}

std::pair<int, MultiIndex> JetLayout::offset_to_pair(int offset) const {
    if (offset < d || offset >= jet_dimension(p)) {
        throw std::out_of_range("offset_to_pair: offset outside dependent/jet block");
    }
    if (offset < d + m) return {offset - d, MultiIndex(d, 0)};
    long long base = d + m;
    for (int k = 1; k <= p; ++k) {
        const auto level = multi_indices(d, k);
        const long long width = static_cast<long long>(level.size()) * m;
        if (offset < base + width) {
            const long long local = offset - base;
            const int b = static_cast<int>(local / level.size());
            const int idx = static_cast<int>(local % level.size());
            return {b, level[idx]};
        }
        base += width;
    }
    throw std::out_of_range("offset_to_pair: offset beyond layout");
}

std::vector<std::pair<int, MultiIndex>> JetLayout::level_coordinates(int k) const {
    if (k < 0 || k > p) throw std::out_of_range("level_coordinates: level out of range");
    std::vector<std::pair<int, MultiIndex>> out;
    if (k == 0) {
        for (int b = 0; b < m; ++b) out.emplace_back(b, MultiIndex(d, 0));
        return out;
    }
    const auto level = multi_indices(d, k);
    out.reserve(level.size() * m);
    for (int b = 0; b < m; ++b) {
        for (const auto& J : level) out.emplace_back(b, J);
    }
    return out;
}

std::vector<std::string> JetLayout::coordinate_names(int k) const {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(jet_dimension(k)));
    for (int i = 0; i < d; ++i) names.push_back("x" + std::to_string(i + 1));
    for (int b = 0; b < m; ++b) names.push_back("u" + std::to_string(b + 1));
    for (int r = 1; r <= k; ++r) {
        for (const auto& [b, J] : level_coordinates(r)) {
            std::ostringstream os;
            os << "u" << (b + 1) << "_J(";
            for (std::size_t j = 0; j < J.size(); ++j) {
                if (j) os << ",";
                os << J[j];
            }
            os << ")";
            names.push_back(os.str());
        }
    }
    return names;
}

}  // namespace liesym
