#include "switchsync/polytope.hpp"

#include <algorithm>
#include <cmath>

#include "switchsync/errors.hpp"

namespace switchsync {

namespace {

struct Slot {
    std::size_t row;
    std::size_t col;
};
constexpr Slot kAlphaSlots[] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}};

}  // namespace

std::vector<EntryInterval> entry_intervals(Alpha alpha_lo, Alpha alpha_hi) {
    if (alpha_lo.value() > alpha_hi.value()) {
        throw InvalidInput("entry_intervals: alpha_lo must not exceed alpha_hi");
    }
    // Every entry is affine in alpha, so its extremes sit at the range ends.
    const Matrix a = a_tilde(alpha_lo);
    const Matrix b = a_tilde(alpha_hi);
    std::vector<EntryInterval> out;
    for (const Slot& s : kAlphaSlots) {
        const double u = a(s.row, s.col);
        const double v = b(s.row, s.col);
        out.push_back({s.row, s.col, std::min(u, v), std::max(u, v)});
    }
    return out;
}

VertexSet enumerate_vertices(const std::vector<EntryInterval>& intervals) {
    if (intervals.empty() || intervals.size() > 20) {
        throw InvalidInput("enumerate_vertices: need between 1 and 20 intervals");
    }
    std::size_t n = 0;
    for (const auto& iv : intervals) {
        if (iv.lo > iv.hi) throw InvalidInput("enumerate_vertices: interval with lo > hi");
        n = std::max({n, iv.row + 1, iv.col + 1});
    }
    const std::size_t m = intervals.size();
    VertexSet out;
    out.reserve(std::size_t{1} << m);
    for (std::size_t code = 0; code < (std::size_t{1} << m); ++code) {
        Matrix v(n, n);
        for (std::size_t i = 0; i < m; ++i) {
            const bool hi = (code >> (m - 1 - i)) & 1U;
            v(intervals[i].row, intervals[i].col) = hi ? intervals[i].hi : intervals[i].lo;
        }
        out.push_back(std::move(v));
    }
    return out;
}

VertexSet polytope_vertices(double alpha_lo, double alpha_hi) {
    return enumerate_vertices(entry_intervals(Alpha(alpha_lo), Alpha(alpha_hi)));
}

ConvexWeights::ConvexWeights(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw InvalidInput("ConvexWeights: empty");
    double sum = 0.0;
    for (double x : w_) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("ConvexWeights: weights must be >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("ConvexWeights: weights must sum to 1");
}

ConvexWeights ConvexWeights::one_hot(std::size_t n, std::size_t j) {
    if (j >= n) throw InvalidInput("ConvexWeights::one_hot: index out of range");
    std::vector<double> w(n, 0.0);
    w[j] = 1.0;
    return ConvexWeights(std::move(w));
}

ConvexWeights ConvexWeights::uniform(std::size_t n) {
    if (n == 0) throw InvalidInput("ConvexWeights::uniform: empty");
    return ConvexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Matrix convex_combination(const ConvexWeights& weights, const VertexSet& vertices) {
    if (weights.size() != vertices.size()) {
        throw InvalidInput("convex_combination: weight count does not match vertex count");
    }
    const std::size_t r = vertices.front().rows();
    const std::size_t c = vertices.front().cols();
    Matrix out(r, c);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i].rows() != r || vertices[i].cols() != c) {
            throw InvalidInput("convex_combination: vertices differ in shape");
        }
        if (weights[i] == 0.0) continue;
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < c; ++b) out(a, b) += weights[i] * vertices[i](a, b);
    }
    return out;
}

}  // namespace switchsync
