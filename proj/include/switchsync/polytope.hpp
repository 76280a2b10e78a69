#pragma once

// Interval over-approximation of A_tilde(alpha) and its vertex matrices.

#include <cstddef>
#include <vector>

#include "switchsync/smallmat.hpp"
#include "switchsync/unified_system.hpp"

namespace switchsync {

struct EntryInterval {
    std::size_t row = 0;  // zero-based
    std::size_t col = 0;
    double lo = 0.0;
    double hi = 0.0;
};

/// The five alpha-dependent entries of A_tilde in the fixed order
/// (0,0), (0,1), (1,0), (1,1), (2,2), bounded over [alpha_lo, alpha_hi].
std::vector<EntryInterval> entry_intervals(Alpha alpha_lo, Alpha alpha_hi);

using VertexSet = std::vector<Matrix>;

/// One matrix per binary choice vector (bit i set picks hi for interval i),
/// in lexicographic order with interval 0 as the most significant bit.
/// Entries not covered by an interval are zero.
VertexSet enumerate_vertices(const std::vector<EntryInterval>& intervals);

/// entry_intervals + enumerate_vertices over [lo, hi].
VertexSet polytope_vertices(double alpha_lo = 0.0, double alpha_hi = 1.0);

/// Nonnegative weights that sum to one.
class ConvexWeights {
public:
    /// Throws InvalidInput unless every w_i >= 0 and |sum - 1| <= 1e-12.
    explicit ConvexWeights(std::vector<double> w);

    static ConvexWeights one_hot(std::size_t n, std::size_t j);
    static ConvexWeights uniform(std::size_t n);

    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& values() const noexcept { return w_; }

private:
    std::vector<double> w_;
};

/// sum_i w_i * vertices[i]
Matrix convex_combination(const ConvexWeights& weights, const VertexSet& vertices);

}  // namespace switchsync
