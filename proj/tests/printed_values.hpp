#pragma once
// Published four-decimal certificate for the full alpha in [0, 1] problem with
// the ones-column input distribution.

#include "switchsync/smallmat.hpp"

namespace switchsync::printed {

inline SymMatrix y() {
    return SymMatrix{{0.0385, -0.0014, 0.0112}, {-0.0014, 0.0013, -0.0005}, {0.0112, -0.0005, 0.5753}};
}

inline SymMatrix p() {
    return SymMatrix{{27.2002, 28.9674, -0.5062}, {28.9674, 779.2615, 0.0738}, {-0.5062, 0.0738, 1.7481}};
}

inline Matrix ka() { return Matrix{{-0.3012, -0.6857, 0.5681}}; }

inline Matrix k() { return Matrix{{-28.3433, -543.0217, 1.0950}}; }

inline constexpr double kEigP[3] = {1.7375, 26.0968, 780.3756};

}  // namespace switchsync::printed
