// toydmc.hpp - two-branch phase-only discrete memoryless channel
//
// Input X in {+1, -1}, each branch rotates X by a phase drawn uniformly
// from {-pi/2, 0, +pi/2}, the output is the branch average. Synchronous
// operation ties both branches to one phase draw; non-synchronous draws
// them independently. Output points land on half-integer coordinates, so
// aggregation is exact integer arithmetic.

#pragma once

#include <map>
#include <utility>
#include <vector>

namespace pnmimo::toydmc {

enum class BranchMode { Sync, NonSync };

/// Output point (re2 + j im2) / 2 in half-units; exact map key.
using OutputPoint = std::pair<int, int>;

/// Output mass as (a p + b (1-p)) / den with integer a, b.
struct Mass {
    int num_plus = 0;   // weight on Pr{X=+1} = p
    int num_minus = 0;  // weight on Pr{X=-1} = 1-p
    int den = 1;
    double at(double p) const { return (num_plus * p + num_minus * (1.0 - p)) / den; }
};

using Pmf = std::map<OutputPoint, Mass>;

/// Exact output distribution for input prior p.
Pmf output_distribution(double p, BranchMode mode);

/// I(X;Y) in bits by direct enumeration: H(Y) - H(Y|X).
double mutual_information(double p, BranchMode mode);

/// Closed form (1/3) H2(p) for sync, (5/9) H2(p) for non-sync; used as the
/// algebraic cross-check of the enumeration path.
double mutual_information_closed_form(double p, BranchMode mode);

/// Binary entropy in bits.
double binary_entropy(double p);

struct Capacity {
    double bits = 0.0;
    double argmax_p = 0.0;
};

/// max_p I(X;Y) by ternary search over the (concave) enumeration path.
Capacity capacity(BranchMode mode);

}  // namespace pnmimo::toydmc
