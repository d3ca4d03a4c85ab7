#include "pnmimo/toydmc.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace pnmimo::toydmc {

namespace {

// e^{j phi} for phi in {-pi/2, 0, +pi/2}, as exact integer (cos, sin).
constexpr std::array<std::pair<int, int>, 3> kPhasors = {{{0, -1}, {1, 0}, {0, 1}}};

void check_prior(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("input prior p must lie in [0, 1]");
}

/// Accumulates the conditional output points for X = x (x = +1 or -1).
void accumulate(Pmf& pmf, int x, bool plus_branch, BranchMode mode) {
    const int den = mode == BranchMode::Sync ? 3 : 9;
    auto add = [&](int re2, int im2) {
        Mass& m = pmf[{re2, im2}];
        m.den = den;
        (plus_branch ? m.num_plus : m.num_minus) += 1;
    };
    if (mode == BranchMode::Sync) {
        for (const auto& [c, s] : kPhasors) add(2 * x * c, 2 * x * s);
    } else {
        for (const auto& [c1, s1] : kPhasors)
            for (const auto& [c2, s2] : kPhasors) add(x * (c1 + c2), x * (s1 + s2));
    }
}

double entropy_bits(const std::vector<double>& probs) {
    double h = 0.0;
    for (double q : probs)
        if (q > 0.0) h -= q * std::log2(q);
    return h;
}

std::vector<double> masses_at(const Pmf& pmf, double p) {
    std::vector<double> out;
    out.reserve(pmf.size());
    for (const auto& [pt, m] : pmf) out.push_back(m.at(p));
    return out;
}

}  // namespace

Pmf output_distribution(double p, BranchMode mode) {
    check_prior(p);
    Pmf pmf;
    accumulate(pmf, +1, true, mode);
    accumulate(pmf, -1, false, mode);
    return pmf;
}

double binary_entropy(double p) {
    check_prior(p);
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

double mutual_information(double p, BranchMode mode) {
    check_prior(p);
    const Pmf joint = output_distribution(p, mode);
    const double hy = entropy_bits(masses_at(joint, p));

    // H(Y|X): conditional distributions are the p = 1 and p = 0 slices.
    const double hy_plus = entropy_bits(masses_at(joint, 1.0));
    const double hy_minus = entropy_bits(masses_at(joint, 0.0));
    return hy - (p * hy_plus + (1.0 - p) * hy_minus);
}

double mutual_information_closed_form(double p, BranchMode mode) {
    const double coeff = mode == BranchMode::Sync ? 1.0 / 3.0 : 5.0 / 9.0;
    return coeff * binary_entropy(p);
}

Capacity capacity(BranchMode mode) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (mutual_information(m1, mode) < mutual_information(m2, mode))
            lo = m1;
        else
            hi = m2;
    }
    Capacity c;
    c.argmax_p = 0.5 * (lo + hi);
    c.bits = mutual_information(c.argmax_p, mode);
    return c;
}

}  // namespace pnmimo::toydmc
