#include "pnmimo/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pnmimo {

namespace {

constexpr double kLog2 = 0.6931471805599453094;  // ln 2

struct EffectiveVariances {
    double phi = 0.0;
    double theta = 0.0;
};

EffectiveVariances effective(const ValidatedConfig& vc, Mode mode) {
    if (mode == Mode::NoPhaseNoise) return {0.0, 0.0};
    return {vc->sigma_phi_sq, vc->sigma_theta_sq};
}

void require_data_index(const ValidatedConfig& vc, int k, int i) {
    if (k < 0 || k >= vc->K) throw std::out_of_range("user index outside [0, K)");
    if (!vc.layout.data.contains(i))
        throw std::out_of_range("time index " + std::to_string(i) + " outside I_d = [" +
                                std::to_string(vc.layout.data.first) + ", " +
                                std::to_string(vc.layout.data.last) + "]");
}

/// sum_l sum_l' d_l d_l' e^{-sigma_phi^2 |l - l'|}; the i-independent part
/// of kappa and xi. At sigma_phi^2 = 0 this collapses to alpha^2, computed
/// with the same summation order as the derived alpha so the reduction to
/// the no-BS-noise formulas is exact rather than within rounding.
double pair_sum(const std::vector<double>& d, double sigma_phi_sq) {
    if (sigma_phi_sq == 0.0) {
        double a = 0.0;
        for (double v : d) a += v;
        return a * a;
    }
    const int L = static_cast<int>(d.size());
    double s = 0.0;
    for (int l = 0; l < L; ++l) s += d[static_cast<std::size_t>(l)] * d[static_cast<std::size_t>(l)];
    for (int l = 0; l < L; ++l)
        for (int lp = l + 1; lp < L; ++lp)
            s += 2.0 * d[static_cast<std::size_t>(l)] * d[static_cast<std::size_t>(lp)] *
                 std::exp(-sigma_phi_sq * (lp - l));
    return s;
}

double constant_C(const ValidatedConfig& vc, int k) {
    const double PD = vc->P_D;
    const double M = vc->M;
    const double s2 = vc->noise_variance;
    const double a = vc.alpha[static_cast<std::size_t>(k)];
    return PD * M * a * vc.alpha_total +
           s2 * M * (PD / (vc.P_p * vc->K) * vc.alpha_total + a + s2 / (vc->K * vc.P_p));
}

/// Per-(k, i) evaluation state reused across the i-sweep: everything that
/// does not depend on the drift span.
struct UserEval {
    double alpha = 0.0;
    double S = 0.0;  // pair_sum with the mode's sigma_phi^2
    double C = 0.0;
    double sphi = 0.0, stheta = 0.0;
};

UserEval make_user_eval(const ValidatedConfig& vc, int k, Mode mode) {
    const auto ev = effective(vc, mode);
    UserEval u;
    u.alpha = vc.alpha[static_cast<std::size_t>(k)];
    u.S = pair_sum(vc->pdp[static_cast<std::size_t>(k)], ev.phi);
    u.C = constant_C(vc, k);
    u.sphi = ev.phi;
    u.stheta = ev.theta;
    return u;
}

double noise_var_at(const UserEval& u, Mode mode, double M, double PD, int drift) {
    const double a2 = u.alpha * u.alpha;
    if (mode == Mode::NonSynchronous) {
        const double xi = u.S - a2 * std::exp(-u.sphi * drift);
        const double varpi = std::exp(-u.sphi * drift) * (1.0 - std::exp(-u.stheta * drift));
        return PD * M * M * a2 * varpi + PD * M * xi + u.C;
    }
    const double kappa = u.S - a2 * std::exp(-(u.sphi + u.stheta) * drift);
    return PD * M * M * kappa + u.C;
}

double rate_at(const UserEval& u, Mode mode, double M, double PD, int drift) {
    if (PD == 0.0) return 0.0;
    const double num = PD * M * M * u.alpha * u.alpha * std::exp(-(u.sphi + u.stheta) * drift);
    return std::log1p(num / noise_var_at(u, mode, M, PD, drift)) / kLog2;
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Synchronous: return "sync";
        case Mode::NonSynchronous: return "nonsync";
        case Mode::NoPhaseNoise: break;
    }
    return "none";
}

double mean_A(const ValidatedConfig& vc, int k, int i, Mode mode) {
    require_data_index(vc, k, i);
    const auto ev = effective(vc, mode);
    const int drift = vc.layout.drift(k, i);
    return std::sqrt(vc->P_D) * vc->M * vc.alpha[static_cast<std::size_t>(k)] *
           std::exp(-0.5 * (ev.phi + ev.theta) * drift);
}

VarianceKernels variance_kernels(const ValidatedConfig& vc, int k, int i, Mode mode) {
    require_data_index(vc, k, i);
    const auto ev = effective(vc, mode);
    const int drift = vc.layout.drift(k, i);
    const double a = vc.alpha[static_cast<std::size_t>(k)];
    const double S = pair_sum(vc->pdp[static_cast<std::size_t>(k)], ev.phi);
    VarianceKernels out;
    out.kappa = S - a * a * std::exp(-(ev.phi + ev.theta) * drift);
    out.xi = S - a * a * std::exp(-ev.phi * drift);
    out.varpi = std::exp(-ev.phi * drift) * (1.0 - std::exp(-ev.theta * drift));
    out.C = constant_C(vc, k);
    return out;
}

double effective_noise_variance(const ValidatedConfig& vc, int k, int i, Mode mode) {
    require_data_index(vc, k, i);
    const UserEval u = make_user_eval(vc, k, mode);
    return noise_var_at(u, mode, vc->M, vc->P_D, vc.layout.drift(k, i));
}

double rate_per_index(const ValidatedConfig& vc, int k, int i, Mode mode) {
    require_data_index(vc, k, i);
    const UserEval u = make_user_eval(vc, k, mode);
    return rate_at(u, mode, vc->M, vc->P_D, vc.layout.drift(k, i));
}

double per_user_rate(const ValidatedConfig& vc, int k, Mode mode) {
    const UserEval u = make_user_eval(vc, k, mode);
    const BlockLayout& lay = vc.layout;
    double acc = 0.0;
    for (int i = lay.data.first; i <= lay.data.last; ++i)
        acc += rate_at(u, mode, vc->M, vc->P_D, lay.drift(k, i));
    return acc / lay.N_c;
}

RateReport sum_rate(const ValidatedConfig& vc, Mode mode) {
    RateReport rep;
    rep.mode = mode;
    rep.K = vc->K;
    rep.N_D = vc->N_D;
    rep.per_index.resize(static_cast<std::size_t>(vc->K) * vc->N_D);
    rep.per_user.resize(static_cast<std::size_t>(vc->K));
    const BlockLayout& lay = vc.layout;
    for (int k = 0; k < vc->K; ++k) {
        const UserEval u = make_user_eval(vc, k, mode);
        double acc = 0.0;
        for (int n = 0; n < vc->N_D; ++n) {
            const double r = rate_at(u, mode, vc->M, vc->P_D, lay.drift(k, lay.data.first + n));
            rep.per_index[static_cast<std::size_t>(k) * vc->N_D + n] = r;
            acc += r;
        }
        rep.per_user[static_cast<std::size_t>(k)] = acc / lay.N_c;
        rep.sum_rate += rep.per_user[static_cast<std::size_t>(k)];
    }
    return rep;
}

double no_phase_noise_sum_rate(const ValidatedConfig& vc) {
    double acc = 0.0;
    for (int k = 0; k < vc->K; ++k) {
        const double a = vc.alpha[static_cast<std::size_t>(k)];
        const double sinr = vc->P_D * vc->M * vc->M * a * a / constant_C(vc, k);
        acc += std::log1p(sinr) / kLog2;
    }
    return acc * vc->N_D / vc.layout.N_c;
}

double high_snr_limit(const ValidatedConfig& vc, int k, Mode mode) {
    if (k < 0 || k >= vc->K) throw std::out_of_range("user index outside [0, K)");
    const auto ev = effective(vc, mode);
    const double a = vc.alpha[static_cast<std::size_t>(k)];
    const double M = vc->M;
    const double S = pair_sum(vc->pdp[static_cast<std::size_t>(k)], ev.phi);
    const BlockLayout& lay = vc.layout;
    double acc = 0.0;
    for (int i = lay.data.first; i <= lay.data.last; ++i) {
        const int drift = lay.drift(k, i);
        const double num = M * a * a * std::exp(-(ev.phi + ev.theta) * drift);
        double den;
        if (mode == Mode::NonSynchronous) {
            const double xi = S - a * a * std::exp(-ev.phi * drift);
            const double varpi = std::exp(-ev.phi * drift) * (1.0 - std::exp(-ev.theta * drift));
            den = M * a * a * varpi + xi + a * vc.alpha_total;
        } else {
            const double kappa = S - a * a * std::exp(-(ev.phi + ev.theta) * drift);
            den = M * kappa + a * vc.alpha_total;
        }
        acc += std::log1p(num / den) / kLog2;
    }
    return acc / lay.N_c;
}

double array_gain_limit(const ValidatedConfig& vc, int k, Mode mode, const ArrayGainQuery& q) {
    if (k < 0 || k >= vc->K) throw std::out_of_range("user index outside [0, K)");
    if (!(q.E_u > 0.0)) throw std::invalid_argument("array_gain_limit: E_u must be > 0");
    if (q.eta < 0.0) throw std::invalid_argument("array_gain_limit: eta must be >= 0");
    if (q.eta > 0.5) return 0.0;  // power shrinks too fast; the rate vanishes
    if (q.eta < 0.5)
        throw std::invalid_argument(
            "array_gain_limit: closed-form limit only exists at eta = 1/2 (rates grow "
            "interference-limited below it); use array_gain_rate for finite M");

    const auto ev = effective(vc, mode);
    const double a = vc.alpha[static_cast<std::size_t>(k)];
    const double s2 = vc->noise_variance;
    const double snr_u = q.E_u / s2;
    const double floor = s2 / (vc->K * vc->beta * q.E_u);
    const double S = pair_sum(vc->pdp[static_cast<std::size_t>(k)], ev.phi);
    const BlockLayout& lay = vc.layout;
    double acc = 0.0;
    for (int i = lay.data.first; i <= lay.data.last; ++i) {
        const int drift = lay.drift(k, i);
        const double num = snr_u * a * a * std::exp(-(ev.phi + ev.theta) * drift);
        double den;
        if (mode == Mode::NonSynchronous) {
            const double varpi = std::exp(-ev.phi * drift) * (1.0 - std::exp(-ev.theta * drift));
            den = snr_u * a * a * varpi + floor;
        } else {
            const double kappa = S - a * a * std::exp(-(ev.phi + ev.theta) * drift);
            den = snr_u * kappa + floor;
        }
        acc += std::log1p(num / den) / kLog2;
    }
    return acc / lay.N_c;
}

double array_gain_rate(const ValidatedConfig& vc, int k, Mode mode, const ArrayGainQuery& q) {
    if (!(q.E_u > 0.0)) throw std::invalid_argument("array_gain_rate: E_u must be > 0");
    if (q.eta < 0.0) throw std::invalid_argument("array_gain_rate: eta must be >= 0");
    SystemConfig scaled = vc.cfg;
    scaled.P_D = q.E_u / std::pow(static_cast<double>(vc->M), q.eta);
    return per_user_rate(validate(scaled), k, mode);
}

double special_case_rate(const ValidatedConfig& vc, int k, int i, SpecialCase sc, Regime regime) {
    require_data_index(vc, k, i);
    if (sc == SpecialCase::UtOnly && vc->sigma_phi_sq != 0.0)
        throw std::invalid_argument("special_case_rate: UT-only case requires sigma_phi_sq = 0");
    if (sc != SpecialCase::UtOnly && vc->sigma_theta_sq != 0.0)
        throw std::invalid_argument("special_case_rate: BS-only cases require sigma_theta_sq = 0");

    const int drift = vc.layout.drift(k, i);
    const double a = vc.alpha[static_cast<std::size_t>(k)];
    const double a2 = a * a;
    const double M = vc->M;
    const double s2 = vc->noise_variance;
    const double C = constant_C(vc, k);

    if (sc == SpecialCase::UtOnly) {
        const double fade = std::exp(-vc->sigma_theta_sq * drift);
        switch (regime) {
            case Regime::Finite: {
                const double num = (vc->P_D * M * a2 / s2) * fade;
                const double den = (vc->P_D * M / s2) * a2 * (1.0 - fade) + C / (s2 * M);
                return std::log1p(num / den) / kLog2;
            }
            case Regime::HighSnr: {
                const double num = M * a * fade;
                const double den = M * a * (1.0 - fade) + vc.alpha_total;
                return std::log1p(num / den) / kLog2;
            }
            case Regime::LargeArray: {
                const double snr_u = vc->P_D / s2;  // E_u taken from the configured power
                const double floor = s2 / (vc->K * vc->beta * vc->P_D);
                const double num = snr_u * a2 * fade;
                const double den = snr_u * a2 * (1.0 - fade) + floor;
                return std::log1p(num / den) / kLog2;
            }
        }
    }

    const double fade = std::exp(-vc->sigma_phi_sq * drift);
    const double S = pair_sum(vc->pdp[static_cast<std::size_t>(k)], vc->sigma_phi_sq);
    const double xi = S - a2 * fade;
    const bool sync = sc == SpecialCase::BsOnlySync;
    switch (regime) {
        case Regime::Finite: {
            const double num = (vc->P_D * M * a2 / s2) * fade;
            const double den = (sync ? vc->P_D * M / s2 : vc->P_D / s2) * xi + C / (s2 * M);
            return std::log1p(num / den) / kLog2;
        }
        case Regime::HighSnr: {
            const double num = M * a2 * fade;
            const double den = (sync ? M * xi : xi) + a * vc.alpha_total;
            return std::log1p(num / den) / kLog2;
        }
        case Regime::LargeArray: {
            const double snr_u = vc->P_D / s2;
            const double floor = s2 / (vc->K * vc->beta * vc->P_D);
            if (sync) return std::log1p(snr_u * a2 * fade / (snr_u * xi + floor)) / kLog2;
            // independent BS oscillators: the distortion vanishes with M
            return std::log1p(snr_u * snr_u * vc->K * vc->beta * a2 * fade) / kLog2;
        }
    }
    throw std::logic_error("special_case_rate: unreachable");
}

RequiredSnr required_snr_for_rate(const ValidatedConfig& vc, Mode mode, double target_bpcu) {
    RequiredSnr out;
    double sat = 0.0;
    for (int k = 0; k < vc->K; ++k) sat += high_snr_limit(vc, k, mode);
    sat /= vc->K;
    out.saturation_bpcu = sat;

    if (!(target_bpcu > 0.0)) {
        out.status = RequiredSnr::Status::DegenerateTarget;
        out.snr_db = -std::numeric_limits<double>::infinity();
        return out;
    }
    if (target_bpcu >= sat) {
        out.status = RequiredSnr::Status::InfeasibleTarget;
        return out;
    }

    const double s2 = vc->noise_variance > 0.0 ? vc->noise_variance : 1.0;
    auto avg_rate_at_db = [&](double snr_db) {
        SystemConfig c = vc.cfg;
        c.noise_variance = s2;
        c.P_D = s2 * std::pow(10.0, snr_db / 10.0);
        const ValidatedConfig v = validate(c);
        double r = 0.0;
        for (int k = 0; k < vc->K; ++k) r += per_user_rate(v, k, mode);
        return r / vc->K;
    };

    double lo = -60.0, hi = 80.0;
    if (avg_rate_at_db(hi) < target_bpcu) hi = 160.0;  // one upward expansion of the bracket
    if (avg_rate_at_db(hi) < target_bpcu) {
        out.status = RequiredSnr::Status::InfeasibleTarget;
        return out;
    }
    // The rate is strictly increasing in P_D (numerator linear, denominator
    // affine plus a 1/P_D estimation term), so plain bisection converges.
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double r = avg_rate_at_db(mid);
        if (std::abs(r - target_bpcu) < 1e-6 && hi - lo < 1e-9) break;
        (r < target_bpcu ? lo : hi) = mid;
    }
    out.snr_db = mid;
    return out;
}

BestDataLength optimize_data_length(const ValidatedConfig& vc, Mode mode, int bound, int patience) {
    if (bound < 1) throw std::invalid_argument("optimize_data_length: bound must be >= 1");
    const int K = vc->K, L = vc->L;
    std::vector<UserEval> users;
    users.reserve(static_cast<std::size_t>(K));
    // Per-index rates do not depend on N_D, only the averaging window does,
    // so the whole sweep is one cumulative pass.
    SystemConfig probe_cfg = vc.cfg;
    probe_cfg.N_D = 1;
    const ValidatedConfig probe = validate(probe_cfg);
    for (int k = 0; k < K; ++k) users.push_back(make_user_eval(probe, k, mode));

    const int i0 = (K + 1) * L - 1;
    const int overhead = (K + 3) * L - 3;
    double cumulative = 0.0;
    BestDataLength best;
    for (int nd = 1; nd <= bound; ++nd) {
        const int i = i0 + nd - 1;
        for (int k = 0; k < K; ++k)
            cumulative += rate_at(users[static_cast<std::size_t>(k)], mode, vc->M, vc->P_D, i - k * L);
        const double sr = cumulative / (nd + overhead);
        if (best.N_D == 0 || sr > best.sum_rate) {
            best.sum_rate = sr;
            best.N_D = nd;
        } else if (patience > 0 && nd - best.N_D > patience) {
            break;  // unimodal in N_D; the peak is long past
        }
    }
    return best;
}

}  // namespace pnmimo
