#include "pnmimo/config.hpp"

#include <numbers>
#include <sstream>

namespace pnmimo {

std::string to_string(OscillatorMode mode) {
    return mode == OscillatorMode::Synchronous ? "synchronous" : "non-synchronous";
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&violations] {
          std::ostringstream os;
          os << "invalid configuration (" << violations.size() << " violation"
             << (violations.size() == 1 ? "" : "s") << "):";
          for (const auto& v : violations) os << "\n  - " << v;
          return os.str();
      }()),
      violations_(std::move(violations)) {}

double derive_increment_variance(double f_c_hz, double T_s_sec, double c) {
    if (!(f_c_hz > 0.0)) throw std::invalid_argument("derive_increment_variance: f_c must be > 0");
    if (!(T_s_sec > 0.0)) throw std::invalid_argument("derive_increment_variance: T_s must be > 0");
    if (!(c >= 0.0)) throw std::invalid_argument("derive_increment_variance: c must be >= 0");
    const double two_pi_fc = 2.0 * std::numbers::pi * f_c_hz;
    return two_pi_fc * two_pi_fc * c * T_s_sec;
}

BlockLayout block_layout(int K, int L, int N_D) {
    if (K < 1 || L < 1 || N_D < 1)
        throw std::invalid_argument("block_layout: K, L and N_D must all be >= 1");
    BlockLayout b;
    b.K = K;
    b.L = L;
    b.N_D = N_D;
    b.N_c = N_D + (K + 3) * L - 3;
    b.guard = {-(L - 1), -1};
    b.training = {0, K * L - 1};
    b.preamble = {K * L, (K + 1) * L - 2};
    b.data = {(K + 1) * L - 1, (K + 1) * L + N_D - 2};
    b.postamble = {(K + 1) * L + N_D - 1, (K + 1) * L + N_D + L - 3};
    return b;
}

std::vector<double> exponential_pdp(int L, double decay, double alpha) {
    if (L < 1) throw std::invalid_argument("exponential_pdp: L must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("exponential_pdp: alpha must be > 0");
    if (!(decay >= 0.0)) throw std::invalid_argument("exponential_pdp: decay must be >= 0");
    std::vector<double> d(static_cast<std::size_t>(L));
    double norm = 0.0;
    for (int l = 0; l < L; ++l) {
        d[static_cast<std::size_t>(l)] = std::exp(-decay * l);
        norm += d[static_cast<std::size_t>(l)];
    }
    for (auto& v : d) v *= alpha / norm;
    return d;
}

std::vector<double> renormalize_pdp(const std::vector<double>& taps, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("renormalize_pdp: alpha must be > 0");
    double s = 0.0;
    for (double v : taps) s += v;
    if (!(s > 0.0)) throw std::invalid_argument("renormalize_pdp: tap powers must sum to > 0");
    std::vector<double> out = taps;
    for (auto& v : out) v *= alpha / s;
    return out;
}

std::vector<std::string> check(const SystemConfig& cfg) {
    std::vector<std::string> bad;
    auto fail = [&bad](const std::string& msg) { bad.push_back(msg); };

    if (cfg.M < 1) fail("M: antenna count must be >= 1");
    if (cfg.K < 1) fail("K: user count must be >= 1");
    if (cfg.L < 1) fail("L: tap count must be >= 1");
    if (cfg.N_D < 1) fail("N_D: data length must be >= 1");
    if (!(cfg.P_D > 0.0) || !std::isfinite(cfg.P_D)) fail("P_D: data power must be finite and > 0");
    if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) fail("beta: power ratio must be finite and > 0");
    if (!(cfg.noise_variance >= 0.0) || !std::isfinite(cfg.noise_variance))
        fail("noise_variance: must be finite and >= 0");
    if (!(cfg.sigma_phi_sq >= 0.0) || !std::isfinite(cfg.sigma_phi_sq))
        fail("sigma_phi_sq: must be finite and >= 0");
    if (!(cfg.sigma_theta_sq >= 0.0) || !std::isfinite(cfg.sigma_theta_sq))
        fail("sigma_theta_sq: must be finite and >= 0");

    if (cfg.K >= 1 && static_cast<int>(cfg.pdp.size()) != cfg.K) {
        fail("pdp: expected " + std::to_string(cfg.K) + " rows, got " + std::to_string(cfg.pdp.size()));
    } else {
        for (int k = 0; k < static_cast<int>(cfg.pdp.size()); ++k) {
            const auto& row = cfg.pdp[static_cast<std::size_t>(k)];
            if (cfg.L >= 1 && static_cast<int>(row.size()) != cfg.L) {
                fail("pdp: row " + std::to_string(k) + " has " + std::to_string(row.size()) +
                     " taps, expected L = " + std::to_string(cfg.L));
                continue;
            }
            double sum = 0.0;
            bool neg = false;
            for (double v : row) {
                if (!(v >= 0.0) || !std::isfinite(v)) neg = true;
                sum += v;
            }
            if (neg) fail("pdp: row " + std::to_string(k) + " has a negative or non-finite tap power");
            if (!neg && !(sum > 0.0 && std::isfinite(sum)))
                fail("pdp: row " + std::to_string(k) + " must have total power alpha_k > 0");
        }
    }
    return bad;
}

ValidatedConfig validate(const SystemConfig& cfg) {
    auto bad = check(cfg);
    if (!bad.empty()) throw ConfigError(std::move(bad));

    ValidatedConfig v;
    v.cfg = cfg;
    v.layout = block_layout(cfg.K, cfg.L, cfg.N_D);
    v.alpha.resize(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        double s = 0.0;
        for (double d : cfg.pdp[static_cast<std::size_t>(k)]) s += d;
        v.alpha[static_cast<std::size_t>(k)] = s;
        v.alpha_total += s;
    }
    v.P_p = cfg.beta * cfg.P_D;
    return v;
}

}  // namespace pnmimo
