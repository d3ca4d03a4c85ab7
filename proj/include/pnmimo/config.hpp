// config.hpp - system parameters, block schedule and validation
//
// All powers and variances are linear scale here; dB exists only at the
// CLI boundary.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnmimo {

enum class OscillatorMode { Synchronous, NonSynchronous };

std::string to_string(OscillatorMode mode);

/// Raw system parameters. K x L tap powers d_{k,l} live in `pdp`;
/// the per-user large-scale gains alpha_k are always derived from them.
struct SystemConfig {
    int M = 200;     // BS antennas
    int K = 10;      // single-antenna users
    int L = 20;      // channel taps per user
    int N_D = 1000;  // data-phase channel uses

    double P_D = 1.0;             // per-user data-phase transmit power
    double beta = 1.0;            // training-to-data power ratio P_p / P_D
    double noise_variance = 1.0;  // receiver AWGN variance sigma^2
    double sigma_phi_sq = 0.0;    // BS phase increment variance [rad^2/symbol]
    double sigma_theta_sq = 0.0;  // user phase increment variance [rad^2/symbol]

    std::vector<std::vector<double>> pdp;  // K rows of L tap powers
    OscillatorMode mode = OscillatorMode::Synchronous;
};

/// Closed index range [first, last]; empty when last < first (L = 1 makes
/// the guard, preamble and postamble empty).
struct IndexRange {
    int first = 0;
    int last = -1;
    int length() const { return last < first ? 0 : last - first + 1; }
    bool contains(int t) const { return t >= first && t <= last; }
};

/// One coherence block on the timeline t = -(L-1) ... N_c - L.
/// t = 0 is the first training sample; the zero inter-block guard sits on
/// the negative indices. Receive processing only ever touches t >= 0.
struct BlockLayout {
    int K = 0, L = 0, N_D = 0;
    int N_c = 0;  // N_D + (K+3)L - 3, guard included

    IndexRange guard;      // [-(L-1), -1], all-zero
    IndexRange training;   // [0, KL-1], one pilot impulse per user
    IndexRange preamble;   // [KL, (K+1)L-2]
    IndexRange data;       // I_d = [(K+1)L-1, (K+1)L+N_D-2]
    IndexRange postamble;  // [(K+1)L+N_D-1, (K+1)L+N_D+L-3]

    int timeline_begin() const { return -(L - 1); }
    int timeline_end() const { return N_c - L; }
    /// Number of nonnegative timeline samples (everything rx-side needs).
    int rx_samples() const { return timeline_end() + 1; }
    /// Pilot impulse instant of user k (0-based).
    int pilot_time(int k) const { return k * L; }
    /// Phase drift span i - (k-1)L of Wiener-noise formulas, 0-based user.
    int drift(int k, int i) const { return i - k * L; }
};

/// Config plus everything derived from it. Immutable after construction;
/// safe to share read-only across threads.
struct ValidatedConfig {
    SystemConfig cfg;
    BlockLayout layout;
    std::vector<double> alpha;  // alpha_k = sum_l d_{k,l}
    double alpha_total = 0.0;   // sum_q alpha_q
    double P_p = 0.0;           // beta * P_D

    const SystemConfig* operator->() const { return &cfg; }
    double d(int k, int l) const { return cfg.pdp[k][l]; }
};

/// Thrown when validation finds violated invariants; carries all of them.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

/// Wiener increment variance 4 pi^2 f_c^2 c T_s for a free-running
/// oscillator with constant c. c = 0 models an ideal oscillator.
double derive_increment_variance(double f_c_hz, double T_s_sec, double c);

/// Builds the block schedule for given dimensions (all must be >= 1).
BlockLayout block_layout(int K, int L, int N_D);

/// d_l = alpha * exp(-decay*l) / sum_p exp(-decay*p). Sums to alpha to
/// within 1e-12 relative; decay = 0 gives a uniform profile.
std::vector<double> exponential_pdp(int L, double decay, double alpha);

/// Scales a tap sequence so it sums to alpha exactly. Companion to the
/// strict PDP check in validate(): out-of-tolerance inputs are rejected
/// there, never silently rescaled.
std::vector<double> renormalize_pdp(const std::vector<double>& taps, double alpha);

/// Returns the full list of violated invariants, empty if none. Each entry
/// names the offending field.
std::vector<std::string> check(const SystemConfig& cfg);

/// Returns the config with alpha_k, P_p and the block layout attached, or
/// throws ConfigError with the complete violation list.
ValidatedConfig validate(const SystemConfig& cfg);

}  // namespace pnmimo
