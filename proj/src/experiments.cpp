#include "pnmimo/experiments.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pnmimo/kernels.hpp"
#include "pnmimo/montecarlo.hpp"
#include "pnmimo/toydmc.hpp"

namespace pnmimo::experiments {

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string pdp_summary(const SystemConfig& cfg) {
    // Compact manifest form; exact taps live in the config file, not here.
    std::ostringstream os;
    os << "K=" << cfg.pdp.size() << "xL=" << (cfg.pdp.empty() ? 0 : cfg.pdp[0].size());
    double total = 0.0;
    for (const auto& row : cfg.pdp)
        for (double d : row) total += d;
    os << ",total=" << fmt(total);
    return os.str();
}

void manifest(std::ostream& out, const char* cmd, const CommonParams& p) {
    out << "# pnmimo " << cmd << " seed=" << p.seed << " modes=";
    for (std::size_t j = 0; j < p.modes.size(); ++j) out << (j ? "+" : "") << to_string(p.modes[j]);
    const SystemConfig& c = p.cfg;
    out << " M=" << c.M << " K=" << c.K << " L=" << c.L << " N_D=" << c.N_D << " P_D=" << fmt(c.P_D)
        << " beta=" << fmt(c.beta) << " noise_variance=" << fmt(c.noise_variance)
        << " sigma_phi_sq=" << fmt(c.sigma_phi_sq) << " sigma_theta_sq=" << fmt(c.sigma_theta_sq)
        << " mode=" << to_string(c.mode) << " pdp=" << pdp_summary(c)
        << " kernels=" << kern::backend_name(kern::active_backend()) << "\n";
}

int fail_args(std::ostream& out, const std::string& msg) {
    out << "# error: " << msg << "\n";
    return kBadArguments;
}

template <typename T>
bool strictly_increasing(const std::vector<T>& v) {
    for (std::size_t j = 1; j < v.size(); ++j)
        if (!(v[j] > v[j - 1])) return false;
    return true;
}

ValidatedConfig at_snr_db(const SystemConfig& base, double snr_db) {
    SystemConfig c = base;
    c.P_D = c.noise_variance * from_db(snr_db);
    return validate(c);
}

}  // namespace

std::vector<double> SnrGrid::points() const {
    std::vector<double> g;
    if (!(step_db > 0.0)) return g;
    for (double v = min_db; v <= max_db + 1e-9; v += step_db) g.push_back(v);
    return g;
}

int cmd_rate_vs_snr(const CommonParams& p, const SnrGrid& grid, std::ostream& out) {
    const auto points = grid.points();
    if (points.empty()) return fail_args(out, "snr grid: empty or non-increasing (check --snr-step)");
    manifest(out, "rate-vs-snr", p);
    out << "snr_db,mode,sum_rate_bpcu\n";
    for (Mode mode : p.modes) {
        for (double db : points) {
            const ValidatedConfig vc = at_snr_db(p.cfg, db);
            out << fmt(db) << "," << to_string(mode) << "," << fmt(sum_rate(vc, mode).sum_rate) << "\n";
        }
        const ValidatedConfig vc = validate(p.cfg);
        double asymptote = 0.0;
        for (int k = 0; k < vc->K; ++k) asymptote += high_snr_limit(vc, k, mode);
        out << "inf," << to_string(mode) << "," << fmt(asymptote) << "\n";
    }
    return kOk;
}

int cmd_min_snr_vs_m(const CommonParams& p, const std::vector<int>& m_grid, double target_bpcu,
                     std::ostream& out) {
    if (m_grid.empty() || !strictly_increasing(m_grid))
        return fail_args(out, "M grid: must be nonempty and strictly increasing");
    manifest(out, "min-snr-vs-m", p);
    out << "M,mode,required_snr_db,status\n";
    for (Mode mode : p.modes) {
        for (int m : m_grid) {
            SystemConfig c = p.cfg;
            c.M = m;
            const RequiredSnr r = required_snr_for_rate(validate(c), mode, target_bpcu);
            const char* status = r.status == RequiredSnr::Status::Ok ? "ok"
                                 : r.status == RequiredSnr::Status::InfeasibleTarget
                                     ? "infeasible"
                                     : "degenerate";
            out << m << "," << to_string(mode) << "," << fmt(r.snr_db) << "," << status << "\n";
        }
    }
    return kOk;
}

int cmd_power_gap(const CommonParams& p, const std::vector<double>& osc_constants,
                  const std::vector<double>& targets, const std::vector<int>& m_grid, double f_c_hz,
                  double T_s_sec, std::ostream& out) {
    if (osc_constants.empty() || !strictly_increasing(osc_constants))
        return fail_args(out, "oscillator constants: must be nonempty and strictly increasing");
    if (targets.empty() || !strictly_increasing(targets))
        return fail_args(out, "targets: must be nonempty and strictly increasing");
    if (m_grid.empty() || !strictly_increasing(m_grid))
        return fail_args(out, "M grid: must be nonempty and strictly increasing");
    manifest(out, "power-gap", p);
    out << "sigma_drift_deg,target_bpcu,M,mode,gap_db,status\n";
    for (double c_osc : osc_constants) {
        const double var = derive_increment_variance(f_c_hz, T_s_sec, c_osc);
        // Drift accumulated between end of training and end of data phase.
        const double drift_deg = std::sqrt(var * (p.cfg.N_D + p.cfg.L - 1)) * 180.0 / 3.14159265358979323846;
        for (double target : targets) {
            for (int m : m_grid) {
                SystemConfig c = p.cfg;
                c.M = m;
                c.sigma_phi_sq = var;
                c.sigma_theta_sq = var;
                const ValidatedConfig vc = validate(c);
                const RequiredSnr base = required_snr_for_rate(vc, Mode::NoPhaseNoise, target);
                for (Mode mode : p.modes) {
                    if (mode == Mode::NoPhaseNoise) continue;  // the baseline itself
                    const RequiredSnr r = required_snr_for_rate(vc, mode, target);
                    const bool ok = r.status == RequiredSnr::Status::Ok &&
                                    base.status == RequiredSnr::Status::Ok;
                    out << fmt(drift_deg) << "," << fmt(target) << "," << m << "," << to_string(mode)
                        << "," << (ok ? fmt(r.snr_db - base.snr_db) : "nan") << ","
                        << (ok ? "ok" : "infeasible") << "\n";
                }
            }
        }
    }
    return kOk;
}

int cmd_rate_vs_nd(const CommonParams& p, const std::vector<int>& nd_grid, std::ostream& out) {
    if (nd_grid.empty() || !strictly_increasing(nd_grid))
        return fail_args(out, "N_D grid: must be nonempty and strictly increasing");
    manifest(out, "rate-vs-nd", p);
    out << "N_D,mode,sum_rate_bpcu\n";
    for (Mode mode : p.modes) {
        for (int nd : nd_grid) {
            SystemConfig c = p.cfg;
            c.N_D = nd;
            out << nd << "," << to_string(mode) << "," << fmt(sum_rate(validate(c), mode).sum_rate)
                << "\n";
        }
    }
    return kOk;
}

int cmd_max_rate_vs_k(const CommonParams& p, const std::vector<int>& k_grid, int nd_bound,
                      std::ostream& out) {
    if (k_grid.empty() || !strictly_increasing(k_grid))
        return fail_args(out, "K grid: must be nonempty and strictly increasing");
    if (nd_bound < 1) return fail_args(out, "N_D bound must be >= 1");
    if (p.cfg.pdp.empty()) return fail_args(out, "config has no PDP rows to replicate");
    manifest(out, "max-rate-vs-k", p);
    out << "K,mode,best_N_D,max_sum_rate_bpcu\n";
    for (Mode mode : p.modes) {
        for (int k : k_grid) {
            SystemConfig c = p.cfg;
            c.K = k;
            c.pdp.assign(static_cast<std::size_t>(k), p.cfg.pdp[0]);
            c.N_D = 1;  // layout needs a value; the search supplies its own
            const BestDataLength best = optimize_data_length(validate(c), mode, nd_bound);
            out << k << "," << to_string(mode) << "," << best.N_D << "," << fmt(best.sum_rate)
                << "\n";
        }
    }
    return kOk;
}

int cmd_toy_dmc(std::ostream& out) {
    out << "# pnmimo toy-dmc\n";
    out << "mode,capacity_bits,argmax_p\n";
    const auto cs = toydmc::capacity(toydmc::BranchMode::Sync);
    const auto cns = toydmc::capacity(toydmc::BranchMode::NonSync);
    out << "sync," << fmt(cs.bits) << "," << fmt(cs.argmax_p) << "\n";
    out << "nonsync," << fmt(cns.bits) << "," << fmt(cns.argmax_p) << "\n";
    return kOk;
}

int cmd_validate(const CommonParams& p, long long trials, int threads, std::ostream& out,
                 std::ostream& log) {
    if (trials < 1) return fail_args(out, "trials must be >= 1");
    const ValidatedConfig vc = validate(p.cfg);
    manifest(out, "validate", p);
    out << "mode,k,i,quantity,empirical,analytic,se,z\n";

    mc::RunOptions opts;
    opts.threads = threads;
    bool all_pass = true;
    bool enough = true;
    for (OscillatorMode m : {OscillatorMode::Synchronous, OscillatorMode::NonSynchronous}) {
        const mc::EmpiricalStats stats = mc::run_trials(vc, m, trials, p.seed, opts);
        const mc::ComparisonReport rep = mc::compare(stats, vc);
        const char* mode_name = m == OscillatorMode::Synchronous ? "sync" : "nonsync";
        for (const auto& r : rep.rows) {
            out << mode_name << "," << r.k << "," << r.i << ","
                << (r.quantity == mc::Quantity::MeanA ? "mean_A" : "var_EN") << ","
                << fmt(r.empirical) << "," << fmt(r.analytic) << "," << fmt(r.se) << ","
                << fmt(r.z) << "\n";
        }
        log << "mode=" << mode_name << " trials=" << rep.trials
            << " within_5se=" << fmt(100.0 * rep.within_5se_fraction)
            << "% max|z|=" << fmt(rep.max_abs_z) << (rep.pass ? " PASS" : " FAIL") << "\n";
        if (stats.truncated)
            log << "warning: run truncated by resource exhaustion after " << stats.trials << " of "
                << stats.trials_requested << " trials; statistics cover the completed prefix\n";
        all_pass = all_pass && rep.pass;
        enough = enough && rep.enough_trials;
    }
    if (!enough) {
        log << "insufficient trials for the 5-sigma gate (need >= 1000)\n";
        return kInsufficientTrials;
    }
    return all_pass ? kOk : kComparisonFailed;
}

SystemConfig default_config() {
    SystemConfig c;
    c.M = 200;
    c.K = 10;
    c.L = 20;
    c.N_D = 1000;
    c.P_D = 1.0;
    c.beta = 1.0;
    c.noise_variance = 1.0;
    const double var = derive_increment_variance(2e9, 1e-7, 4.7e-18);
    c.sigma_phi_sq = var;
    c.sigma_theta_sq = var;
    c.pdp.assign(static_cast<std::size_t>(c.K), exponential_pdp(c.L, 0.35, 1.0));
    c.mode = OscillatorMode::Synchronous;
    return c;
}

SystemConfig default_validation_config() {
    SystemConfig c;
    c.M = 8;
    c.K = 2;
    c.L = 4;
    c.N_D = 16;
    c.P_D = 10.0;
    c.beta = 1.0;
    c.noise_variance = 1.0;
    c.sigma_phi_sq = 1e-4;
    c.sigma_theta_sq = 1e-4;
    c.pdp.assign(2, exponential_pdp(4, 0.35, 1.0));
    c.mode = OscillatorMode::Synchronous;
    return c;
}

SystemConfig load_config_file(const std::string& path, bool renormalize_pdp_rows) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;

    SystemConfig c = default_config();
    if (j.contains("M")) c.M = j["M"].get<int>();
    if (j.contains("K")) c.K = j["K"].get<int>();
    if (j.contains("L")) c.L = j["L"].get<int>();
    if (j.contains("N_D")) c.N_D = j["N_D"].get<int>();
    if (j.contains("P_D")) c.P_D = j["P_D"].get<double>();
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("noise_variance")) c.noise_variance = j["noise_variance"].get<double>();

    const bool has_phi = j.contains("sigma_phi_sq");
    const bool has_theta = j.contains("sigma_theta_sq");
    const bool has_osc = j.contains("c_phi") || j.contains("c_theta");
    if (has_osc) {
        if (has_phi || has_theta)
            throw std::runtime_error(
                "config: give either sigma_*_sq or (f_c, T_s, c_*), not both");
        const double f_c = j.value("f_c", 2e9);
        const double T_s = j.value("T_s", 1e-7);
        c.sigma_phi_sq = derive_increment_variance(f_c, T_s, j.value("c_phi", 0.0));
        c.sigma_theta_sq = derive_increment_variance(f_c, T_s, j.value("c_theta", 0.0));
    } else {
        if (has_phi) c.sigma_phi_sq = j["sigma_phi_sq"].get<double>();
        if (has_theta) c.sigma_theta_sq = j["sigma_theta_sq"].get<double>();
    }

    if (j.contains("mode")) {
        const std::string m = j["mode"].get<std::string>();
        if (m == "synchronous" || m == "sync")
            c.mode = OscillatorMode::Synchronous;
        else if (m == "non-synchronous" || m == "nonsync")
            c.mode = OscillatorMode::NonSynchronous;
        else
            throw std::runtime_error("config: mode must be synchronous or non-synchronous");
    }

    if (j.contains("pdp")) {
        const auto& p = j["pdp"];
        if (p.is_object() && p.contains("exponential")) {
            const auto& e = p["exponential"];
            c.pdp.assign(static_cast<std::size_t>(c.K),
                         exponential_pdp(c.L, e.value("decay", 0.35), e.value("alpha", 1.0)));
        } else if (p.is_array()) {
            c.pdp = p.get<std::vector<std::vector<double>>>();
        } else {
            throw std::runtime_error("config: pdp must be a K x L array or {\"exponential\": ...}");
        }
    } else {
        c.pdp.assign(static_cast<std::size_t>(c.K), exponential_pdp(c.L, 0.35, 1.0));
    }

    if (j.contains("alpha")) {
        // Optional declared large-scale gains; reject silent mismatches.
        const auto alpha = j["alpha"].get<std::vector<double>>();
        if (static_cast<int>(alpha.size()) != c.K)
            throw std::runtime_error("config: alpha must have K entries");
        for (int k = 0; k < c.K; ++k) {
            double s = 0.0;
            for (double d : c.pdp[static_cast<std::size_t>(k)]) s += d;
            const double rel = std::abs(s - alpha[static_cast<std::size_t>(k)]) /
                               std::max(std::abs(alpha[static_cast<std::size_t>(k)]), 1e-300);
            if (rel > 1e-12) {
                if (!renormalize_pdp_rows)
                    throw std::runtime_error(
                        "config: pdp row " + std::to_string(k) + " sums to " + std::to_string(s) +
                        ", declared alpha is " + std::to_string(alpha[static_cast<std::size_t>(k)]) +
                        " (rerun with --renormalize-pdp to rescale)");
                c.pdp[static_cast<std::size_t>(k)] =
                    renormalize_pdp(c.pdp[static_cast<std::size_t>(k)], alpha[static_cast<std::size_t>(k)]);
            }
        }
    }
    return c;
}

}  // namespace pnmimo::experiments
