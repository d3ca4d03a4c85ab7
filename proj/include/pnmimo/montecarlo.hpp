// montecarlo.hpp - trial orchestration and empirical-vs-analytic gates
//
// Trials are independent coherence blocks. Accumulation is streaming
// Welford per cell; workers own fixed-size chunks of the trial index
// space and partials merge in chunk order, so results are bit-identical
// for any worker count.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pnmimo/config.hpp"
#include "pnmimo/rates.hpp"
#include "pnmimo/stochastics.hpp"

namespace pnmimo::mc {

using pnmimo::cd;

/// Streaming mean/variance of a complex sample, components tracked
/// separately, plus the running fourth absolute moment used for the
/// standard error of the variance estimate.
struct ComplexAccum {
    long long n = 0;
    double mean_re = 0.0, mean_im = 0.0;
    double m2_re = 0.0, m2_im = 0.0;
    double abs4 = 0.0, abs4_c = 0.0;  // Kahan-compensated sum of |x|^4

    void add(cd x);
    void merge(const ComplexAccum& o);

    cd mean() const { return {mean_re, mean_im}; }
    /// E|x - mean|^2 (unbiased, n-1 normalization).
    double variance() const;
    double se_mean_re() const;
    double se_mean_im() const;
    /// Standard error of variance() from the fourth moment; uses the
    /// uncentered |x|^4 sum, which is exact up to O(|mean|^2/n) and the
    /// consumers here have zero-mean samples.
    double se_variance() const;
};

/// Per-(k, i in I_d) trial statistics.
struct CellStats {
    ComplexAccum A;      // desired-signal coefficient A_k[i]
    ComplexAccum en;     // effective noise EN_k[i] = xhat - E[A] x
    ComplexAccum cross;  // (E[A] x) conj(EN): uncorrelatedness check
};

struct EmpiricalStats {
    OscillatorMode mode = OscillatorMode::Synchronous;
    std::uint64_t master_seed = 0;
    long long trials = 0;           // trials actually accumulated
    long long trials_requested = 0;
    bool truncated = false;  // resource exhaustion stopped the run early;
                             // stats remain valid for the completed prefix
    int K = 0, N_D = 0;
    bool se_defined = false;  // trials >= 2
    std::vector<CellStats> cells;

    const CellStats& cell(int k, int n) const { return cells[static_cast<std::size_t>(k) * N_D + n]; }
    CellStats& cell(int k, int n) { return cells[static_cast<std::size_t>(k) * N_D + n]; }
    /// |mean A|^2 / Var(EN); unit-variance symbols make this the SINR.
    double sinr(int k, int n) const;
};

/// Per-trial detector outputs, exposed for the reproducibility contract
/// tests (trial t must not depend on how many trials a run has).
struct TrialValues {
    std::vector<cd> xhat;      // [k][n]
    std::vector<cd> A;         // [k][n]
    std::vector<cd> en;        // [k][n]
    std::vector<cd> data_sym;  // x_k[i], [k][n]
};

struct RunOptions {
    int threads = 0;        // 0: hardware concurrency
    int chunk_size = 256;   // trials per deterministic merge unit
};

/// Runs `trials` independent blocks under the given oscillator mode
/// (overriding the config's) and accumulates empirical statistics.
EmpiricalStats run_trials(const ValidatedConfig& vc, OscillatorMode mode, long long trials,
                          std::uint64_t master_seed, const RunOptions& opts = {});

/// One trial's values through the same path run_trials uses.
TrialValues trial_values(const ValidatedConfig& vc, OscillatorMode mode, std::uint64_t master_seed,
                         std::uint64_t trial);

enum class Quantity { MeanA, VarEN };

struct ComparisonRow {
    int k = 0;
    int i = 0;  // absolute time index in I_d
    Quantity quantity = Quantity::MeanA;
    double empirical = 0.0;
    double analytic = 0.0;
    double se = 0.0;
    double z = 0.0;
};

struct ComparisonReport {
    OscillatorMode mode = OscillatorMode::Synchronous;
    long long trials = 0;
    bool se_defined = false;
    bool enough_trials = false;  // below this the z gate is not meaningful
    std::vector<ComparisonRow> rows;
    double max_abs_z = 0.0;
    double within_5se_fraction = 0.0;
    bool pass = false;  // >= 99% of cells |z| < 5 and none >= 8
};

/// Analytic (mean A, Var EN) per (k, i); injectable for power checks.
using AnalyticProvider = std::function<std::pair<double, double>(int k, int i)>;

/// z-gates the empirical stats against the closed-form mean and variance.
ComparisonReport compare(const EmpiricalStats& stats, const ValidatedConfig& vc);

/// Same gate against an arbitrary provider (test hook).
ComparisonReport compare_with(const EmpiricalStats& stats, const ValidatedConfig& vc,
                              const AnalyticProvider& provider);

/// Comparison CSV: header k,i,quantity,empirical,analytic,se,z plus one
/// comment line with the run manifest.
std::string comparison_csv(const ComparisonReport& rep, const ValidatedConfig& vc,
                           std::uint64_t master_seed);

}  // namespace pnmimo::mc
