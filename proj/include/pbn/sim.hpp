#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbn/dims.hpp"
#include "pbn/error.hpp"
#include "pbn/report.hpp"

namespace pbn {

// Statistical verification is meaningless below this ensemble size.
inline constexpr std::size_t kMinStatPaths = 1000;

class TimeGrid {
  public:
    explicit TimeGrid(std::vector<double> times);

    // 0 = t_0 < t_1 < ... < t_steps = t_end, equal spacing.
    static TimeGrid uniform(double t_end, std::size_t steps);

    std::size_t size() const { return times_.size(); }
    double at(std::size_t i) const { return times_.at(i); }
    const std::vector<double>& times() const { return times_; }

    // Index of a grid time within 1e-12, else TimesNotOnGrid.
    std::size_t index_of(double t) const;

  private:
    std::vector<double> times_;
};

enum class ProcessKind {
    Poisson,
    Brownian,
    CompensatedPoisson,
    CompensatedBrownian,
    QuadraticBrownian,
};

const char* process_kind_name(ProcessKind kind);

struct ProcessDescriptor {
    ProcessKind kind = ProcessKind::Poisson;
    double lambda = 0.0;
    double mu = 0.0;
    double sigma = 0.0;

    // Analytic mean at time t; UnknownMeanFunction where no closed form is
    // tracked (already-compensated and quadratic kinds).
    double mean_at(double t) const;

    // Axis assignments for the parameters: counts dimensionless, the
    // process value carries length, rates 1/time, volatility L/sqrt(T).
    DimDeclaration dim_declaration() const;
};

// Sampled paths over a common grid, one row per path.
class PathEnsemble {
  public:
    PathEnsemble(TimeGrid grid, std::vector<std::vector<double>> paths, std::uint64_t seed,
                 ProcessDescriptor descriptor);

    const TimeGrid& grid() const { return grid_; }
    std::size_t n_paths() const { return paths_.size(); }
    std::uint64_t seed() const { return seed_; }
    const ProcessDescriptor& descriptor() const { return descriptor_; }

    const std::vector<double>& path(std::size_t i) const { return paths_.at(i); }
    double value(std::size_t path, std::size_t time_index) const {
        return paths_.at(path).at(time_index);
    }
    // All path values at one grid index.
    std::vector<double> column(std::size_t time_index) const;

  private:
    TimeGrid grid_;
    std::vector<std::vector<double>> paths_;
    std::uint64_t seed_;
    ProcessDescriptor descriptor_;
};

// Counting paths with independent Poisson(lambda * dt) increments.
PathEnsemble sample_poisson(double lambda, const TimeGrid& grid, std::size_t n_paths,
                            std::uint64_t seed);

// Paths with independent Gaussian increments, mean mu*dt, variance sigma^2*dt.
PathEnsemble sample_brownian(double mu, double sigma, const TimeGrid& grid, std::size_t n_paths,
                             std::uint64_t seed);

// Subtracts the analytic mean function per time column.
PathEnsemble compensate(const PathEnsemble& ensemble);

// M_t = Z_t^2 - sigma^2 t from a compensated Brownian ensemble.
PathEnsemble quadratic_martingale(const PathEnsemble& compensated, double sigma);

struct BinStat {
    double lower = 0.0;  // value-at-s interval, [lower, upper)
    double upper = 0.0;
    std::size_t count = 0;
    double estimate = 0.0;  // sample mean of (Y_t - Y_s) * indicator(bin)
    double stderr_est = 0.0;
    double sigmas = 0.0;
    bool pass = false;
};

struct StatReport {
    bool pass = false;
    std::vector<BinStat> bins;
    double max_sigmas = 0.0;  // pooled worst bin
    double drift = 0.0;       // sample mean of Y_t - Y_s
    double drift_stderr = 0.0;
    double drift_sigmas = 0.0;
    CheckReport rows;
};

// Statistical one-step-mean check: conditioning events are equal-frequency
// bins of the time-s value; each E[(Y_t - Y_s) I_bin] must sit within
// `sigmas` standard errors of zero. Bins holding fewer than 30 paths are
// merged into a neighbor.
StatReport verify_martingale_statistical(const PathEnsemble& ensemble, double s, double t,
                                         std::size_t conditioning_bins = 8, double sigmas = 4.0);

struct IncrementsReport {
    bool pass = false;
    double correlation = 0.0;
    double corr_threshold = 0.0;
    bool corr_pass = false;
    double distance = 0.0;  // two-sample sup distance, X_t - X_s vs X_{t-s} - X_0
    double p_value = 0.0;
    bool homogeneity_pass = false;
    CheckReport rows;
};

// Correlation of increments over [0,s] and [s,t], plus a seeded permutation
// test that X_t - X_s is distributed like X_{t-s} - X_0.
IncrementsReport independent_increments_check(const PathEnsemble& ensemble, double s, double t,
                                              double sigmas = 4.0,
                                              std::size_t n_permutations = 99);

// Mean/variance columns against the analytic values at one grid time.
CheckReport moment_checks(const PathEnsemble& ensemble, double t, double sigmas = 5.0);

// Dimensional consistency of the descriptor's parameters.
CheckReport process_dim_checks(const ProcessDescriptor& descriptor);

}  // namespace pbn
