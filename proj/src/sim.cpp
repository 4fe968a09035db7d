#include "pbn/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "pbn/corpus.hpp"
#include "pbn/numeric.hpp"
#include "pbn/rng.hpp"

namespace pbn {

namespace {

constexpr double kGridTol = 1e-12;
constexpr std::size_t kMinBinCount = 30;

}  // namespace

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) throw Error(ErrorCode::BadGrid, "grid needs at least one time");
    if (std::abs(times_[0]) > kGridTol) {
        throw Error(ErrorCode::BadGrid, "grid must start at time 0");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw Error(ErrorCode::BadGrid, "grid times must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::uniform(double t_end, std::size_t steps) {
    if (!(t_end > 0.0) || steps == 0) {
        throw Error(ErrorCode::BadGrid, "uniform grid needs t_end > 0 and at least one step");
    }
    std::vector<double> times(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        times[i] = t_end * static_cast<double>(i) / static_cast<double>(steps);
    }
    return TimeGrid(std::move(times));
}

std::size_t TimeGrid::index_of(double t) const {
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (std::abs(times_[i] - t) <= kGridTol) return i;
    }
    std::ostringstream os;
    os << "time " << t << " is not a grid point";
    throw Error(ErrorCode::TimesNotOnGrid, os.str());
}

const char* process_kind_name(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::Poisson: return "poisson";
        case ProcessKind::Brownian: return "brownian";
        case ProcessKind::CompensatedPoisson: return "compensated-poisson";
        case ProcessKind::CompensatedBrownian: return "compensated-brownian";
        case ProcessKind::QuadraticBrownian: return "quadratic-brownian";
    }
    return "unknown";
}

double ProcessDescriptor::mean_at(double t) const {
    switch (kind) {
        case ProcessKind::Poisson: return lambda * t;
        case ProcessKind::Brownian: return mu * t;
        default: break;
    }
    throw Error(ErrorCode::UnknownMeanFunction,
                std::string("no analytic mean tracked for ") + process_kind_name(kind));
}

DimDeclaration ProcessDescriptor::dim_declaration() const {
    DimDeclaration decl;
    decl.declare("t", Dimension::time());
    switch (kind) {
        case ProcessKind::Poisson:
        case ProcessKind::CompensatedPoisson:
            decl.declare("lambda", Dimension::time().inverse());
            decl.declare("N", Dimension::dimensionless());
            break;
        case ProcessKind::Brownian:
        case ProcessKind::CompensatedBrownian:
        case ProcessKind::QuadraticBrownian:
            decl.declare("X", Dimension::length());
            decl.declare("mu", Dimension::length() / Dimension::time());
            decl.declare("sigma",
                         Dimension::length() * Dimension::time().pow(Rational(-1, 2)));
            decl.declare("W_s", Dimension::time().pow(Rational(1, 2)));
            break;
    }
    return decl;
}

PathEnsemble::PathEnsemble(TimeGrid grid, std::vector<std::vector<double>> paths,
                           std::uint64_t seed, ProcessDescriptor descriptor)
    : grid_(std::move(grid)), paths_(std::move(paths)), seed_(seed), descriptor_(descriptor) {
    for (const auto& path : paths_) {
        if (path.size() != grid_.size()) {
            throw Error(ErrorCode::LengthMismatch, "path length must match the grid");
        }
    }
}

std::vector<double> PathEnsemble::column(std::size_t time_index) const {
    std::vector<double> out(paths_.size());
    for (std::size_t i = 0; i < paths_.size(); ++i) out[i] = paths_[i].at(time_index);
    return out;
}

PathEnsemble sample_poisson(double lambda, const TimeGrid& grid, std::size_t n_paths,
                            std::uint64_t seed) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::BadRate, "rate must be positive");
    const CounterRng rng(seed);
    std::vector<std::vector<double>> paths(n_paths, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < n_paths; ++i) {
        paths[i][0] = 0.0;
        for (std::size_t j = 1; j < grid.size(); ++j) {
            const double dt = grid.at(j) - grid.at(j - 1);
            auto stream = rng.stream(i, static_cast<std::uint32_t>(j));
            paths[i][j] =
                paths[i][j - 1] + static_cast<double>(stream.next_poisson(lambda * dt));
        }
    }
    ProcessDescriptor descriptor;
    descriptor.kind = ProcessKind::Poisson;
    descriptor.lambda = lambda;
    return PathEnsemble(grid, std::move(paths), seed, descriptor);
}

PathEnsemble sample_brownian(double mu, double sigma, const TimeGrid& grid, std::size_t n_paths,
                             std::uint64_t seed) {
    if (!(sigma > 0.0)) throw Error(ErrorCode::BadVolatility, "volatility must be positive");
    const CounterRng rng(seed);
    std::vector<std::vector<double>> paths(n_paths, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < n_paths; ++i) {
        paths[i][0] = 0.0;
        for (std::size_t j = 1; j < grid.size(); ++j) {
            const double dt = grid.at(j) - grid.at(j - 1);
            auto stream = rng.stream(i, static_cast<std::uint32_t>(j));
            paths[i][j] =
                paths[i][j - 1] + mu * dt + sigma * std::sqrt(dt) * stream.next_gaussian();
        }
    }
    ProcessDescriptor descriptor;
    descriptor.kind = ProcessKind::Brownian;
    descriptor.mu = mu;
    descriptor.sigma = sigma;
    return PathEnsemble(grid, std::move(paths), seed, descriptor);
}

PathEnsemble compensate(const PathEnsemble& ensemble) {
    const ProcessDescriptor& d = ensemble.descriptor();
    ProcessDescriptor out = d;
    switch (d.kind) {
        case ProcessKind::Poisson: out.kind = ProcessKind::CompensatedPoisson; break;
        case ProcessKind::Brownian: out.kind = ProcessKind::CompensatedBrownian; break;
        default:
            throw Error(ErrorCode::UnknownMeanFunction,
                        std::string("cannot compensate ") + process_kind_name(d.kind));
    }
    std::vector<std::vector<double>> paths(ensemble.n_paths());
    for (std::size_t i = 0; i < ensemble.n_paths(); ++i) {
        paths[i].resize(ensemble.grid().size());
        for (std::size_t j = 0; j < ensemble.grid().size(); ++j) {
            paths[i][j] = ensemble.value(i, j) - d.mean_at(ensemble.grid().at(j));
        }
    }
    return PathEnsemble(ensemble.grid(), std::move(paths), ensemble.seed(), out);
}

PathEnsemble quadratic_martingale(const PathEnsemble& compensated, double sigma) {
    if (compensated.descriptor().kind != ProcessKind::CompensatedBrownian) {
        throw Error(ErrorCode::NotCompensatedBrownian,
                    "quadratic construction needs a compensated Brownian input");
    }
    if (!(sigma > 0.0)) throw Error(ErrorCode::BadVolatility, "volatility must be positive");
    std::vector<std::vector<double>> paths(compensated.n_paths());
    for (std::size_t i = 0; i < compensated.n_paths(); ++i) {
        paths[i].resize(compensated.grid().size());
        for (std::size_t j = 0; j < compensated.grid().size(); ++j) {
            const double z = compensated.value(i, j);
            paths[i][j] = z * z - sigma * sigma * compensated.grid().at(j);
        }
    }
    ProcessDescriptor descriptor = compensated.descriptor();
    descriptor.kind = ProcessKind::QuadraticBrownian;
    descriptor.sigma = sigma;
    return PathEnsemble(compensated.grid(), std::move(paths), compensated.seed(), descriptor);
}

StatReport verify_martingale_statistical(const PathEnsemble& ensemble, double s, double t,
                                         std::size_t conditioning_bins, double sigmas) {
    const std::size_t si = ensemble.grid().index_of(s);
    const std::size_t ti = ensemble.grid().index_of(t);
    if (si >= ti) throw Error(ErrorCode::BadGrid, "conditioning time must precede target time");
    const std::size_t n = ensemble.n_paths();
    if (n < kMinStatPaths) {
        std::ostringstream os;
        os << "statistical verification needs at least " << kMinStatPaths << " paths, got " << n;
        throw Error(ErrorCode::TooFewPaths, os.str());
    }
    if (conditioning_bins == 0) {
        throw Error(ErrorCode::DegenerateBin, "need at least one conditioning bin");
    }

    const std::vector<double> ys = ensemble.column(si);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = ensemble.value(i, ti) - ys[i];

    // Equal-frequency cut points on the time-s value. Duplicate cuts collapse
    // so tied values can never straddle a bin boundary.
    std::vector<double> sorted = ys;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (std::size_t b = 1; b < conditioning_bins; ++b) {
        const double edge = sorted[b * n / conditioning_bins];
        if (edges.empty() || edge > edges.back()) edges.push_back(edge);
    }

    const auto bin_of = [&edges](double v) {
        return static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    };

    // Merge under-filled bins into a neighbor by deleting the shared edge.
    std::vector<std::size_t> counts;
    while (true) {
        counts.assign(edges.size() + 1, 0);
        for (double v : ys) ++counts[bin_of(v)];
        std::size_t small = counts.size();
        for (std::size_t b = 0; b < counts.size(); ++b) {
            if (counts[b] < kMinBinCount) {
                small = b;
                break;
            }
        }
        if (small == counts.size() || edges.empty()) break;
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(small == 0 ? 0 : small - 1));
    }
    const std::size_t n_bins = counts.size();
    if (n_bins == 1 && counts[0] < kMinBinCount) {
        throw Error(ErrorCode::DegenerateBin, "too few paths per conditioning bin");
    }

    StatReport report;
    report.pass = true;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> masked(n);
    for (std::size_t b = 0; b < n_bins; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            masked[i] = bin_of(ys[i]) == b ? diff[i] : 0.0;
        }
        BinStat bin;
        bin.lower = b == 0 ? -inf : edges[b - 1];
        bin.upper = b == n_bins - 1 ? inf : edges[b];
        bin.count = counts[b];
        bin.estimate = sample_mean(masked);
        bin.stderr_est = mean_stderr(masked);
        bin.sigmas =
            bin.stderr_est > 0.0 ? std::abs(bin.estimate) / bin.stderr_est
                                 : (bin.estimate == 0.0 ? 0.0 : inf);
        bin.pass = bin.sigmas <= sigmas;
        report.max_sigmas = std::max(report.max_sigmas, bin.sigmas);
        report.pass = report.pass && bin.pass;

        std::ostringstream property;
        property << "conditional increment mean, source-value bin " << b << " of " << n_bins;
        report.rows.add(stat_row(property.str(), "mg.stat.bin", bin.estimate, 0.0,
                                 bin.stderr_est, sigmas));
        report.bins.push_back(bin);
    }

    report.drift = sample_mean(diff);
    report.drift_stderr = mean_stderr(diff);
    report.drift_sigmas =
        report.drift_stderr > 0.0 ? std::abs(report.drift) / report.drift_stderr : 0.0;
    return report;
}

namespace {

// Sup distance between the empirical distributions of two label sets over a
// pre-merged sorted sequence; tied values advance together before the
// distance is sampled.
double two_sample_distance(const std::vector<double>& values,
                           const std::vector<std::uint8_t>& which,
                           const std::vector<std::size_t>& order,
                           const std::vector<std::uint8_t>& swapped) {
    const std::size_t total = order.size();
    double worst = 0.0;
    long long lead = 0;  // (#first sample) - (#second sample) seen so far
    std::size_t i = 0;
    while (i < total) {
        std::size_t j = i;
        while (j < total && values[order[j]] == values[order[i]]) {
            const std::size_t rec = order[j];
            const std::uint8_t label = which[rec] ^ swapped[rec % swapped.size()];
            lead += label == 0 ? 1 : -1;
            ++j;
        }
        worst = std::max(worst, std::abs(static_cast<double>(lead)));
        i = j;
    }
    return worst / static_cast<double>(swapped.size());
}

}  // namespace

IncrementsReport independent_increments_check(const PathEnsemble& ensemble, double s, double t,
                                              double sigmas, std::size_t n_permutations) {
    const std::size_t si = ensemble.grid().index_of(s);
    const std::size_t ti = ensemble.grid().index_of(t);
    if (si == 0 || si >= ti) {
        throw Error(ErrorCode::BadGrid, "need 0 < s < t on the grid");
    }
    const std::size_t ui = ensemble.grid().index_of(t - s);
    const std::size_t n = ensemble.n_paths();

    std::vector<double> early(n), late(n), shifted(n);
    for (std::size_t i = 0; i < n; ++i) {
        early[i] = ensemble.value(i, si) - ensemble.value(i, 0);
        late[i] = ensemble.value(i, ti) - ensemble.value(i, si);
        shifted[i] = ensemble.value(i, ui) - ensemble.value(i, 0);
    }

    IncrementsReport report;

    // Correlation between the two disjoint-window increments.
    const double mean_early = sample_mean(early);
    const double mean_late = sample_mean(late);
    std::vector<double> cross(n);
    for (std::size_t i = 0; i < n; ++i) {
        cross[i] = (early[i] - mean_early) * (late[i] - mean_late);
    }
    const double cov = pairwise_sum(cross) / static_cast<double>(n - 1);
    const double sd_early = std::sqrt(sample_variance(early));
    const double sd_late = std::sqrt(sample_variance(late));
    report.correlation = (sd_early > 0.0 && sd_late > 0.0) ? cov / (sd_early * sd_late) : 0.0;
    report.corr_threshold = sigmas / std::sqrt(static_cast<double>(n));
    report.corr_pass = std::abs(report.correlation) <= report.corr_threshold;
    report.rows.add(stat_row("increments over disjoint windows are uncorrelated",
                             "increments.uncorrelated", report.correlation, 0.0,
                             1.0 / std::sqrt(static_cast<double>(n)), sigmas));

    // Homogeneity: X_t - X_s distributed like X_{t-s} - X_0, judged against
    // seeded per-path label swaps (exchangeable under the null).
    std::vector<double> values(2 * n);
    std::vector<std::uint8_t> which(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = late[i];
        which[i] = 0;
        values[n + i] = shifted[i];
        which[n + i] = 1;
    }
    std::vector<std::size_t> order(2 * n);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<std::uint8_t> swapped(n, 0);
    report.distance = two_sample_distance(values, which, order, swapped);

    corpus::Rng perm_rng(ensemble.seed() ^ 0x7b2f8c1d3e5a9604ULL);
    std::size_t at_least = 0;
    for (std::size_t rep = 0; rep < n_permutations; ++rep) {
        for (std::size_t i = 0; i < n; ++i) {
            swapped[i] = static_cast<std::uint8_t>(perm_rng.next_u64() & 1u);
        }
        if (two_sample_distance(values, which, order, swapped) >= report.distance) ++at_least;
    }
    report.p_value = static_cast<double>(1 + at_least) / static_cast<double>(n_permutations + 1);
    report.homogeneity_pass = report.p_value > 0.01;

    CheckRow homogeneity;
    homogeneity.property = "shifted increment matches the from-zero increment in distribution";
    homogeneity.ref = "increments.homogeneous";
    homogeneity.lhs = report.distance;
    homogeneity.rhs = 0.0;
    homogeneity.residual = report.distance;
    homogeneity.pass = report.homogeneity_pass;
    report.rows.add(homogeneity);

    report.pass = report.corr_pass && report.homogeneity_pass;
    return report;
}

CheckReport moment_checks(const PathEnsemble& ensemble, double t, double sigmas) {
    const std::size_t index = ensemble.grid().index_of(t);
    const std::vector<double> column = ensemble.column(index);
    const std::size_t n = column.size();
    const ProcessDescriptor& d = ensemble.descriptor();

    double mean_target = 0.0;
    std::optional<double> var_target;
    switch (d.kind) {
        case ProcessKind::Poisson:
            mean_target = d.lambda * t;
            var_target = d.lambda * t;
            break;
        case ProcessKind::Brownian:
            mean_target = d.mu * t;
            var_target = d.sigma * d.sigma * t;
            break;
        case ProcessKind::CompensatedPoisson:
            var_target = d.lambda * t;
            break;
        case ProcessKind::CompensatedBrownian:
            var_target = d.sigma * d.sigma * t;
            break;
        case ProcessKind::QuadraticBrownian:
            break;  // mean 0; higher moments not tracked
    }

    CheckReport report;
    report.add(stat_row("sample mean matches the analytic mean", "sim.mean", sample_mean(column),
                        mean_target, mean_stderr(column), sigmas));

    if (var_target) {
        const double mean = sample_mean(column);
        std::vector<double> sq(n), quad(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double dev = column[i] - mean;
            sq[i] = dev * dev;
            quad[i] = sq[i] * sq[i];
        }
        const double m2 = pairwise_sum(sq) / static_cast<double>(n);
        const double m4 = pairwise_sum(quad) / static_cast<double>(n);
        const double variance = sample_variance(column);
        // Asymptotic standard error of the sample variance.
        const double se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / static_cast<double>(n));
        report.add(stat_row("sample variance matches the analytic variance", "sim.variance",
                            variance, *var_target, se, sigmas));

        if (d.kind == ProcessKind::CompensatedBrownian ||
            d.kind == ProcessKind::CompensatedPoisson) {
            std::vector<double> second(n);
            for (std::size_t i = 0; i < n; ++i) second[i] = column[i] * column[i];
            report.add(stat_row("second moment matches the variance growth law",
                                "sim.second-moment", sample_mean(second), *var_target,
                                mean_stderr(second), sigmas));
        }
    }
    return report;
}

CheckReport process_dim_checks(const ProcessDescriptor& descriptor) {
    const DimDeclaration decl = descriptor.dim_declaration();
    CheckReport report;
    const auto add_formula = [&](const std::string& property, const std::string& ref,
                                 const std::string& lhs, const std::string& rhs) {
        const DimCheckResult result = check_formula(lhs, rhs, decl);
        CheckRow row;
        row.property = property;
        row.ref = ref;
        row.residual = result.pass ? 0.0 : 1.0;
        row.pass = result.pass;
        report.add(row);
    };

    switch (descriptor.kind) {
        case ProcessKind::Poisson:
        case ProcessKind::CompensatedPoisson:
            add_formula("rate carries inverse time", "dims.rate", "lambda", "t^-1");
            add_formula("expected count is dimensionless", "dims.count", "lambda * t", "N");
            break;
        case ProcessKind::Brownian:
        case ProcessKind::CompensatedBrownian:
        case ProcessKind::QuadraticBrownian:
            add_formula("drift carries length per time", "dims.drift", "mu * t", "X");
            add_formula("volatility carries length per root time", "dims.volatility", "sigma",
                        "X * t^(-1/2)");
            add_formula("variance grows linearly in time", "dims.variance-growth", "sigma^2 * t",
                        "X^2");
            add_formula("scaled Wiener value carries length", "dims.wiener", "sigma * W_s", "X");
            break;
    }
    return report;
}

}  // namespace pbn
