#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbn/error.hpp"
#include "pbn/report.hpp"
#include "pbn/space.hpp"

namespace pbn {

using Matrix = std::vector<std::vector<double>>;

Matrix mat_identity(std::size_t n);
Matrix mat_mul(const Matrix& a, const Matrix& b);
// Naive repeated multiplication and binary exponentiation; the pair gives
// two independent routes to the same power.
Matrix mat_pow_naive(const Matrix& p, std::size_t n);
Matrix mat_pow_squaring(const Matrix& p, std::size_t n);

// Finite-state homogeneous chain: row-stochastic transition matrix, initial
// distribution, optional numeric value per state.
class MarkovChain {
  public:
    MarkovChain(std::vector<std::string> states, Matrix p, std::vector<double> initial,
                std::optional<std::vector<double>> state_values = std::nullopt);

    std::size_t size() const { return states_.size(); }
    const std::vector<std::string>& states() const { return states_; }
    const Matrix& p() const { return p_; }
    const std::vector<double>& row(std::size_t i) const { return p_[i]; }
    const std::vector<double>& initial() const { return initial_; }
    const std::optional<std::vector<double>>& state_values() const { return state_values_; }

    double value_of(std::size_t state) const;

  private:
    std::vector<std::string> states_;
    Matrix p_;
    std::vector<double> initial_;
    std::optional<std::vector<double>> state_values_;
};

// Max entry gap between P^{m+n} (by squaring) and P^m · P^n (naive).
double chapman_kolmogorov_check(const MarkovChain& chain, std::size_t m, std::size_t n);

// Null-space basis of P - I by Gaussian elimination with partial pivoting.
// Vectors are scaled to max-abs 1 with the first nonzero entry positive.
std::vector<std::vector<double>> solve_harmonic(const MarkovChain& chain);

// ||P phi - lambda phi||_inf / ||phi||_inf.
double verify_eigenpair(const MarkovChain& chain, double lambda, const std::vector<double>& phi);

// A discrete-time process: underlying chain dynamics plus a value Y_n
// computed from any positive-probability path prefix (x_0, ..., x_n).
class Process {
  public:
    virtual ~Process() = default;

    const MarkovChain& chain() const { return chain_; }
    const std::string& name() const { return name_; }

    virtual double y_value(std::span<const std::size_t> prefix) const = 0;

  protected:
    Process(MarkovChain chain, std::string name)
        : chain_(std::move(chain)), name_(std::move(name)) {}

    MarkovChain chain_;
    std::string name_;
};

using ProcessPtr = std::unique_ptr<Process>;

// Chain whose every step draws one i.i.d. increment: a start state of value
// 0, then one state per increment value, all rows equal to the increment
// distribution. Path prefixes thus carry exactly n increments after n steps.
MarkovChain iid_increment_chain(const std::vector<double>& values,
                                const std::vector<double>& probs);

// Y_n = phi(X_n). phi must be harmonic (eigenpair at 1).
ProcessPtr make_harmonic_mg(MarkovChain chain, std::vector<double> phi);

// Y_n = lambda^{-n} phi(X_n). The pair (lambda, phi) must verify unless
// `force` deliberately installs a broken pair for negative testing.
ProcessPtr make_eigen_mg(MarkovChain chain, double lambda, std::vector<double> phi,
                         bool force = false);

// Terminal functional of a full horizon-length path (receives state values).
using TerminalFn = std::function<double(std::span<const double> path_values)>;

// Y_n = E[terminal | prefix], by exact enumeration of all extensions.
ProcessPtr make_doob_mg(MarkovChain chain, TerminalFn terminal, std::size_t horizon,
                        std::string terminal_name = "terminal");

// Y_n = normalizer^{-n} exp(lambda_w S_n) on i.i.d. increments, where the
// normalizer is <exp(lambda_w xi)>.
ProcessPtr make_wald_mg(const std::vector<double>& increments, const std::vector<double>& probs,
                        double lambda_w);

// <exp(lambda_w xi)> for the increment distribution.
double wald_normalizer(const std::vector<double>& increments, const std::vector<double>& probs,
                       double lambda_w);

// Y_n = S_n. Zero-mean increments required unless `force`.
ProcessPtr make_random_walk(const std::vector<double>& increments,
                            const std::vector<double>& probs, bool force = false);

// Previsible coefficient rule: V_k computed from increments 1..k-1.
using PrevisibleRule = std::function<double(std::span<const double> past_increments)>;

// Y_n = sum_{k<=n} V_k xi_k with |V_k| <= bound enforced during evaluation.
ProcessPtr make_transform(const std::vector<double>& increments, const std::vector<double>& probs,
                          PrevisibleRule v_rule, double bound, std::string rule_name = "V");

// All positive-probability prefixes up to a horizon. Construction fails
// (TreeTooLarge) when the node count would exceed the cap.
class PathTree {
  public:
    static constexpr std::size_t kDefaultNodeCap = 1000000;

    struct Node {
        std::size_t state = 0;
        std::size_t parent = 0;  // index into the previous level
        double prob = 0.0;       // probability of the whole prefix
    };

    PathTree(const MarkovChain& chain, std::size_t horizon,
             std::size_t node_cap = kDefaultNodeCap);

    std::size_t horizon() const { return levels_.size() - 1; }
    const std::vector<std::vector<Node>>& levels() const { return levels_; }

    // Sum of prefix probabilities at one depth (1 within 1e-10 by
    // construction from a stochastic chain).
    double depth_mass(std::size_t depth) const;

    // Full state sequence of a node.
    std::vector<std::size_t> prefix_of(std::size_t depth, std::size_t index) const;

  private:
    std::vector<std::vector<Node>> levels_;
};

// A chain unrolled to a horizon as a finite sample space: one outcome per
// positive-probability path, with its exact probability as the mass.
struct PathSpace {
    SampleSpace space;
    std::vector<std::vector<std::size_t>> prefixes;  // outcome -> state sequence

    // Outcomes whose state at `time` has the given value (per state_values).
    Event value_event(const MarkovChain& chain, std::size_t time, double value) const;
};

PathSpace make_path_space(const MarkovChain& chain, std::size_t horizon,
                          std::size_t node_cap = PathTree::kDefaultNodeCap);

enum class MgClass { Martingale, Submartingale, Supermartingale, Neither };

const char* mg_class_name(MgClass c);

struct MartingaleReport {
    MgClass classification = MgClass::Neither;
    double max_abs_gap = 0.0;   // max |E[Y_{n+1}|prefix] - Y_n|
    double min_gap = 0.0;       // most negative signed gap
    double max_gap = 0.0;       // most positive signed gap
    double mean_gap = 0.0;      // max_n |<Y_n> - <Y_0>|
    double depth_mass_gap = 0.0;
    std::size_t prefixes_checked = 0;
    CheckReport rows;
};

struct VerifyOptions {
    double tol = 1e-10;
    std::size_t node_cap = PathTree::kDefaultNodeCap;
    // Compute gaps through the one-step difference process
    // E[Y_{n+1} - Y_n | prefix] instead of E[Y_{n+1} | prefix] - Y_n.
    bool via_differences = false;
};

// Exhaustive one-step conditional-mean check over every positive-probability
// prefix shorter than the horizon, plus depth mass and mean invariance.
MartingaleReport verify_martingale_exact(const Process& process, std::size_t horizon,
                                         const VerifyOptions& options = {});

}  // namespace pbn
