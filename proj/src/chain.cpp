#include "pbn/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbn/numeric.hpp"

namespace pbn {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kEigenTol = 1e-10;

}  // namespace

Matrix mat_identity(std::size_t n) {
    Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    const std::size_t k = b.size();
    const std::size_t m = b.empty() ? 0 : b[0].size();
    Matrix out(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < k; ++t) {
            const double a_it = a[i][t];
            if (a_it == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) out[i][j] += a_it * b[t][j];
        }
    }
    return out;
}

Matrix mat_pow_naive(const Matrix& p, std::size_t n) {
    Matrix out = mat_identity(p.size());
    for (std::size_t i = 0; i < n; ++i) out = mat_mul(out, p);
    return out;
}

Matrix mat_pow_squaring(const Matrix& p, std::size_t n) {
    Matrix result = mat_identity(p.size());
    Matrix base = p;
    while (n > 0) {
        if (n & 1) result = mat_mul(result, base);
        n >>= 1;
        if (n > 0) base = mat_mul(base, base);
    }
    return result;
}

MarkovChain::MarkovChain(std::vector<std::string> states, Matrix p, std::vector<double> initial,
                         std::optional<std::vector<double>> state_values)
    : states_(std::move(states)),
      p_(std::move(p)),
      initial_(std::move(initial)),
      state_values_(std::move(state_values)) {
    const std::size_t n = states_.size();
    if (n == 0) throw Error(ErrorCode::LengthMismatch, "chain needs at least one state");
    if (p_.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "transition matrix must have one row per state");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (p_[i].size() != n) {
            throw Error(ErrorCode::LengthMismatch, "transition matrix must be square");
        }
        double row_sum = 0.0;
        for (double entry : p_[i]) {
            if (!(entry >= 0.0)) {
                throw Error(ErrorCode::RowNotStochastic, "negative transition probability");
            }
            row_sum += entry;
        }
        if (std::abs(row_sum - 1.0) > kStochasticTol) {
            std::ostringstream os;
            os << "row " << i << " sums to " << row_sum;
            throw Error(ErrorCode::RowNotStochastic, os.str());
        }
    }
    if (initial_.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "initial distribution length must match states");
    }
    double init_sum = 0.0;
    for (double w : initial_) {
        if (!(w >= 0.0)) throw Error(ErrorCode::NegativeWeight, "negative initial probability");
        init_sum += w;
    }
    if (std::abs(init_sum - 1.0) > kStochasticTol) {
        throw Error(ErrorCode::NotNormalized, "initial distribution must sum to 1");
    }
    if (state_values_ && state_values_->size() != n) {
        throw Error(ErrorCode::LengthMismatch, "state values length must match states");
    }
}

double MarkovChain::value_of(std::size_t state) const {
    if (!state_values_) {
        throw Error(ErrorCode::BadProcess, "chain carries no state values");
    }
    return (*state_values_).at(state);
}

double chapman_kolmogorov_check(const MarkovChain& chain, std::size_t m, std::size_t n) {
    const Matrix direct = mat_pow_squaring(chain.p(), m + n);
    const Matrix split = mat_mul(mat_pow_naive(chain.p(), m), mat_pow_naive(chain.p(), n));
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
        for (std::size_t j = 0; j < direct.size(); ++j) {
            worst = std::max(worst, std::abs(direct[i][j] - split[i][j]));
        }
    }
    return worst;
}

double verify_eigenpair(const MarkovChain& chain, double lambda, const std::vector<double>& phi) {
    const std::size_t n = chain.size();
    if (phi.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "eigenvector length must match state count");
    }
    double norm = 0.0;
    for (double v : phi) norm = std::max(norm, std::abs(v));
    if (norm == 0.0) throw Error(ErrorCode::ZeroVector, "eigenvector must be nonzero");

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += chain.p()[i][j] * phi[j];
        worst = std::max(worst, std::abs(acc - lambda * phi[i]));
    }
    return worst / norm;
}

std::vector<std::vector<double>> solve_harmonic(const MarkovChain& chain) {
    const std::size_t n = chain.size();

    // Reduced row echelon form of P - I with partial pivoting.
    Matrix a = chain.p();
    for (std::size_t i = 0; i < n; ++i) a[i][i] -= 1.0;

    std::vector<std::size_t> pivot_col_of_row;
    std::vector<bool> is_pivot_col(n, false);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < n; ++col) {
        std::size_t best = rank;
        for (std::size_t r = rank + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
        }
        if (std::abs(a[best][col]) <= kEigenTol) continue;
        std::swap(a[rank], a[best]);

        const double pivot = a[rank][col];
        for (std::size_t j = 0; j < n; ++j) a[rank][j] /= pivot;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == rank) continue;
            const double factor = a[r][col];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) a[r][j] -= factor * a[rank][j];
        }
        pivot_col_of_row.push_back(col);
        is_pivot_col[col] = true;
        ++rank;
    }

    std::vector<std::vector<double>> basis;
    for (std::size_t free_col = 0; free_col < n; ++free_col) {
        if (is_pivot_col[free_col]) continue;
        std::vector<double> v(n, 0.0);
        v[free_col] = 1.0;
        for (std::size_t r = 0; r < rank; ++r) {
            v[pivot_col_of_row[r]] = -a[r][free_col];
        }

        // Scale to max-abs 1 with the first nonzero entry positive.
        double norm = 0.0;
        for (double x : v) norm = std::max(norm, std::abs(x));
        for (double& x : v) x /= norm;
        for (double x : v) {
            if (std::abs(x) > kStochasticTol) {
                if (x < 0.0) {
                    for (double& y : v) y = -y;
                }
                break;
            }
        }

        if (verify_eigenpair(chain, 1.0, v) > kEigenTol) {
            throw Error(ErrorCode::NotAnEigenpair,
                        "null-space vector failed the residual gate; matrix is near-degenerate");
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

MarkovChain iid_increment_chain(const std::vector<double>& values,
                                const std::vector<double>& probs) {
    if (values.empty() || values.size() != probs.size()) {
        throw Error(ErrorCode::LengthMismatch, "increment values and probabilities must match");
    }
    const std::size_t k = values.size();
    std::vector<std::string> states;
    states.reserve(k + 1);
    states.emplace_back("start");
    for (std::size_t i = 0; i < k; ++i) states.push_back("xi" + std::to_string(i));

    std::vector<double> row(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) row[i + 1] = probs[i];
    Matrix p(k + 1, row);

    std::vector<double> initial(k + 1, 0.0);
    initial[0] = 1.0;

    std::vector<double> state_values(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) state_values[i + 1] = values[i];

    return MarkovChain(std::move(states), std::move(p), std::move(initial),
                       std::move(state_values));
}

namespace {

double increments_mean(const std::vector<double>& values, const std::vector<double>& probs) {
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += probs[i] * values[i];
    return mean;
}

class HarmonicProcess final : public Process {
  public:
    HarmonicProcess(MarkovChain chain, std::vector<double> phi)
        : Process(std::move(chain), "harmonic"), phi_(std::move(phi)) {}

    double y_value(std::span<const std::size_t> prefix) const override {
        return phi_[prefix.back()];
    }

  private:
    std::vector<double> phi_;
};

class EigenProcess final : public Process {
  public:
    EigenProcess(MarkovChain chain, double lambda, std::vector<double> phi)
        : Process(std::move(chain), "eigen"), lambda_(lambda), phi_(std::move(phi)) {}

    double y_value(std::span<const std::size_t> prefix) const override {
        const auto n = static_cast<double>(prefix.size() - 1);
        return std::pow(lambda_, -n) * phi_[prefix.back()];
    }

  private:
    double lambda_;
    std::vector<double> phi_;
};

class DoobProcess final : public Process {
  public:
    DoobProcess(MarkovChain chain, TerminalFn terminal, std::size_t horizon, std::string tname)
        : Process(std::move(chain), "doob[" + tname + "]"),
          terminal_(std::move(terminal)),
          horizon_(horizon) {}

    double y_value(std::span<const std::size_t> prefix) const override {
        if (prefix.empty() || prefix.size() > horizon_ + 1) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "prefix extends past the terminal horizon " + std::to_string(horizon_));
        }
        std::vector<double> values;
        values.reserve(horizon_ + 1);
        for (std::size_t s : prefix) values.push_back(chain_.value_of(s));
        return extend(values, prefix.back());
    }

  private:
    // Exact conditional mean of the terminal over all extensions.
    double extend(std::vector<double>& values, std::size_t last_state) const {
        if (values.size() == horizon_ + 1) return terminal_(values);
        double acc = 0.0;
        const auto& row = chain_.row(last_state);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] == 0.0) continue;
            values.push_back(chain_.value_of(j));
            acc += row[j] * extend(values, j);
            values.pop_back();
        }
        return acc;
    }

    TerminalFn terminal_;
    std::size_t horizon_;
};

class WaldProcess final : public Process {
  public:
    WaldProcess(MarkovChain chain, double lambda_w, double normalizer)
        : Process(std::move(chain), "wald"), lambda_w_(lambda_w), normalizer_(normalizer) {}

    double y_value(std::span<const std::size_t> prefix) const override {
        double s = 0.0;
        for (std::size_t state : prefix) s += chain_.value_of(state);
        const auto n = static_cast<double>(prefix.size() - 1);
        return std::pow(normalizer_, -n) * std::exp(lambda_w_ * s);
    }

  private:
    double lambda_w_;
    double normalizer_;
};

class WalkProcess final : public Process {
  public:
    explicit WalkProcess(MarkovChain chain) : Process(std::move(chain), "random-walk") {}

    double y_value(std::span<const std::size_t> prefix) const override {
        double s = 0.0;
        for (std::size_t state : prefix) s += chain_.value_of(state);
        return s;
    }
};

class TransformProcess final : public Process {
  public:
    TransformProcess(MarkovChain chain, PrevisibleRule rule, double bound, std::string rule_name)
        : Process(std::move(chain), "transform[" + rule_name + "]"),
          rule_(std::move(rule)),
          bound_(bound) {}

    double y_value(std::span<const std::size_t> prefix) const override {
        std::vector<double> increments;
        increments.reserve(prefix.size() - 1);
        for (std::size_t k = 1; k < prefix.size(); ++k) {
            increments.push_back(chain_.value_of(prefix[k]));
        }
        double y = 0.0;
        for (std::size_t k = 0; k < increments.size(); ++k) {
            const double v =
                rule_(std::span<const double>(increments.data(), k));  // past only
            if (std::abs(v) > bound_ + kStochasticTol) {
                std::ostringstream os;
                os << "coefficient " << v << " exceeds declared bound " << bound_;
                throw Error(ErrorCode::UnboundedTransform, os.str());
            }
            y += v * increments[k];
        }
        return y;
    }

  private:
    PrevisibleRule rule_;
    double bound_;
};

}  // namespace

ProcessPtr make_harmonic_mg(MarkovChain chain, std::vector<double> phi) {
    const double residual = verify_eigenpair(chain, 1.0, phi);
    if (residual > kEigenTol) {
        std::ostringstream os;
        os << "phi is not harmonic: residual " << residual;
        throw Error(ErrorCode::NotAnEigenpair, os.str());
    }
    return std::make_unique<HarmonicProcess>(std::move(chain), std::move(phi));
}

ProcessPtr make_eigen_mg(MarkovChain chain, double lambda, std::vector<double> phi, bool force) {
    if (lambda == 0.0) {
        throw Error(ErrorCode::ZeroLambda, "eigenvalue must be nonzero");
    }
    const double residual = verify_eigenpair(chain, lambda, phi);
    if (!force && residual > kEigenTol) {
        std::ostringstream os;
        os << "(lambda, phi) is not an eigenpair: residual " << residual;
        throw Error(ErrorCode::NotAnEigenpair, os.str());
    }
    return std::make_unique<EigenProcess>(std::move(chain), lambda, std::move(phi));
}

ProcessPtr make_doob_mg(MarkovChain chain, TerminalFn terminal, std::size_t horizon,
                        std::string terminal_name) {
    if (!terminal) throw Error(ErrorCode::BadProcess, "terminal function is empty");
    if (!chain.state_values()) {
        throw Error(ErrorCode::BadProcess, "doob process needs state values");
    }
    return std::make_unique<DoobProcess>(std::move(chain), std::move(terminal), horizon,
                                         std::move(terminal_name));
}

double wald_normalizer(const std::vector<double>& increments, const std::vector<double>& probs,
                       double lambda_w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        acc += probs[i] * std::exp(lambda_w * increments[i]);
    }
    return acc;
}

ProcessPtr make_wald_mg(const std::vector<double>& increments, const std::vector<double>& probs,
                        double lambda_w) {
    if (lambda_w == 0.0) {
        throw Error(ErrorCode::ZeroLambda, "exponential tilt parameter must be nonzero");
    }
    MarkovChain chain = iid_increment_chain(increments, probs);
    const double normalizer = wald_normalizer(increments, probs, lambda_w);
    return std::make_unique<WaldProcess>(std::move(chain), lambda_w, normalizer);
}

ProcessPtr make_random_walk(const std::vector<double>& increments,
                            const std::vector<double>& probs, bool force) {
    MarkovChain chain = iid_increment_chain(increments, probs);
    const double mean = increments_mean(increments, probs);
    if (!force && std::abs(mean) > kStochasticTol) {
        std::ostringstream os;
        os << "increment mean " << mean << " is nonzero";
        throw Error(ErrorCode::NonZeroMeanIncrement, os.str());
    }
    return std::make_unique<WalkProcess>(std::move(chain));
}

ProcessPtr make_transform(const std::vector<double>& increments, const std::vector<double>& probs,
                          PrevisibleRule v_rule, double bound, std::string rule_name) {
    if (!v_rule) throw Error(ErrorCode::BadProcess, "coefficient rule is empty");
    if (!(bound > 0.0)) throw Error(ErrorCode::BadProcess, "coefficient bound must be positive");
    const double mean = increments_mean(increments, probs);
    if (std::abs(mean) > kStochasticTol) {
        throw Error(ErrorCode::NonZeroMeanIncrement, "transform increments must have mean zero");
    }
    MarkovChain chain = iid_increment_chain(increments, probs);
    return std::make_unique<TransformProcess>(std::move(chain), std::move(v_rule), bound,
                                              std::move(rule_name));
}

PathTree::PathTree(const MarkovChain& chain, std::size_t horizon, std::size_t node_cap) {
    std::size_t total = 0;
    levels_.resize(horizon + 1);

    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (chain.initial()[i] == 0.0) continue;
        levels_[0].push_back(Node{i, std::numeric_limits<std::size_t>::max(), chain.initial()[i]});
    }
    total += levels_[0].size();

    for (std::size_t depth = 0; depth < horizon; ++depth) {
        const auto& current = levels_[depth];
        auto& next = levels_[depth + 1];
        for (std::size_t idx = 0; idx < current.size(); ++idx) {
            const auto& row = chain.row(current[idx].state);
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (row[j] == 0.0) continue;
                next.push_back(Node{j, idx, current[idx].prob * row[j]});
                if (++total > node_cap) {
                    std::ostringstream os;
                    os << "path tree exceeds " << node_cap << " nodes";
                    throw Error(ErrorCode::TreeTooLarge, os.str());
                }
            }
        }
    }
}

double PathTree::depth_mass(std::size_t depth) const {
    std::vector<double> probs;
    probs.reserve(levels_.at(depth).size());
    for (const auto& node : levels_[depth]) probs.push_back(node.prob);
    return pairwise_sum(probs);
}

std::vector<std::size_t> PathTree::prefix_of(std::size_t depth, std::size_t index) const {
    std::vector<std::size_t> prefix(depth + 1);
    std::size_t level = depth;
    std::size_t at = index;
    while (true) {
        const Node& node = levels_[level][at];
        prefix[level] = node.state;
        if (level == 0) break;
        at = node.parent;
        --level;
    }
    return prefix;
}

Event PathSpace::value_event(const MarkovChain& chain, std::size_t time, double value) const {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
        if (time >= prefixes[i].size()) {
            throw Error(ErrorCode::IndexOutOfRange, "time exceeds the path-space horizon");
        }
        if (chain.value_of(prefixes[i][time]) == value) indices.push_back(i);
    }
    return Event(std::move(indices));
}

PathSpace make_path_space(const MarkovChain& chain, std::size_t horizon, std::size_t node_cap) {
    const PathTree tree(chain, horizon, node_cap);
    const auto& leaves = tree.levels()[horizon];

    PathSpace out;
    out.prefixes.reserve(leaves.size());
    std::vector<std::string> labels;
    std::vector<double> weights;
    labels.reserve(leaves.size());
    weights.reserve(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        auto prefix = tree.prefix_of(horizon, i);
        std::string label;
        for (std::size_t k = 0; k < prefix.size(); ++k) {
            if (k > 0) label += '>';
            label += chain.states()[prefix[k]];
        }
        labels.push_back(std::move(label));
        weights.push_back(leaves[i].prob);
        out.prefixes.push_back(std::move(prefix));
    }
    out.space = build_space(std::move(labels), std::move(weights));
    return out;
}

const char* mg_class_name(MgClass c) {
    switch (c) {
        case MgClass::Martingale: return "martingale";
        case MgClass::Submartingale: return "submartingale";
        case MgClass::Supermartingale: return "supermartingale";
        case MgClass::Neither: return "neither";
    }
    return "neither";
}

MartingaleReport verify_martingale_exact(const Process& process, std::size_t horizon,
                                         const VerifyOptions& options) {
    const MarkovChain& chain = process.chain();
    const PathTree tree(chain, horizon, options.node_cap);

    // Y at every node, level by level.
    std::vector<std::vector<double>> y(horizon + 1);
    for (std::size_t depth = 0; depth <= horizon; ++depth) {
        const auto& level = tree.levels()[depth];
        y[depth].resize(level.size());
        for (std::size_t idx = 0; idx < level.size(); ++idx) {
            const auto prefix = tree.prefix_of(depth, idx);
            y[depth][idx] = process.y_value(prefix);
        }
    }

    MartingaleReport report;
    report.min_gap = std::numeric_limits<double>::infinity();
    report.max_gap = -std::numeric_limits<double>::infinity();

    for (std::size_t depth = 0; depth < horizon; ++depth) {
        const auto& level = tree.levels()[depth];
        const auto& next = tree.levels()[depth + 1];

        // Children of one parent are contiguous in the next level.
        std::size_t child = 0;
        for (std::size_t idx = 0; idx < level.size(); ++idx) {
            const double y_here = y[depth][idx];
            double gap = options.via_differences ? 0.0 : -y_here;
            const auto& row = chain.row(level[idx].state);
            for (; child < next.size() && next[child].parent == idx; ++child) {
                const double p = row[next[child].state];
                gap += options.via_differences ? p * (y[depth + 1][child] - y_here)
                                               : p * y[depth + 1][child];
            }
            report.min_gap = std::min(report.min_gap, gap);
            report.max_gap = std::max(report.max_gap, gap);
            report.max_abs_gap = std::max(report.max_abs_gap, std::abs(gap));
            ++report.prefixes_checked;
        }
    }

    if (report.prefixes_checked == 0) {
        report.min_gap = 0.0;
        report.max_gap = 0.0;
    }

    const double tol = options.tol;
    if (report.max_abs_gap <= tol) {
        report.classification = MgClass::Martingale;
    } else if (report.min_gap >= -tol) {
        report.classification = MgClass::Submartingale;
    } else if (report.max_gap <= tol) {
        report.classification = MgClass::Supermartingale;
    } else {
        report.classification = MgClass::Neither;
    }

    for (std::size_t depth = 0; depth <= horizon; ++depth) {
        report.depth_mass_gap =
            std::max(report.depth_mass_gap, std::abs(tree.depth_mass(depth) - 1.0));
    }

    // <Y_n> per depth, fixed summation order.
    std::vector<double> depth_mean(horizon + 1);
    for (std::size_t depth = 0; depth <= horizon; ++depth) {
        const auto& level = tree.levels()[depth];
        std::vector<double> terms(level.size());
        for (std::size_t idx = 0; idx < level.size(); ++idx) {
            terms[idx] = level[idx].prob * y[depth][idx];
        }
        depth_mean[depth] = pairwise_sum(terms);
    }
    for (std::size_t depth = 0; depth <= horizon; ++depth) {
        report.mean_gap = std::max(report.mean_gap, std::abs(depth_mean[depth] - depth_mean[0]));
    }

    report.rows.add(exact_row("one-step conditional mean matches the current value",
                              "mg.one-step", report.max_abs_gap, 0.0, tol));
    report.rows.add(exact_row("prefix probabilities sum to one at every depth", "mg.depth-mass",
                              report.depth_mass_gap, 0.0, 1e-10));
    if (report.classification == MgClass::Martingale) {
        report.rows.add(exact_row("mean is invariant across depths", "mg.mean-invariance",
                                  report.mean_gap, 0.0, tol));
    }
    return report;
}

}  // namespace pbn
