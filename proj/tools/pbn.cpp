// Command-line front end: expression evaluation, property checks, simulation
// with statistical verification, and dimension checks over JSON models.
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 usage/model/parse
// error. Reports go to stdout (--json for machine-readable form),
// diagnostics to stderr.

#include <charconv>
#include <complex>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbn/bracket.hpp"
#include "pbn/chain.hpp"
#include "pbn/corpus.hpp"
#include "pbn/eval.hpp"
#include "pbn/lang.hpp"
#include "pbn/model.hpp"
#include "pbn/sim.hpp"

namespace {

using nlohmann::json;
using namespace pbn;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

std::string fmt(double v) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const std::string& text) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    return buffer;
}

// Everything shared by the report writers: the command echo, the model
// digest, and the seed in effect.
struct RunContext {
    std::string command;
    std::optional<std::string> model_hash;
    std::uint64_t seed = 42;
    bool as_json = false;
};

json row_to_json(const CheckRow& row) {
    json j{{"name", row.property}, {"lhs", row.lhs},   {"rhs", row.rhs},
           {"residual", row.residual}, {"pass", row.pass}, {"ref", row.ref}};
    if (row.stderr_est) j["stderr"] = *row.stderr_est;
    if (row.sigmas) j["sigmas"] = *row.sigmas;
    return j;
}

void print_row(const CheckRow& row) {
    std::cout << (row.pass ? "  [PASS] " : "  [FAIL] ") << row.property << "  lhs=" << fmt(row.lhs)
              << " rhs=" << fmt(row.rhs) << " residual=" << fmt(row.residual);
    if (row.sigmas) std::cout << " sigmas=" << fmt(*row.sigmas);
    std::cout << "  (" << row.ref << ")\n";
}

// Renders a finished check run and converts it into the exit code.
int finish_report(const RunContext& ctx, const CheckReport& report,
                  const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    if (ctx.as_json) {
        json out{{"command", ctx.command}, {"seed", ctx.seed}};
        if (ctx.model_hash) out["model_hash"] = *ctx.model_hash;
        for (const auto& [key, value] : extra) out[key] = value;
        out["checks"] = json::array();
        for (const auto& row : report.rows) out["checks"].push_back(row_to_json(row));
        out["overall"] = report.all_pass();
        std::cout << out.dump(2) << '\n';
    } else {
        for (const auto& row : report.rows) print_row(row);
        for (const auto& [key, value] : extra) std::cout << key << ": " << value << '\n';
        std::cout << "overall: " << (report.all_pass() ? "PASS" : "FAIL") << " ("
                  << report.rows.size() << " checks)\n";
    }
    return report.all_pass() ? kExitPass : kExitCheckFailed;
}

std::string echo_command(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) out += ' ';
        out += argv[i];
    }
    return out;
}

Model load_model_required(const std::string& path) {
    if (path.empty()) {
        throw Error(ErrorCode::IoError, "this command needs --model");
    }
    return load_model(path);
}

// ---- eval -------------------------------------------------------------

int run_eval(const RunContext& ctx, const Model& model, const std::string& expr_text) {
    const lang::ExprPtr expr = lang::parse(expr_text);
    const lang::EvalResult result = lang::bind_and_eval(*expr, model);

    if (ctx.as_json) {
        json out{{"command", ctx.command},
                 {"seed", ctx.seed},
                 {"expr", expr_text},
                 {"canonical", lang::print(*expr)},
                 {"value", result.real()},
                 {"imag", result.imag()},
                 {"dimension", result.dimension.to_string()}};
        if (ctx.model_hash) out["model_hash"] = *ctx.model_hash;
        std::cout << out.dump(2) << '\n';
        return kExitPass;
    }

    std::string rendered = fmt(result.real());
    if (result.imag() != 0.0) {
        rendered += result.imag() < 0.0 ? " - " : " + ";
        rendered += fmt(std::abs(result.imag()));
        rendered += 'i';
    }
    if (!result.dimension.is_dimensionless()) {
        rendered += "  [" + result.dimension.to_string() + "]";
    }
    std::cout << rendered << '\n';
    return kExitPass;
}

// ---- check suites -----------------------------------------------------

int run_ce_properties(const RunContext& ctx, const std::optional<Model>& model,
                      std::size_t outcomes, std::size_t spaces, double tol) {
    CheckReport all;
    if (model && model->has_space()) {
        const CeInputs inputs = make_ce_inputs(model->space, ctx.seed);
        all = verify_ce_properties(model->space, inputs, ctx.seed, tol);
    } else {
        for (std::size_t i = 0; i < spaces; ++i) {
            const std::uint64_t seed = ctx.seed + i;
            corpus::Rng rng(seed);
            const SampleSpace space = corpus::random_space(rng, outcomes);
            const CeInputs inputs = make_ce_inputs(space, seed);
            all.append(verify_ce_properties(space, inputs, seed, tol));
        }
    }
    return finish_report(ctx, all);
}

int run_indicator(const RunContext& ctx, const std::optional<Model>& model, std::size_t outcomes,
                  std::size_t spaces, double tol) {
    CheckReport all;
    const auto run_one = [&](const SampleSpace& space, std::uint64_t seed) {
        corpus::Rng rng(seed ^ 0x5eedu);
        const RandomVariable x = corpus::random_rv(rng, space.size(), "x");
        const Event a = corpus::random_event(rng, space.size());
        const Event b = corpus::random_event(rng, space.size());
        all.append(indicator_identities(space, x, a, b, tol));
    };
    if (model && model->has_space()) {
        run_one(model->space, ctx.seed);
    } else {
        for (std::size_t i = 0; i < spaces; ++i) {
            corpus::Rng rng(ctx.seed + i);
            run_one(corpus::random_space(rng, outcomes), ctx.seed + i);
        }
    }
    return finish_report(ctx, all);
}

int run_chapman_kolmogorov(const RunContext& ctx, const Model& model, const std::string& chain,
                           std::size_t m, std::size_t n, double tol) {
    const auto it = model.chains.find(chain);
    if (it == model.chains.end()) {
        throw Error(ErrorCode::UnboundName, "no chain named '" + chain + "' in the model");
    }
    const double gap = chapman_kolmogorov_check(it->second, m, n);
    CheckReport report;
    std::ostringstream property;
    property << "transition probabilities compose: P^" << m + n << " vs P^" << m << " P^" << n;
    report.add(exact_row(property.str(), "chain.ck", gap, 0.0, tol));
    return finish_report(ctx, report);
}

ProcessPtr process_from_flags(const Model* model, const std::string& chain,
                              const std::string& walk) {
    if (!walk.empty()) {
        std::vector<double> increments;
        std::vector<double> probs;
        std::istringstream in(walk);
        std::string item;
        while (std::getline(in, item, ',')) {
            const std::size_t colon = item.find(':');
            if (colon == std::string::npos) {
                throw Error(ErrorCode::SchemaError,
                            "--walk expects comma-separated increment:probability pairs");
            }
            increments.push_back(std::stod(item.substr(0, colon)));
            probs.push_back(std::stod(item.substr(colon + 1)));
        }
        return make_random_walk(increments, probs, /*force=*/true);
    }
    if (model == nullptr || chain.empty()) {
        throw Error(ErrorCode::IoError, "martingale checks need --walk or --model with --chain");
    }
    const auto it = model->chains.find(chain);
    if (it == model->chains.end()) {
        throw Error(ErrorCode::UnboundName, "no chain named '" + chain + "' in the model");
    }
    // State-value process Y_n = value(X_n): an eigen process at lambda = 1
    // whose classification the verifier decides.
    std::vector<double> values;
    values.reserve(it->second.size());
    for (std::size_t i = 0; i < it->second.size(); ++i) values.push_back(it->second.value_of(i));
    return make_eigen_mg(it->second, 1.0, std::move(values), /*force=*/true);
}

int run_martingale(const RunContext& ctx, const std::optional<Model>& model,
                   const std::string& chain, const std::string& walk, std::size_t horizon,
                   double tol) {
    const ProcessPtr process = process_from_flags(model ? &*model : nullptr, chain, walk);
    VerifyOptions options;
    options.tol = tol;
    const MartingaleReport report = verify_martingale_exact(*process, horizon, options);
    return finish_report(ctx, report.rows,
                         {{"classification", mg_class_name(report.classification)},
                          {"process", process->name()},
                          {"prefixes", std::to_string(report.prefixes_checked)}});
}

int run_dims(const RunContext& ctx, const std::optional<Model>& model,
             const std::vector<std::string>& formulas) {
    CheckReport report;
    DimDeclaration decl;
    if (model) {
        decl = model->dims;
        for (const auto& [name, spec] : model->processes) {
            ProcessDescriptor descriptor;
            descriptor.kind = spec.kind;
            descriptor.lambda = spec.lambda;
            descriptor.mu = spec.mu;
            descriptor.sigma = spec.sigma;
            CheckReport rows = process_dim_checks(descriptor);
            for (auto& row : rows.rows) row.property = name + ": " + row.property;
            report.append(rows);
        }
    }
    for (const auto& formula : formulas) {
        const DimCheckResult result = check_equation(formula, decl);
        CheckRow row;
        row.property = formula;
        if (!result.detail.empty()) row.property += "  -- " + result.detail;
        row.ref = "dims.formula";
        row.pass = result.pass;
        row.residual = result.pass ? 0.0 : 1.0;
        report.add(row);
    }
    if (report.rows.empty()) {
        throw Error(ErrorCode::IoError, "nothing to check: give --model and/or --formula");
    }
    return finish_report(ctx, report);
}

// ---- simulate ---------------------------------------------------------

int run_simulate(const RunContext& ctx, const Model& model, const std::string& process_name,
                 std::size_t paths, const std::string& check, const std::string& variant,
                 std::optional<double> s_opt, std::optional<double> t_opt, std::size_t bins,
                 double sigmas) {
    const auto it = model.processes.find(process_name);
    if (it == model.processes.end()) {
        throw Error(ErrorCode::UnboundName, "no process named '" + process_name + "' in the model");
    }
    if (paths < kMinStatPaths) {
        throw Error(ErrorCode::TooFewPaths, "simulation needs at least " +
                                                std::to_string(kMinStatPaths) + " paths, got " +
                                                std::to_string(paths));
    }
    const Model::ProcessSpec& spec = it->second;
    const TimeGrid grid(spec.grid_times);

    PathEnsemble ensemble = spec.kind == ProcessKind::Poisson
                                ? sample_poisson(spec.lambda, grid, paths, ctx.seed)
                                : sample_brownian(spec.mu, spec.sigma, grid, paths, ctx.seed);
    if (variant == "compensated") {
        ensemble = compensate(ensemble);
    } else if (variant == "quadratic") {
        ensemble = quadratic_martingale(compensate(ensemble), spec.sigma);
    } else if (variant != "raw") {
        throw Error(ErrorCode::SchemaError, "--variant must be raw, compensated, or quadratic");
    }

    const double t = t_opt.value_or(grid.at(grid.size() - 1));
    const double s = s_opt.value_or(grid.at(grid.size() / 2));

    std::vector<std::pair<std::string, std::string>> extra{
        {"process", process_name}, {"variant", variant}, {"paths", std::to_string(paths)}};

    if (check == "moments") {
        CheckReport report = moment_checks(ensemble, t, sigmas);
        report.append(process_dim_checks(ensemble.descriptor()));
        return finish_report(ctx, report, extra);
    }
    if (check == "martingale") {
        const StatReport report = verify_martingale_statistical(ensemble, s, t, bins, sigmas);
        extra.emplace_back("drift", fmt(report.drift) + " +- " + fmt(report.drift_stderr));
        extra.emplace_back("max_bin_sigmas", fmt(report.max_sigmas));
        return finish_report(ctx, report.rows, extra);
    }
    if (check == "increments") {
        const IncrementsReport report = independent_increments_check(ensemble, s, t, sigmas);
        extra.emplace_back("correlation", fmt(report.correlation));
        extra.emplace_back("homogeneity_p", fmt(report.p_value));
        return finish_report(ctx, report.rows, extra);
    }
    throw Error(ErrorCode::SchemaError, "--check must be moments, martingale, or increments");
}

// ---- diagnostics ------------------------------------------------------

// Caret diagnostic pointing into the offending expression line.
void print_parse_diagnostic(const lang::ParseError& error, const std::string& text) {
    std::cerr << "error: " << error.what() << '\n';
    std::istringstream lines(text);
    std::string line;
    for (std::size_t i = 1; std::getline(lines, line); ++i) {
        if (i == error.line()) {
            std::cerr << "  " << line << '\n'
                      << "  " << std::string(error.column() - 1, ' ') << "^\n";
            return;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"probability bracket engine"};
    app.require_subcommand(1);

    std::string model_path;
    std::string expr_text;
    std::string chain_name;
    std::string walk_spec;
    std::string process_name;
    std::string check_kind = "moments";
    std::string variant = "raw";
    std::string suite;
    std::vector<std::string> formulas;
    std::size_t horizon = 6;
    std::size_t paths = 10000;
    std::size_t bins = 8;
    std::size_t outcomes = 8;
    std::size_t spaces = 20;
    std::size_t power_m = 2;
    std::size_t power_n = 2;
    std::uint64_t seed = 42;
    double tol = 1e-10;
    double sigmas = 4.0;
    std::optional<double> s_time;
    std::optional<double> t_time;
    bool as_json = false;

    app.add_flag("--json", as_json, "emit the report as JSON");
    app.fallthrough();  // let the global --json appear after subcommand flags

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate an expression against a model");
    eval_cmd->add_option("--model", model_path, "model JSON file")->required();
    eval_cmd->add_option("--expr", expr_text, "expression text")->required();

    CLI::App* check_cmd = app.add_subcommand("check", "run a property-check suite");
    check_cmd
        ->add_option("suite", suite,
                     "one of: ce-properties, indicator, chapman-kolmogorov, martingale, dims")
        ->required();
    check_cmd->add_option("--model", model_path, "model JSON file");
    check_cmd->add_option("--chain", chain_name, "chain name within the model");
    check_cmd->add_option("--walk", walk_spec,
                          "increment:probability pairs, e.g. 1:0.5,-1:0.5");
    check_cmd->add_option("--horizon", horizon, "martingale verification depth");
    check_cmd->add_option("--outcomes", outcomes, "random-space size for corpus suites");
    check_cmd->add_option("--spaces", spaces, "number of random spaces for corpus suites");
    check_cmd->add_option("--m", power_m, "left power for chapman-kolmogorov");
    check_cmd->add_option("--n", power_n, "right power for chapman-kolmogorov");
    check_cmd->add_option("--seed", seed, "corpus seed");
    check_cmd->add_option("--tol", tol, "exact-check tolerance");
    check_cmd->add_option("--formula", formulas, "dimension equation \"lhs == rhs\"");

    CLI::App* sim_cmd = app.add_subcommand("simulate", "sample a process and verify it");
    sim_cmd->add_option("--model", model_path, "model JSON file")->required();
    sim_cmd->add_option("--process", process_name, "process name within the model")->required();
    sim_cmd->add_option("--paths", paths, "number of sample paths");
    sim_cmd->add_option("--seed", seed, "ensemble seed");
    sim_cmd->add_option("--check", check_kind, "moments, martingale, or increments");
    sim_cmd->add_option("--variant", variant, "raw, compensated, or quadratic");
    sim_cmd->add_option("--s", s_time, "conditioning time");
    sim_cmd->add_option("--t", t_time, "evaluation time");
    sim_cmd->add_option("--bins", bins, "conditioning bins");
    sim_cmd->add_option("--sigmas", sigmas, "statistical pass threshold");

    CLI::App* dims_cmd = app.add_subcommand("dims", "check dimension assignments");
    dims_cmd->add_option("--model", model_path, "model JSON file");
    dims_cmd->add_option("--formula", formulas, "dimension equation \"lhs == rhs\"");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitError;
    }

    RunContext ctx;
    ctx.command = echo_command(argc, argv);
    ctx.seed = seed;
    ctx.as_json = as_json;

    try {
        std::optional<Model> model;
        if (!model_path.empty()) {
            model = load_model(model_path);
            ctx.model_hash = hash_hex(model->source_text);
        }

        if (eval_cmd->parsed()) {
            try {
                return run_eval(ctx, *model, expr_text);
            } catch (const lang::ParseError& e) {
                print_parse_diagnostic(e, expr_text);
                return kExitError;
            }
        }
        if (check_cmd->parsed()) {
            if (suite == "ce-properties") return run_ce_properties(ctx, model, outcomes, spaces, tol);
            if (suite == "indicator") return run_indicator(ctx, model, outcomes, spaces, tol);
            if (suite == "chapman-kolmogorov") {
                return run_chapman_kolmogorov(ctx, load_model_required(model_path), chain_name,
                                              power_m, power_n, tol);
            }
            if (suite == "martingale") {
                return run_martingale(ctx, model, chain_name, walk_spec, horizon, tol);
            }
            if (suite == "dims") return run_dims(ctx, model, formulas);
            std::cerr << "error: unknown suite '" << suite << "'\n";
            return kExitError;
        }
        if (sim_cmd->parsed()) {
            return run_simulate(ctx, *model, process_name, paths, check_kind, variant, s_time,
                                t_time, bins, sigmas);
        }
        if (dims_cmd->parsed()) return run_dims(ctx, model, formulas);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
