#include "pbn/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pbn {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& why) {
    throw Error(ErrorCode::SchemaError, path + ": " + why);
}

const json& member(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path + "." + key, "missing required member");
    return *it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) schema_fail(path, "expected a number");
    return j.get<double>();
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) schema_fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) schema_fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::string> string_array(const json& j, const std::string& path) {
    if (!j.is_array()) schema_fail(path, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(string_at(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::size_t> index_array(const json& j, const std::string& path, std::size_t bound) {
    if (!j.is_array()) schema_fail(path, "expected an array of outcome indices");
    std::vector<std::size_t> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_number_unsigned()) schema_fail(at, "expected a nonnegative integer");
        const auto index = j[i].get<std::size_t>();
        if (index >= bound) schema_fail(at, "outcome index out of range");
        out.push_back(index);
    }
    return out;
}

Rational rational_at(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
        return Rational(j[0].get<long long>(), j[1].get<long long>());
    }
    schema_fail(path, "expected an integer or [numerator, denominator] pair");
}

SampleSpace parse_space(const json& j, const std::string& path) {
    auto labels = string_array(member(j, path, "labels"), path + ".labels");
    auto weights = number_array(member(j, path, "weights"), path + ".weights");
    std::optional<std::vector<double>> bin_widths;
    if (j.contains("bin_widths")) {
        bin_widths = number_array(j["bin_widths"], path + ".bin_widths");
    }
    bool normalize = false;
    if (j.contains("normalize")) {
        if (!j["normalize"].is_boolean()) schema_fail(path + ".normalize", "expected a boolean");
        normalize = j["normalize"].get<bool>();
    }
    return build_space(std::move(labels), std::move(weights), std::move(bin_widths), normalize);
}

MarkovChain parse_chain(const json& j, const std::string& path) {
    auto states = string_array(member(j, path, "states"), path + ".states");
    const json& pj = member(j, path, "p");
    if (!pj.is_array()) schema_fail(path + ".p", "expected an array of rows");
    Matrix p;
    for (std::size_t i = 0; i < pj.size(); ++i) {
        p.push_back(number_array(pj[i], path + ".p[" + std::to_string(i) + "]"));
    }
    auto initial = number_array(member(j, path, "initial"), path + ".initial");
    std::optional<std::vector<double>> values;
    if (j.contains("values")) values = number_array(j["values"], path + ".values");
    return MarkovChain(std::move(states), std::move(p), std::move(initial), std::move(values));
}

Model::ProcessSpec parse_process(const json& j, const std::string& path) {
    Model::ProcessSpec spec;
    const std::string kind = string_at(member(j, path, "kind"), path + ".kind");
    if (kind == "poisson") {
        spec.kind = ProcessKind::Poisson;
        spec.lambda = number_at(member(j, path, "lambda"), path + ".lambda");
    } else if (kind == "brownian") {
        spec.kind = ProcessKind::Brownian;
        spec.mu = number_at(member(j, path, "mu"), path + ".mu");
        spec.sigma = number_at(member(j, path, "sigma"), path + ".sigma");
    } else {
        schema_fail(path + ".kind", "expected \"poisson\" or \"brownian\"");
    }
    spec.grid_times = number_array(member(j, path, "grid"), path + ".grid");
    TimeGrid(spec.grid_times);  // validate now so errors carry the path context
    return spec;
}

DimDeclaration parse_dims(const json& j, const std::string& path) {
    DimDeclaration decl;
    if (!j.is_object()) schema_fail(path, "expected an object of axis assignments");
    for (const auto& [name, entry] : j.items()) {
        const std::string at = path + "." + name;
        if (!entry.is_object()) schema_fail(at, "expected {\"L\": e, \"T\": e, \"M\": e}");
        Dimension dim;
        for (const auto& [axis, exponent] : entry.items()) {
            const Rational e = rational_at(exponent, at + "." + axis);
            if (axis == "L") {
                dim.L = e;
            } else if (axis == "T") {
                dim.T = e;
            } else if (axis == "M") {
                dim.M = e;
            } else {
                schema_fail(at + "." + axis, "unknown base dimension (use L, T, M)");
            }
        }
        decl.declare(name, dim);
    }
    return decl;
}

}  // namespace

Model parse_model(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) schema_fail("$", "expected a top-level object");

    Model model;
    model.source_text = json_text;

    if (root.contains("space")) model.space = parse_space(root["space"], "$.space");

    if (root.contains("events")) {
        const json& events = root["events"];
        if (!events.is_object()) schema_fail("$.events", "expected an object");
        if (!model.has_space()) schema_fail("$.events", "events need a space");
        for (const auto& [name, indices] : events.items()) {
            model.events.emplace(
                name, Event(index_array(indices, "$.events." + name, model.space.size())));
        }
    }

    if (root.contains("rvs")) {
        const json& rvs = root["rvs"];
        if (!rvs.is_object()) schema_fail("$.rvs", "expected an object");
        if (!model.has_space()) schema_fail("$.rvs", "random variables need a space");
        for (const auto& [name, values] : rvs.items()) {
            const std::string at = "$.rvs." + name;
            RandomVariable rv{name, number_array(values, at)};
            if (rv.values.size() != model.space.size()) {
                schema_fail(at, "expected one value per outcome");
            }
            model.rvs.emplace(name, std::move(rv));
        }
    }

    if (root.contains("partitions")) {
        const json& partitions = root["partitions"];
        if (!partitions.is_object()) schema_fail("$.partitions", "expected an object");
        if (!model.has_space()) schema_fail("$.partitions", "partitions need a space");
        for (const auto& [name, atoms_json] : partitions.items()) {
            const std::string at = "$.partitions." + name;
            if (!atoms_json.is_array()) schema_fail(at, "expected an array of atoms");
            std::vector<Event> atoms;
            for (std::size_t i = 0; i < atoms_json.size(); ++i) {
                atoms.emplace_back(index_array(atoms_json[i], at + "[" + std::to_string(i) + "]",
                                               model.space.size()));
            }
            try {
                model.partitions.emplace(name, Partition(model.space, std::move(atoms)));
            } catch (const Error& e) {
                schema_fail(at, e.what());
            }
        }
    }

    if (root.contains("chains")) {
        const json& chains = root["chains"];
        if (!chains.is_object()) schema_fail("$.chains", "expected an object");
        for (const auto& [name, chain_json] : chains.items()) {
            model.chains.emplace(name, parse_chain(chain_json, "$.chains." + name));
        }
    }

    if (root.contains("processes")) {
        const json& processes = root["processes"];
        if (!processes.is_object()) schema_fail("$.processes", "expected an object");
        for (const auto& [name, process_json] : processes.items()) {
            model.processes.emplace(name, parse_process(process_json, "$.processes." + name));
        }
    }

    if (root.contains("dims")) model.dims = parse_dims(root["dims"], "$.dims");

    return model;
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read model file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

}  // namespace pbn
