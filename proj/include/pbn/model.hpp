#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbn/chain.hpp"
#include "pbn/dims.hpp"
#include "pbn/sim.hpp"
#include "pbn/space.hpp"

namespace pbn {

// Everything a model file can declare, bound into engine objects. Immutable
// after loading.
struct Model {
    SampleSpace space;  // empty when the model declares none
    std::map<std::string, Event> events;
    std::map<std::string, RandomVariable> rvs;
    std::map<std::string, Partition> partitions;
    std::map<std::string, MarkovChain> chains;

    struct ProcessSpec {
        ProcessKind kind = ProcessKind::Poisson;
        double lambda = 0.0;
        double mu = 0.0;
        double sigma = 0.0;
        std::vector<double> grid_times;
    };
    std::map<std::string, ProcessSpec> processes;

    DimDeclaration dims;

    std::string source_text;  // verbatim file contents, for report hashing

    bool has_space() const { return space.size() > 0; }
};

// Parses and validates model JSON. Schema violations raise SchemaError with
// the offending JSON path; object construction failures (bad weights,
// overlapping atoms, non-stochastic rows, ...) propagate from the engine.
Model parse_model(const std::string& json_text);

// parse_model over a file; IoError when unreadable.
Model load_model(const std::string& path);

}  // namespace pbn
