#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbn/error.hpp"

namespace pbn {

// Tolerance for exact-arithmetic identity checks throughout the library.
inline constexpr double kExactTol = 1e-12;

// Finite sample space: ordered outcomes with probability masses m(x_i).
// Discretized continuous spaces additionally carry one bin width per axis,
// so a mass is density times bin volume.
class SampleSpace {
  public:
    SampleSpace() = default;

    std::size_t size() const { return weights_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t i) const { return weights_.at(i); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::optional<std::vector<double>>& bin_widths() const { return bin_widths_; }
    bool is_discretized() const { return bin_widths_.has_value(); }

    // Total mass, pairwise-summed. Within 1e-12 of 1 by construction.
    double total_mass() const;

    std::optional<std::size_t> index_of(const std::string& label) const;

  private:
    friend SampleSpace build_space(std::vector<std::string> labels, std::vector<double> weights,
                                   std::optional<std::vector<double>> bin_widths, bool normalize);

    std::vector<std::string> labels_;
    std::vector<double> weights_;
    std::optional<std::vector<double>> bin_widths_;
};

// Subset of outcomes, kept as a sorted unique index list.
class Event {
  public:
    Event() = default;
    explicit Event(std::vector<std::size_t> indices);

    static Event full(const SampleSpace& space);
    static Event single(std::size_t index);

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t count() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(std::size_t index) const;

    Event intersect(const Event& other) const;
    Event unite(const Event& other) const;
    Event complement(const SampleSpace& space) const;

    bool operator==(const Event& other) const { return indices_ == other.indices_; }

  private:
    std::vector<std::size_t> indices_;
};

// Real-valued function on the outcomes of one space.
struct RandomVariable {
    std::string name;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator()(std::size_t i) const { return values.at(i); }
};

// sigma-field surrogate: disjoint nonempty atoms covering the space.
class Partition {
  public:
    Partition() = default;
    // Validates disjointness, coverage, and nonemptiness against the space.
    Partition(const SampleSpace& space, std::vector<Event> atoms);

    const std::vector<Event>& atoms() const { return atoms_; }
    std::size_t atom_count() const { return atoms_.size(); }
    std::size_t space_size() const { return space_size_; }

    // Index of the atom containing the outcome.
    std::size_t atom_of(std::size_t outcome) const;

    static Partition trivial(const SampleSpace& space);
    static Partition singletons(const SampleSpace& space);

  private:
    std::vector<Event> atoms_;
    std::vector<std::size_t> atom_index_;  // outcome -> atom
    std::size_t space_size_ = 0;
};

// Refinement chain of partitions: stage n+1 refines stage n.
class Filtration {
  public:
    Filtration() = default;
    explicit Filtration(std::vector<Partition> stages);

    const std::vector<Partition>& stages() const { return stages_; }
    std::size_t depth() const { return stages_.size(); }

  private:
    std::vector<Partition> stages_;
};

// --- operations ------------------------------------------------------------

// Rejects weight sums off by more than 1e-9 unless `normalize` is set, in
// which case weights are rescaled to unit total.
SampleSpace build_space(std::vector<std::string> labels, std::vector<double> weights,
                        std::optional<std::vector<double>> bin_widths = std::nullopt,
                        bool normalize = false);

double event_prob(const SampleSpace& space, const Event& event);

// Joint level-set partition of one or more random variables. Atom order is
// by first-occurring outcome index.
Partition sigma_of_rvs(const SampleSpace& space, std::span<const RandomVariable> rvs);
Partition sigma_of_rv(const SampleSpace& space, const RandomVariable& rv);

// True iff every fine atom lies inside exactly one coarse atom.
bool is_refinement(const Partition& coarse, const Partition& fine);

struct IndependenceResult {
    bool independent = false;
    double residual = 0.0;
};

IndependenceResult check_independence(const SampleSpace& space, const Event& a, const Event& b);

// Cartesian product with weight products, plus maps lifting factor events
// and random variables into the product.
class ProductSpace {
  public:
    static constexpr std::size_t kDefaultSizeCap = 1000000;

    ProductSpace(const SampleSpace& s1, const SampleSpace& s2,
                 std::size_t size_cap = kDefaultSizeCap);

    const SampleSpace& space() const { return space_; }

    Event lift_event_1(const Event& e) const;
    Event lift_event_2(const Event& e) const;
    RandomVariable lift_rv_1(const RandomVariable& rv) const;
    RandomVariable lift_rv_2(const RandomVariable& rv) const;

    // Sums product weights over the other factor; recovers factor weights.
    std::vector<double> marginal_1() const;
    std::vector<double> marginal_2() const;

  private:
    std::size_t index(std::size_t i, std::size_t j) const { return i * n2_ + j; }

    SampleSpace space_;
    std::size_t n1_ = 0;
    std::size_t n2_ = 0;
};

// Shared bounds check: every index of `event` must be valid in `space`.
void require_event_in_space(const SampleSpace& space, const Event& event);
void require_rv_on_space(const SampleSpace& space, const RandomVariable& rv);
void require_partition_on_space(const SampleSpace& space, const Partition& partition);

}  // namespace pbn
