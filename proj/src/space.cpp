#include "pbn/space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "pbn/numeric.hpp"

namespace pbn {

namespace {

// Weight sums farther than this from 1 are rejected at construction.
constexpr double kBuildTol = 1e-9;

std::string index_msg(std::size_t index, std::size_t size) {
    std::ostringstream os;
    os << "outcome index " << index << " out of range for space of size " << size;
    return os.str();
}

}  // namespace

double SampleSpace::total_mass() const {
    return pairwise_sum(weights_);
}

std::optional<std::size_t> SampleSpace::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) return i;
    }
    return std::nullopt;
}

SampleSpace build_space(std::vector<std::string> labels, std::vector<double> weights,
                        std::optional<std::vector<double>> bin_widths, bool normalize) {
    if (labels.size() != weights.size()) {
        throw Error(ErrorCode::LengthMismatch, "labels and weights must have equal length");
    }
    if (labels.empty()) {
        throw Error(ErrorCode::LengthMismatch, "a sample space needs at least one outcome");
    }
    {
        std::set<std::string> seen;
        for (const auto& label : labels) {
            if (!seen.insert(label).second) {
                throw Error(ErrorCode::DuplicateLabel, "duplicate outcome label '" + label + "'");
            }
        }
    }
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw Error(ErrorCode::NegativeWeight, "negative or NaN probability mass");
        }
    }
    if (bin_widths) {
        for (double dx : *bin_widths) {
            if (!(dx > 0.0)) {
                throw Error(ErrorCode::NegativeWeight, "bin widths must be positive");
            }
        }
    }

    const double total = pairwise_sum(weights);
    if (normalize) {
        if (total <= 0.0) {
            throw Error(ErrorCode::NotNormalized, "cannot normalize zero total mass");
        }
        for (double& w : weights) w /= total;
    } else if (std::abs(total - 1.0) > kBuildTol) {
        std::ostringstream os;
        os << "weights sum to " << total << ", expected 1 within " << kBuildTol;
        throw Error(ErrorCode::NotNormalized, os.str());
    }

    SampleSpace space;
    space.labels_ = std::move(labels);
    space.weights_ = std::move(weights);
    space.bin_widths_ = std::move(bin_widths);
    return space;
}

Event::Event(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

Event Event::full(const SampleSpace& space) {
    std::vector<std::size_t> all(space.size());
    std::iota(all.begin(), all.end(), 0);
    return Event(std::move(all));
}

Event Event::single(std::size_t index) {
    return Event({index});
}

bool Event::contains(std::size_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

Event Event::intersect(const Event& other) const {
    std::vector<std::size_t> out;
    std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(),
                          other.indices_.end(), std::back_inserter(out));
    return Event(std::move(out));
}

Event Event::unite(const Event& other) const {
    std::vector<std::size_t> out;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(out));
    return Event(std::move(out));
}

Event Event::complement(const SampleSpace& space) const {
    require_event_in_space(space, *this);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (!contains(i)) out.push_back(i);
    }
    return Event(std::move(out));
}

void require_event_in_space(const SampleSpace& space, const Event& event) {
    for (std::size_t i : event.indices()) {
        if (i >= space.size()) {
            throw Error(ErrorCode::IndexOutOfRange, index_msg(i, space.size()));
        }
    }
}

void require_rv_on_space(const SampleSpace& space, const RandomVariable& rv) {
    if (rv.size() != space.size()) {
        std::ostringstream os;
        os << "random variable '" << rv.name << "' has " << rv.size()
           << " values but the space has " << space.size() << " outcomes";
        throw Error(ErrorCode::SpaceMismatch, os.str());
    }
}

void require_partition_on_space(const SampleSpace& space, const Partition& partition) {
    if (partition.space_size() != space.size()) {
        std::ostringstream os;
        os << "partition covers " << partition.space_size() << " outcomes but the space has "
           << space.size();
        throw Error(ErrorCode::SpaceMismatch, os.str());
    }
}

Partition::Partition(const SampleSpace& space, std::vector<Event> atoms)
    : atoms_(std::move(atoms)), space_size_(space.size()) {
    atom_index_.assign(space_size_, atoms_.size());
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
        const Event& atom = atoms_[a];
        if (atom.empty()) {
            throw Error(ErrorCode::EmptyAtom, "partition atoms must be nonempty");
        }
        for (std::size_t i : atom.indices()) {
            if (i >= space_size_) {
                throw Error(ErrorCode::IndexOutOfRange, index_msg(i, space_size_));
            }
            if (atom_index_[i] != atoms_.size()) {
                std::ostringstream os;
                os << "outcome " << i << " appears in more than one atom";
                throw Error(ErrorCode::AtomsOverlap, os.str());
            }
            atom_index_[i] = a;
        }
    }
    for (std::size_t i = 0; i < space_size_; ++i) {
        if (atom_index_[i] == atoms_.size()) {
            std::ostringstream os;
            os << "outcome " << i << " is not covered by any atom";
            throw Error(ErrorCode::AtomsIncomplete, os.str());
        }
    }
}

std::size_t Partition::atom_of(std::size_t outcome) const {
    if (outcome >= atom_index_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, index_msg(outcome, atom_index_.size()));
    }
    return atom_index_[outcome];
}

Partition Partition::trivial(const SampleSpace& space) {
    return Partition(space, {Event::full(space)});
}

Partition Partition::singletons(const SampleSpace& space) {
    std::vector<Event> atoms;
    atoms.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) atoms.push_back(Event::single(i));
    return Partition(space, std::move(atoms));
}

Filtration::Filtration(std::vector<Partition> stages) : stages_(std::move(stages)) {
    for (std::size_t k = 0; k + 1 < stages_.size(); ++k) {
        if (!is_refinement(stages_[k], stages_[k + 1])) {
            std::ostringstream os;
            os << "stage " << k + 1 << " does not refine stage " << k;
            throw Error(ErrorCode::NotARefinement, os.str());
        }
    }
}

double event_prob(const SampleSpace& space, const Event& event) {
    require_event_in_space(space, event);
    std::vector<double> masses;
    masses.reserve(event.count());
    for (std::size_t i : event.indices()) masses.push_back(space.weight(i));
    return pairwise_sum(masses);
}

Partition sigma_of_rvs(const SampleSpace& space, std::span<const RandomVariable> rvs) {
    if (rvs.empty()) {
        throw Error(ErrorCode::LengthMismatch, "sigma_of_rvs needs at least one random variable");
    }
    for (const auto& rv : rvs) require_rv_on_space(space, rv);

    // Joint level sets, keyed by the exact value tuple; atoms ordered by
    // first-occurring outcome.
    std::map<std::vector<double>, std::size_t> atom_of_key;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < space.size(); ++i) {
        std::vector<double> key;
        key.reserve(rvs.size());
        for (const auto& rv : rvs) key.push_back(rv.values[i]);
        auto [it, inserted] = atom_of_key.try_emplace(std::move(key), members.size());
        if (inserted) members.emplace_back();
        members[it->second].push_back(i);
    }

    std::vector<Event> atoms;
    atoms.reserve(members.size());
    for (auto& m : members) atoms.emplace_back(std::move(m));
    return Partition(space, std::move(atoms));
}

Partition sigma_of_rv(const SampleSpace& space, const RandomVariable& rv) {
    return sigma_of_rvs(space, std::span<const RandomVariable>(&rv, 1));
}

bool is_refinement(const Partition& coarse, const Partition& fine) {
    if (coarse.space_size() != fine.space_size()) {
        throw Error(ErrorCode::SpaceMismatch, "partitions cover different spaces");
    }
    for (const Event& atom : fine.atoms()) {
        const std::size_t home = coarse.atom_of(atom.indices().front());
        for (std::size_t i : atom.indices()) {
            if (coarse.atom_of(i) != home) return false;
        }
    }
    return true;
}

IndependenceResult check_independence(const SampleSpace& space, const Event& a, const Event& b) {
    const double pa = event_prob(space, a);
    const double pb = event_prob(space, b);
    const double pab = event_prob(space, a.intersect(b));
    IndependenceResult result;
    result.residual = std::abs(pab - pa * pb);
    result.independent = result.residual <= kExactTol;
    return result;
}

ProductSpace::ProductSpace(const SampleSpace& s1, const SampleSpace& s2, std::size_t size_cap)
    : n1_(s1.size()), n2_(s2.size()) {
    if (n1_ == 0 || n2_ == 0) {
        throw Error(ErrorCode::LengthMismatch, "product factors must be nonempty");
    }
    if (n1_ > size_cap / n2_) {
        std::ostringstream os;
        os << "product space would have " << n1_ << " x " << n2_ << " outcomes, cap is "
           << size_cap;
        throw Error(ErrorCode::SizeOverflow, os.str());
    }
    std::vector<std::string> labels;
    std::vector<double> weights;
    labels.reserve(n1_ * n2_);
    weights.reserve(n1_ * n2_);
    for (std::size_t i = 0; i < n1_; ++i) {
        for (std::size_t j = 0; j < n2_; ++j) {
            labels.push_back("(" + s1.label(i) + "," + s2.label(j) + ")");
            weights.push_back(s1.weight(i) * s2.weight(j));
        }
    }

    std::optional<std::vector<double>> widths;
    if (s1.bin_widths() || s2.bin_widths()) {
        widths.emplace();
        if (s1.bin_widths()) {
            widths->insert(widths->end(), s1.bin_widths()->begin(), s1.bin_widths()->end());
        }
        if (s2.bin_widths()) {
            widths->insert(widths->end(), s2.bin_widths()->begin(), s2.bin_widths()->end());
        }
    }
    // Weight products of unit-total factors can drift a few ulps from 1.
    space_ = build_space(std::move(labels), std::move(weights), std::move(widths),
                         /*normalize=*/true);
}

Event ProductSpace::lift_event_1(const Event& e) const {
    std::vector<std::size_t> out;
    out.reserve(e.count() * n2_);
    for (std::size_t i : e.indices()) {
        if (i >= n1_) throw Error(ErrorCode::IndexOutOfRange, index_msg(i, n1_));
        for (std::size_t j = 0; j < n2_; ++j) out.push_back(index(i, j));
    }
    return Event(std::move(out));
}

Event ProductSpace::lift_event_2(const Event& e) const {
    std::vector<std::size_t> out;
    out.reserve(e.count() * n1_);
    for (std::size_t j : e.indices()) {
        if (j >= n2_) throw Error(ErrorCode::IndexOutOfRange, index_msg(j, n2_));
        for (std::size_t i = 0; i < n1_; ++i) out.push_back(index(i, j));
    }
    return Event(std::move(out));
}

RandomVariable ProductSpace::lift_rv_1(const RandomVariable& rv) const {
    if (rv.size() != n1_) {
        throw Error(ErrorCode::SpaceMismatch, "random variable does not live on factor 1");
    }
    RandomVariable out{rv.name, std::vector<double>(n1_ * n2_)};
    for (std::size_t i = 0; i < n1_; ++i) {
        for (std::size_t j = 0; j < n2_; ++j) out.values[index(i, j)] = rv.values[i];
    }
    return out;
}

RandomVariable ProductSpace::lift_rv_2(const RandomVariable& rv) const {
    if (rv.size() != n2_) {
        throw Error(ErrorCode::SpaceMismatch, "random variable does not live on factor 2");
    }
    RandomVariable out{rv.name, std::vector<double>(n1_ * n2_)};
    for (std::size_t i = 0; i < n1_; ++i) {
        for (std::size_t j = 0; j < n2_; ++j) out.values[index(i, j)] = rv.values[j];
    }
    return out;
}

std::vector<double> ProductSpace::marginal_1() const {
    std::vector<double> out(n1_, 0.0);
    for (std::size_t i = 0; i < n1_; ++i) {
        std::vector<double> row(n2_);
        for (std::size_t j = 0; j < n2_; ++j) row[j] = space_.weight(index(i, j));
        out[i] = pairwise_sum(row);
    }
    return out;
}

std::vector<double> ProductSpace::marginal_2() const {
    std::vector<double> out(n2_, 0.0);
    for (std::size_t j = 0; j < n2_; ++j) {
        std::vector<double> col(n1_);
        for (std::size_t i = 0; i < n1_; ++i) col[i] = space_.weight(index(i, j));
        out[j] = pairwise_sum(col);
    }
    return out;
}

}  // namespace pbn
