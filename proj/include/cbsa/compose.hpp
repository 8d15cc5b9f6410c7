#pragma once

#include <set>
#include <string>
#include <vector>

#include "cbsa/component.hpp"

namespace cbsa {

/// Shared-variable composition of components with a total execution order.
///
/// The composition is itself a component: state is the union of the parts'
/// state plus the connected inputs, inputs are the unconnected ones, outputs
/// the union of the parts' outputs. Variables written by a later part and read
/// by an earlier one as part of a feedback loop carry a 1-tick delay.
class Composition {
  public:
    Composition() = default;

    /// A single component is the trivial composition of itself.
    Composition(Component part)  // NOLINT: implicit by design, enables compose(a, b) on leaves
        : parts_{std::move(part)} {
        const Component &c = parts_.front();
        state_ = c.state_vars();
        inputs_ = c.input_vars();
        outputs_ = c.output_vars();
        rebuild_part_views();
    }

    const std::vector<Component> &parts() const { return parts_; }
    const std::set<std::string> &state_vars() const { return state_; }
    const std::set<std::string> &input_vars() const { return inputs_; }
    const std::set<std::string> &output_vars() const { return outputs_; }
    const std::set<std::string> &hidden_vars() const { return hidden_; }
    const std::set<std::string> &delayed_vars() const { return delayed_; }

    /// All variables that must be present in the store before stepping.
    std::set<std::string> all_vars() const {
        return detail::set_union(detail::set_union(state_, inputs_), outputs_);
    }

    /// Delayed variables as seen by part k: those written by a later part.
    const std::set<std::string> &delayed_reads_for(std::size_t part_index) const {
        return delayed_reads_[part_index];
    }

    const std::set<std::string> &readable_for(std::size_t part_index) const {
        return readable_[part_index];
    }

    friend Composition compose(const Composition &a, const Composition &b);

  private:
    void rebuild_part_views() {
        delayed_reads_.assign(parts_.size(), {});
        readable_.clear();
        readable_.reserve(parts_.size());
        // writer index for every output variable (output sets are disjoint)
        std::map<std::string, std::size_t> writer;
        for (std::size_t k = 0; k < parts_.size(); ++k)
            for (const auto &v : parts_[k].output_vars()) writer[v] = k;
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            for (const auto &v : delayed_) {
                auto it = writer.find(v);
                if (it != writer.end() && it->second > k) delayed_reads_[k].insert(v);
            }
            readable_.push_back(parts_[k].readable_vars());
        }
    }

    std::vector<Component> parts_;   // execution order, left to right
    std::set<std::string> state_;
    std::set<std::string> inputs_;
    std::set<std::string> outputs_;
    std::set<std::string> hidden_;   // connected inputs moved into state
    std::set<std::string> delayed_;  // feedback back-edge variables
    std::vector<std::set<std::string>> delayed_reads_;
    std::vector<std::set<std::string>> readable_;
};

/// Binary composition. Execution order is (a, b); the result's variable sets
/// follow the composition rule
///   x = x1 u x2 u (y1 n u2) u (y2 n u1),  u = (u1 u u2) - (y1 u y2),
///   y = y1 u y2.
/// When outputs of each side feed inputs of the other, a feedback loop exists
/// and the variables flowing from b back into a are delayed by one tick.
///
/// Throws CompositionError when state or output sets overlap.
inline Composition compose(const Composition &a, const Composition &b) {
    using detail::set_intersect;
    using detail::set_minus;
    using detail::set_union;

    auto state_overlap = set_intersect(a.state_vars(), b.state_vars());
    if (!state_overlap.empty())
        throw CompositionError("state variable sets overlap on '" + *state_overlap.begin() + "'");
    auto out_overlap = set_intersect(a.output_vars(), b.output_vars());
    if (!out_overlap.empty())
        throw CompositionError("output variable sets overlap on '" + *out_overlap.begin() + "'");

    const auto fwd = set_intersect(a.output_vars(), b.input_vars());  // y1 n u2
    const auto bwd = set_intersect(b.output_vars(), a.input_vars());  // y2 n u1

    Composition r;
    r.parts_ = a.parts_;
    r.parts_.insert(r.parts_.end(), b.parts_.begin(), b.parts_.end());
    r.state_ = set_union(set_union(a.state_vars(), b.state_vars()), set_union(fwd, bwd));
    r.inputs_ = set_minus(set_union(a.input_vars(), b.input_vars()),
                          set_union(a.output_vars(), b.output_vars()));
    r.outputs_ = set_union(a.output_vars(), b.output_vars());
    r.hidden_ = set_union(set_union(a.hidden_, b.hidden_), set_union(fwd, bwd));
    r.delayed_ = set_union(a.delayed_, b.delayed_);
    if (!fwd.empty() && !bwd.empty()) {
        // feedback loop: b executes after a, so b's outputs into a are the
        // back-edges and get the 1-tick delay
        r.delayed_ = set_union(r.delayed_, bwd);
    }
    r.rebuild_part_views();
    return r;
}

/// n-ary composition as a left fold of the binary operator.
inline Composition compose_all(std::vector<Composition> parts) {
    if (parts.empty()) return {};
    Composition acc = std::move(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i) acc = compose(acc, parts[i]);
    return acc;
}

} // namespace cbsa
