#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cbsa/contract.hpp"

namespace cbsa {

/// Static discharge graph: one node per contract, one edge per assumption
/// token matched by another component's guarantee token.
class DischargeGraph {
  public:
    void add_contract(const Contract &c) {
        nodes_.push_back({c.component, c.assumption_tokens, c.guarantee_tokens});
    }

    /// Mark an edge as crossing a feedback-delayed variable; such edges are
    /// exempt from the acyclicity requirement.
    void mark_delayed(const std::string &guarantor, const std::string &assumer) {
        delayed_.insert({guarantor, assumer});
    }

    struct Node {
        std::string component;
        std::set<std::string> assumption_tokens;
        std::set<std::string> guarantee_tokens;
    };

    const std::vector<Node> &nodes() const { return nodes_; }
    const std::set<std::pair<std::string, std::string>> &delayed_edges() const { return delayed_; }

  private:
    std::vector<Node> nodes_;
    std::set<std::pair<std::string, std::string>> delayed_;
};

struct DischargeReport {
    bool passed = true;
    std::vector<std::string> uncovered_assumptions;  ///< "component:token"
    std::vector<std::string> multiply_covered;       ///< "component:token"
    std::vector<std::string> unused_guarantees;      ///< informational only
    std::vector<std::string> cycles;

    std::string summary() const {
        std::ostringstream os;
        os << (passed ? "discharge check passed" : "discharge check FAILED");
        for (const auto &s : uncovered_assumptions) os << "\n  uncovered assumption: " << s;
        for (const auto &s : multiply_covered) os << "\n  multiply covered assumption: " << s;
        for (const auto &s : cycles) os << "\n  cycle: " << s;
        for (const auto &s : unused_guarantees) os << "\n  unused guarantee: " << s;
        return os.str();
    }
};

/// Check the asymmetric assume-guarantee rule over the whole graph: every
/// assumption token is either the literal "true" or covered by exactly one
/// guarantee token of another component, and the discharge edges (minus the
/// delayed-feedback ones) form no cycle.
inline DischargeReport check_discharge(const DischargeGraph &g) {
    DischargeReport report;
    std::set<std::string> used_guarantees;
    // component-level edges guarantor -> assumer for the cycle check
    std::map<std::string, std::set<std::string>> edges;

    for (const auto &node : g.nodes()) {
        for (const auto &token : node.assumption_tokens) {
            if (token == "true") continue;
            std::vector<std::string> guarantors;
            for (const auto &other : g.nodes()) {
                if (other.component == node.component) continue;
                if (other.guarantee_tokens.count(token)) guarantors.push_back(other.component);
            }
            if (guarantors.empty()) {
                report.uncovered_assumptions.push_back(node.component + ":" + token);
                report.passed = false;
            } else if (guarantors.size() > 1) {
                report.multiply_covered.push_back(node.component + ":" + token);
                report.passed = false;
            } else {
                used_guarantees.insert(guarantors.front() + ":" + token);
                if (!g.delayed_edges().count({guarantors.front(), node.component}))
                    edges[guarantors.front()].insert(node.component);
            }
        }
    }

    for (const auto &node : g.nodes())
        for (const auto &token : node.guarantee_tokens)
            if (!used_guarantees.count(node.component + ":" + token))
                report.unused_guarantees.push_back(node.component + ":" + token);

    // DFS cycle detection over the component edges
    std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
    std::vector<std::string> stack;
    std::function<bool(const std::string &)> dfs = [&](const std::string &u) {
        color[u] = 1;
        stack.push_back(u);
        for (const auto &v : edges[u]) {
            if (color[v] == 1) {
                std::ostringstream os;
                for (const auto &s : stack) os << s << " -> ";
                os << v;
                report.cycles.push_back(os.str());
                return true;
            }
            if (color[v] == 0 && dfs(v)) return true;
        }
        stack.pop_back();
        color[u] = 2;
        return false;
    };
    for (const auto &node : g.nodes()) {
        if (color[node.component] == 0 && dfs(node.component)) {
            report.passed = false;
            break;
        }
    }
    return report;
}

} // namespace cbsa
