#pragma once

#include "stacl/generator.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace stacl {

// Causal diagram of a generator.  U holds names and constants, V the defined
// variables.  Constants are deterministic and never act as path vertices;
// names are unconditioned path vertices.
class Diagram {
public:
    explicit Diagram(const DataGenerator& g);

    const std::vector<std::string>& endogenous() const { return vars_; }
    const std::set<std::string>& exogenous() const { return exo_; }
    const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }

    bool is_var(const std::string& v) const;
    VarTuple parents(const VarTuple& ys) const;    // endogenous only
    VarTuple ancestors(const VarTuple& ys) const;  // endogenous, strict

    // Path graph: variables first, then names.
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t index_of(const std::string& v) const;  // throws for unknown variables
    const std::vector<std::size_t>& parents_of(std::size_t i) const { return pa_[i]; }
    const std::vector<std::size_t>& children_of(std::size_t i) const { return ch_[i]; }
    std::vector<bool> ancestors_star(const VarTuple& zs) const;

private:
    std::vector<std::string> vars_;
    std::set<std::string> exo_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::vector<std::string> nodes_;
    std::vector<std::vector<std::size_t>> pa_, ch_;
};

// x and y non-empty (std::invalid_argument otherwise); overlapping tuples are never separated.
bool d_separated(const Diagram& d, const VarTuple& x, const VarTuple& y, const VarTuple& z);
// Reference implementation enumerating every simple undirected path.
bool d_separated_naive(const Diagram& d, const VarTuple& x, const VarTuple& y, const VarTuple& z);

bool eval_causal_pred(const Diagram& d, const std::string& pred, const std::vector<VarTuple>& args);

// nanc(x, z) in g together with dsep(x, y, z) in the lazily intervened diagram.
bool backdoor_criterion(const DataGenerator& g, const VarTuple& x, const VarTuple& y, const VarTuple& z);

}  // namespace stacl
