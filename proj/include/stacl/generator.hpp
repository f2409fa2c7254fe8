#pragma once

#include "stacl/syntax.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stacl {

// Mechanism of a causal variable: a name, a constant, a copy of another
// variable, or a function symbol applied to such atoms.
struct CausalTerm {
    enum class Kind { Name, Const, Var, App };
    Kind kind = Kind::Name;
    std::string id;
    std::vector<CausalTerm> args;  // App only; every argument is an atom

    static CausalTerm name(std::string id) { return {Kind::Name, std::move(id), {}}; }
    static CausalTerm constant(std::string id) { return {Kind::Const, std::move(id), {}}; }
    static CausalTerm var(std::string id) { return {Kind::Var, std::move(id), {}}; }
    static CausalTerm app(std::string f, std::vector<CausalTerm> args);

    bool operator==(const CausalTerm& o) const { return kind == o.kind && id == o.id && args == o.args; }
};

// Bare identifiers are classified lexically: constants, names, otherwise variables.
CausalTerm parse_causal_term(const std::string& text);
std::string to_string(const CausalTerm& t);

std::set<std::string> fv(const CausalTerm& t);
std::set<std::string> fnc(const CausalTerm& t);  // names and constants
CausalTerm substitute(const CausalTerm& t, const std::string& x, const CausalTerm& r);

struct DataGenerator {
    std::string id;
    std::map<std::string, std::optional<CausalTerm>> assign;  // nullopt is the undefined mechanism

    bool has(const std::string& x) const { return assign.count(x) > 0; }
    bool defined(const std::string& x) const;
    const CausalTerm& at(const std::string& x) const;
    std::vector<std::string> defined_vars() const;  // sorted
    bool operator==(const DataGenerator& o) const { return assign == o.assign; }
};

struct Violation {
    enum class Kind { Cycle, NotClosed, Malformed };
    Kind kind;
    std::vector<std::string> vars;  // offending variable or cycle members, sorted
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const DataGenerator& g);
// Throws std::invalid_argument with the first violation message.
void require_valid(const DataGenerator& g);

// Dependencies first; ties broken by identifier order.  Undefined variables are omitted.
std::vector<std::string> topo_order(const DataGenerator& g);

DataGenerator intervene_eager(const DataGenerator& g, const std::vector<Assign>& assigns);
DataGenerator intervene_lazy(const DataGenerator& g, const std::vector<Assign>& assigns);
DataGenerator intervene(const DataGenerator& g, const Intervention& iv);
// Applies every intervention step of the reference to g; the base id is not checked.
DataGenerator apply_steps(const DataGenerator& g, const GenRef& ref);

// Adds x' := x for every defined x and rewrites the mechanisms to read x'.
DataGenerator expand(const DataGenerator& g);
std::string primed(const std::string& x);

}  // namespace stacl
