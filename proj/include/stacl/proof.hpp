#pragma once

#include "stacl/model.hpp"
#include "stacl/syntax.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stacl {

// Metavariable name to grammar fragment, e.g. {"x": "<x>", "a": "x:=c1"}.
using Bindings = std::map<std::string, std::string>;

enum class Layer { AX, AXCP, AXGCP };

Layer parse_layer(const std::string& s);
std::string to_string(Layer l);
// Layer in which a rule first becomes available.  Throws for unknown rules.
Layer rule_layer(const std::string& rule);
bool is_known_rule(const std::string& rule);

struct Judgment {
    std::vector<FormulaP> context;
    GenRef gen;
    Layer layer = Layer::AXGCP;
    FormulaP conclusion;
};

struct DerivationNode {
    std::string rule;
    Bindings bind;
    FormulaP conclusion;
    std::optional<GenRef> generator;  // declared generator; inherited when absent
    std::vector<DerivationNode> premises;
};

struct Derivation {
    std::string generator_file;  // as written in the file
    std::shared_ptr<const Model> model;
    Layer layer = Layer::AXGCP;
    std::vector<FormulaP> hypotheses;
    DerivationNode root;

    GenRef root_gen() const;
};

struct Rejection {
    std::string path;  // e.g. "root.premises[1]"
    std::string message;
};

// Schema instance for an axiom or a derived rule Do1-Do3.
// Throws std::invalid_argument naming the failed sort, disjointness or side condition.
// Rules listed by needs_generator consult the model; without one, the diagram
// axioms throw and the generator conditions of Dsep_EI1 and PaToDsep are
// skipped (check_step rejects both when the derivation names no model).
FormulaP instantiate_axiom(const std::string& rule, const Bindings& b, const GenRef& g,
                           const Model* model = nullptr);
FormulaP derived_schema(const std::string& rule, const Bindings& b);
bool is_axiom(const std::string& rule);
// Schemas whose side conditions inspect the concrete generator.
bool needs_generator(const std::string& rule);

// True when goal holds under every truth assignment to the atoms that makes
// every premise true.  Atoms are the maximal subformulas that are not !, &.
bool tautological_consequence(const std::vector<FormulaP>& premises, const FormulaP& goal);

struct StepResult {
    std::optional<std::string> error;       // reason for rejecting the node itself
    std::vector<Judgment> premise_judgments;  // what each premise must establish
};

// Local check of one node against its judgment.
StepResult check_step(const DerivationNode& node, const Judgment& j, const Model* model);

// Checks premises before their parent; returns the first rejection.
std::optional<Rejection> check_derivation(const Derivation& d);

Derivation load_derivation(const nlohmann::json& doc, const std::string& base_dir);
Derivation load_derivation_file(const std::string& path);
nlohmann::json derivation_to_json(const Derivation& d);
DerivationNode node_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json node_to_json(const DerivationNode& n);
bool same_node(const DerivationNode& a, const DerivationNode& b);

struct SemanticCheck {
    bool hypotheses_hold = false;
    bool conclusion_holds = false;
};

// Evaluates the hypotheses and the conclusion in the world of the root generator.
SemanticCheck evaluate_on_model(const Derivation& d);

}  // namespace stacl
