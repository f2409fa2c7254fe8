#pragma once

#include "stacl/generator.hpp"
#include "stacl/rational.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace stacl {

// Total table of a plain function symbol: one output distribution over
// O per input tuple, rows stored in mixed-radix order of the inputs.
struct FunctionTable {
    int arity = 0;
    std::vector<std::vector<Rational>> rows;
};

// Interpretation of names, constants and function symbols over O = {0..d-1}.
struct Interp {
    int domain = 2;
    std::map<std::string, std::vector<Rational>> names;
    std::map<std::string, int> constants;
    std::map<std::string, FunctionTable> functions;

    int const_value(const Const& c) const;  // literal value or table lookup
    int const_value(const std::string& id) const { return const_value(Const{id}); }
};

struct Model {
    Interp interp;
    DataGenerator gen;  // gen.id is the model id
};

// Parses and checks a model document.  Throws std::invalid_argument on any
// schema violation, inexact row, or missing symbol.
Model model_from_json(const nlohmann::json& doc);
Model load_model(const std::string& path);
nlohmann::json model_to_json(const Model& m);
void save_model(const Model& m, const std::string& path);

// Checks the generator against the interpretation: every symbol is defined with
// the right arity, and the generator is valid.
void check_model(const Model& m);

}  // namespace stacl
