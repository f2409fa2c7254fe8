#pragma once

#include "stacl/model.hpp"
#include "stacl/proof.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace stacl {

// std::mt19937_64 with range reduction by rejection, so draws are
// reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    std::size_t below(std::size_t n);  // uniform in [0, n); n > 0
    int between(int lo, int hi);       // uniform in [lo, hi]
    bool chance(const Rational& p);    // true with probability p
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v.at(below(v.size()));
    }
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 eng_;
};

struct FuzzConfig {
    int domain_size = 3;  // each world draws its size from [2, domain_size]
    int var_count = 5;    // each world draws its size from [min(2, var_count), var_count]
    int name_count = 4;   // each world draws from [1, name_count]
    Rational edge_probability{1, 2};
    int denominator_bound = 6;
    Rational positive_probability{1, 2};  // chance that every row of a world is strictly positive
    Rational degenerate_row{1, 4};        // chance of a point-mass row in a non-positive world
    Rational constant_function{1, 5};     // chance of an input-independent point-mass table there
    int trials = 500;
    std::uint64_t seed = 1;

    void check() const;  // throws std::invalid_argument when a bound is violated
};

// Random finite, closed, acyclic model over variables v1..vn; deterministic in (cfg, seed).
Model random_model(const FuzzConfig& cfg, std::uint64_t seed);

struct Counterexample {
    nlohmann::json model;
    std::string generator;  // judgment generator
    Bindings bindings;
    std::string formula;
};

struct FuzzReport {
    std::string schema;
    bool expect_valid = true;
    int trials = 0;
    int non_vacuous = 0;  // every antecedent of the instance held
    int violations = 0;
    int incomplete = 0;   // trials where no admissible binding was drawn
    std::optional<Counterexample> first;

    // Valid schemas: no violation.  Invalid schemas: a counterexample was found.
    bool ok() const { return expect_valid ? violations == 0 : first.has_value(); }
    nlohmann::json to_json() const;
};

// Axiom schemas of every layer, the generator-shifting rules, Do1-Do3 and Unq.
const std::vector<std::string>& valid_schemas();
// Formulas expected to fail in some world.
const std::vector<std::string>& invalid_schemas();
bool is_fuzz_schema(const std::string& name);

// Instance of a fuzzed schema; covers the invalid schemas and Unq besides the axioms.
FormulaP instantiate_fuzz_schema(const std::string& name, const Bindings& b, const GenRef& g, const Model* m);

// Runs cfg.trials trials with seeds cfg.seed + i; odd trials resample bindings
// until every antecedent holds.
FuzzReport check_schema_validity(const std::string& schema, const FuzzConfig& cfg);
// Searches up to cfg.trials trials and stops at the first violation.
FuzzReport find_counterexample(const std::string& schema, const FuzzConfig& cfg);
// Dispatches on the schema kind.
FuzzReport run_fuzz(const std::string& schema, const FuzzConfig& cfg);

// Reloads the model of a counterexample and confirms that the instance still fails.
bool reverify(const std::string& schema, const Counterexample& c);

nlohmann::json counterexample_to_json(const Counterexample& c);
Counterexample counterexample_from_json(const nlohmann::json& j);

}  // namespace stacl
