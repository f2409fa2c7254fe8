#pragma once

#include "stacl/model.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace stacl {

// Recovery rate p(y=1 | condition) in the drug model.
struct RateRow {
    std::string condition;  // e.g. "x=1,z=0"
    Rational rate;          // lowest terms, from the conditional kernel
    std::string count;      // recovered/total in the smallest integral population, e.g. "18/20"
    Rational expected;      // observational table the model encodes
};

struct BackdoorRow {
    int c = 0;
    Rational do_effect;        // p(y=1 | do(x=c)) in the eagerly intervened world
    Rational truncated;        // same, by truncated factorization
    Rational adjusted;         // margin(cond(y;z;x=c)(z); y) at y=1
    bool rct = false;          // [x:=c]E (n0 == <y>) with n0 the canonical name of the effect
    bool bda = false;          // adjustment formula with canonical f, n1, n0
    bool rct_model_n0 = false; // the same pair with the model's own name n0
    bool bda_model_n0 = false;
};

struct SimpsonReport {
    int population = 0;  // smallest sample size giving integral cell counts
    std::vector<RateRow> rates;
    std::vector<BackdoorRow> effects;
    bool precondition = false;  // pa(<z>; <x>) & pos(<x,z>)
    bool paradox = false;       // the do-effects reverse the observational comparison

    bool ok() const;
    nlohmann::json to_json() const;
};

// Evaluates the walkthrough on a drug-shaped model (binary x, y, z; z confounds x and y).
SimpsonReport simpson_walkthrough(std::shared_ptr<const Model> m);

}  // namespace stacl
