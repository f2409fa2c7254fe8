#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stacl/diagram.hpp"
#include "stacl/parser.hpp"

#include <random>

using namespace stacl;

namespace {

DataGenerator gen(std::map<std::string, std::string> m) {
    DataGenerator g;
    g.id = "g";
    for (const auto& [x, t] : m) g.assign[x] = parse_causal_term(t);
    return g;
}

VarTuple T(std::vector<std::string> v) { return VarTuple(std::move(v)); }

bool dsep(const DataGenerator& g, VarTuple x, VarTuple y, VarTuple z) {
    Diagram d(g);
    bool fast = d_separated(d, x, y, z);
    CHECK(fast == d_separated_naive(d, x, y, z));
    return fast;
}

const DataGenerator drug = gen({{"x", "fx(z, nx)"}, {"y", "fy(x, z, ny)"}, {"z", "nz"}});
const DataGenerator chain = gen({{"x", "n1"}, {"z", "f(x)"}, {"y", "f(z)"}});
const DataGenerator fork_g = gen({{"z", "n1"}, {"x", "f(z)"}, {"y", "f(z)"}});
const DataGenerator collider = gen({{"x", "n1"}, {"y", "n2"}, {"z", "f(x, y)"}});

}  // namespace

TEST_CASE("parents and ancestors") {
    Diagram d(drug);
    CHECK(d.parents(T({"x"})) == T({"z"}));
    CHECK(d.parents(T({"z"})) == T({}));
    CHECK(Diagram(chain).ancestors(T({"y"})) == T({"x", "z"}));
    CHECK_THROWS_AS(d.parents(T({"q"})), std::invalid_argument);
}

TEST_CASE("causal predicates") {
    Diagram d(drug);
    CHECK(eval_causal_pred(d, "pa", {T({"z"}), T({"x"})}));
    CHECK_FALSE(eval_causal_pred(d, "pa", {T({"z"}), T({"y"})}));
    CHECK(eval_causal_pred(d, "pa", {T({"x", "z"}), T({"y"})}));
    CHECK(eval_causal_pred(d, "npa", {T({"y"}), T({"x"})}));
    CHECK(eval_causal_pred(d, "anc", {T({"x", "z"}), T({"y"})}));
    Diagram c(chain);
    CHECK(eval_causal_pred(c, "nanc", {T({"y"}), T({"x"})}));
    CHECK_FALSE(eval_causal_pred(c, "nanc", {T({"x"}), T({"y"})}));
    CHECK_FALSE(eval_causal_pred(c, "nanc", {T({"x"}), T({"x"})}));
    auto cw = gen({{"x", "n1"}, {"y", "n2"}, {"z", "f(x, y)"}, {"w", "n3"}});
    Diagram dw(cw);
    CHECK(eval_causal_pred(dw, "allnanc", {T({"x", "y"}), T({"x", "y"}), T({"w"})}));
    CHECK_FALSE(eval_causal_pred(dw, "allnanc", {T({"y"}), T({"x", "y"}), T({"z"})}));
    CHECK(eval_causal_pred(dw, "allnanc", {T({}), T({"x", "y"}), T({"z"})}));
    CHECK_THROWS_AS(eval_causal_pred(d, "pa", {T({"z"})}), std::invalid_argument);
    CHECK_THROWS_AS(eval_causal_pred(d, "parent", {T({"z"}), T({"x"})}), std::invalid_argument);
}

TEST_CASE("d-separation on the three elementary graphs") {
    CHECK(dsep(chain, T({"x"}), T({"y"}), T({"z"})));
    CHECK_FALSE(dsep(chain, T({"x"}), T({"y"}), T({})));
    CHECK(dsep(fork_g, T({"x"}), T({"y"}), T({"z"})));
    CHECK_FALSE(dsep(fork_g, T({"x"}), T({"y"}), T({})));
    CHECK(dsep(collider, T({"x"}), T({"y"}), T({})));
    CHECK_FALSE(dsep(collider, T({"x"}), T({"y"}), T({"z"})));
    // A descendant of the collider also opens it.
    auto desc = gen({{"x", "n1"}, {"y", "n2"}, {"z", "f(x, y)"}, {"w", "f(z)"}});
    CHECK_FALSE(dsep(desc, T({"x"}), T({"y"}), T({"w"})));
    CHECK_THROWS_AS(dsep(chain, T({}), T({"y"}), T({})), std::invalid_argument);
    CHECK_THROWS_AS(dsep(chain, T({"q"}), T({"y"}), T({})), std::invalid_argument);
    CHECK_FALSE(dsep(chain, T({"x"}), T({"x", "y"}), T({})));
}

TEST_CASE("shared names are path vertices, constants are not") {
    auto shared_name = gen({{"x", "f(n1)"}, {"y", "f(n1)"}});
    CHECK_FALSE(dsep(shared_name, T({"x"}), T({"y"}), T({})));
    auto shared_const = gen({{"x", "f(c1)"}, {"y", "f(c1)"}});
    CHECK(dsep(shared_const, T({"x"}), T({"y"}), T({})));
}

TEST_CASE("back-door criterion") {
    CHECK(backdoor_criterion(drug, T({"x"}), T({"y"}), T({"z"})));
    CHECK_FALSE(backdoor_criterion(drug, T({"x"}), T({"y"}), T({})));
    CHECK_FALSE(backdoor_criterion(chain, T({"x"}), T({"y"}), T({"z"})));
    CHECK(backdoor_criterion(chain, T({"x"}), T({"y"}), T({})));
}

TEST_CASE("fast and naive d-separation agree on random diagrams") {
    std::mt19937_64 rng(7);
    int separated = 0;
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);
        std::vector<std::string> v;
        for (int i = 0; i < n; ++i) v.push_back("v" + std::to_string(i));
        DataGenerator g;
        for (int i = 0; i < n; ++i) {
            std::vector<CausalTerm> args;
            for (int j = 0; j < i; ++j)
                if (rng() % 3 == 0) args.push_back(CausalTerm::var(v[j]));
            if (rng() % 2) args.push_back(CausalTerm::name("n" + std::to_string(rng() % 3)));
            g.assign[v[i]] = args.empty() ? CausalTerm::constant("c0") : CausalTerm::app("f", args);
        }
        Diagram d(g);
        for (int q = 0; q < 10; ++q) {
            std::vector<std::string> x, y, z;
            for (const auto& s : v) {
                switch (rng() % 4) {
                case 0: x.push_back(s); break;
                case 1: y.push_back(s); break;
                case 2: z.push_back(s); break;
                default: break;
                }
            }
            if (x.empty() || y.empty()) continue;
            bool fast = d_separated(d, T(x), T(y), T(z));
            REQUIRE(fast == d_separated_naive(d, T(x), T(y), T(z)));
            separated += fast;
        }
    }
    CHECK(separated > 50);
}
