#pragma once

#include "stacl/diagram.hpp"
#include "stacl/model.hpp"
#include "stacl/syntax.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stacl {

// Exact distribution over value tuples; only positive entries are stored.
using Dist = std::map<std::vector<int>, Rational>;

Dist point_mass(std::vector<int> values);
Dist product(const Dist& a, const Dist& b);  // concatenates tuples
std::size_t dist_arity(const Dist& d);
// {"0,1": "1/4", ...} with comma-joined keys in sorted order.
nlohmann::json dist_to_json(const Dist& d);

// Stochastic map from input tuples to distributions over output tuples.
struct Kernel {
    enum class Origin { Plain, Canon, Cond };
    Origin origin = Origin::Plain;
    std::size_t in_arity = 0;
    std::size_t out_arity = 0;
    std::map<std::vector<int>, Dist> rows;  // missing rows are undefined
    // Labels of labelled kernels (canonical symbols and conditional variables).
    CondVar cv;
    std::vector<int> fixed_vals;
};

bool kernels_equal(const Kernel& a, const Kernel& b);

// Caches shared by every world derived from one model.
struct ModelContext;

class World {
public:
    explicit World(std::shared_ptr<const Model> model);
    // A world over an arbitrary generator sharing the model's interpretation.
    World(std::shared_ptr<const Model> model, DataGenerator gen);

    World intervened(const Intervention& iv) const;
    World intervened(const std::vector<Assign>& assigns, bool lazy) const;

    const Model& model() const { return *model_; }
    const Interp& interp() const { return model_->interp; }
    const DataGenerator& generator() const { return gen_; }
    const Diagram& diagram() const;
    int domain() const { return model_->interp.domain; }

    // Memory of the world: marginal of the joint on the given variables.
    Dist marginal(const VarTuple& x) const;
    // Joint over the requested columns (defined variables and model names).
    Dist joint(const std::vector<std::string>& columns) const;

    std::optional<Dist> interpret(const TermP& u) const;  // nullopt is the undefined value
    Kernel interpret_cond(const CondVar& cv) const;
    Kernel kernel(const KernelRef& k) const;
    bool satisfies(const FormulaP& f) const;
    bool positive(const PosTarget& p) const;

private:
    struct Table;
    std::shared_ptr<const Model> model_;
    std::shared_ptr<ModelContext> ctx_;
    DataGenerator gen_;
    mutable std::shared_ptr<const Diagram> diagram_;
    mutable std::map<std::vector<std::string>, std::shared_ptr<const Table>> tables_;

    World(std::shared_ptr<const Model> model, std::shared_ptr<ModelContext> ctx, DataGenerator gen);
    std::shared_ptr<const Table> table(const std::vector<std::string>& kept_names) const;
    std::optional<Dist> eval_in_state(const TermP& u, const std::map<std::string, int>& state) const;
    Dist canonical_name(const TermP& u) const;
    Kernel canonical_kernel(const KernelRef& k) const;
};

// p(y | do(x = c)) as the marginal of y in the eagerly intervened world.
Dist causal_effect(const World& w, const std::vector<Assign>& assigns, const VarTuple& y);
// Independent brute force: enumerate every assignment of names and variables,
// drop the factors of intervened variables and clamp their values.
Dist truncated_factorization(const Model& m, const std::vector<Assign>& assigns, const VarTuple& y);

}  // namespace stacl
