#include "stacl/diagram.hpp"
#include "stacl/fuzz.hpp"
#include "stacl/parser.hpp"
#include "stacl/proof.hpp"
#include "stacl/semantics.hpp"
#include "stacl/walkthrough.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace stacl;
using json = nlohmann::json;

namespace {

// Exit codes.
constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

std::shared_ptr<const Model> load(const std::string& path) { return std::make_shared<const Model>(load_model(path)); }

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

DataGenerator generator_at(const Model& m, const std::string& at) {
    if (at.empty()) return m.gen;
    auto ref = parse_genref(at);
    if (ref.base != m.gen.id) throw std::invalid_argument("generator '" + at + "' is not derived from model '" + m.gen.id + "'");
    return apply_steps(m.gen, ref);
}

int boolean(bool b) {
    std::cout << (b ? "true" : "false") << "\n";
    return b ? kTrue : kFalse;
}

const char* kind_name(Violation::Kind k) {
    switch (k) {
    case Violation::Kind::Cycle:
        return "cycle";
    case Violation::Kind::NotClosed:
        return "not_closed";
    case Violation::Kind::Malformed:
        return "malformed";
    }
    return "unknown";
}

int cmd_validate(const std::string& path) {
    auto doc = read_json(path);
    if (!doc.is_object() || !doc.contains("generator") || !doc.at("generator").is_object())
        throw std::invalid_argument(path + ": model has no generator object");
    DataGenerator g;
    g.id = doc.value("id", std::string("model"));
    for (const auto& [x, t] : doc.at("generator").items())
        g.assign[x] = t.is_null() ? std::nullopt : std::optional<CausalTerm>(parse_causal_term(t.get<std::string>()));
    auto rep = validate(g);
    json out;
    out["id"] = g.id;
    out["variables"] = g.defined_vars();
    out["violations"] = json::array();
    for (const auto& v : rep.violations)
        out["violations"].push_back({{"kind", kind_name(v.kind)}, {"vars", v.vars}, {"message", v.message}});
    bool ok = rep.ok();
    if (ok) {
        try {
            model_from_json(doc);
        } catch (const std::invalid_argument& e) {
            out["model_error"] = e.what();
            ok = false;
        }
    }
    out["ok"] = ok;
    std::cout << out.dump(2) << "\n";
    return ok ? kTrue : kFalse;
}

int cmd_intervene(const std::string& path, const std::string& mode, const std::string& set, const std::string& id,
                  const std::string& out_path) {
    auto m = load_model(path);
    if (mode != "eager" && mode != "lazy") throw std::invalid_argument("--mode must be eager or lazy");
    auto assigns = make_assigns(parse_assigns(set));
    if (assigns.empty()) throw std::invalid_argument("--set needs at least one assignment");
    Model out = m;
    out.gen = intervene(m.gen, Intervention{mode == "lazy", assigns});
    out.gen.id = id.empty() ? m.gen.id + "_" + mode : id;
    check_model(out);
    if (out_path.empty()) std::cout << model_to_json(out).dump(2) << "\n";
    else save_model(out, out_path);
    return kTrue;
}

int cmd_check(const std::string& path, const std::string& file, const std::string& text, const std::string& at) {
    if (file.empty() == text.empty()) throw std::invalid_argument("give exactly one of -f and --formula");
    std::string src = text;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw std::invalid_argument("cannot open '" + file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        src = ss.str();
    }
    auto m = load(path);
    World w(m, generator_at(*m, at));
    return boolean(w.satisfies(parse_formula(src)));
}

int cmd_prove(const std::string& path) {
    auto d = load_derivation_file(path);
    auto rej = check_derivation(d);
    json out;
    out["layer"] = to_string(d.layer);
    out["conclusion"] = to_string(d.root.conclusion);
    out["ok"] = !rej;
    if (rej) {
        out["path"] = rej->path;
        out["message"] = rej->message;
    } else if (d.model) {
        auto s = evaluate_on_model(d);
        out["hypotheses_hold"] = s.hypotheses_hold;
        out["conclusion_holds"] = s.conclusion_holds;
    }
    std::cout << out.dump(2) << "\n";
    return rej ? kFalse : kTrue;
}

struct FuzzArgs {
    std::string schema;
    bool all = false;
    int trials = 500;
    std::uint64_t seed = 1;
    int domain_size = 3;
    int var_count = 5;
    std::string save_dir;
};

int cmd_fuzz(const FuzzArgs& a) {
    if (a.all == !a.schema.empty()) throw std::invalid_argument("give exactly one of --schema and --all");
    FuzzConfig cfg;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.domain_size = a.domain_size;
    cfg.var_count = a.var_count;
    cfg.check();
    std::vector<std::string> names;
    if (a.all) {
        names = valid_schemas();
        names.insert(names.end(), invalid_schemas().begin(), invalid_schemas().end());
    } else {
        if (!is_fuzz_schema(a.schema)) throw std::invalid_argument("unknown schema '" + a.schema + "'");
        names = {a.schema};
    }
    bool ok = true;
    json reports = json::array();
    for (const auto& s : names) {
        auto r = run_fuzz(s, cfg);
        if (r.first && !reverify(s, *r.first)) throw std::logic_error(s + ": counterexample does not re-verify");
        if (r.first && !a.save_dir.empty()) {
            std::filesystem::create_directories(a.save_dir);
            auto base = std::filesystem::path(a.save_dir) / s;
            save_model(model_from_json(r.first->model), base.string() + ".model.json");
            std::ofstream(base.string() + ".counterexample.json") << counterexample_to_json(*r.first).dump(2) << "\n";
        }
        ok = ok && r.ok();
        reports.push_back(r.to_json());
    }
    std::cout << (a.all ? reports : reports[0]).dump(2) << "\n";
    return ok ? kTrue : kFalse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"StaCL causal-logic kernel"};
    app.require_subcommand(1);

    std::string model, x, y, z, at, pred, pa, pb, pc, mode, set, id, out, formula_file, formula, dos, on, proof;
    std::string simpson_model = std::string(STACL_DATA_DIR) + "/drug.json";
    FuzzArgs fa;

    auto* validate_cmd = app.add_subcommand("validate", "Check a model's generator");
    validate_cmd->add_option("model", model, "model JSON")->required();

    auto* dsep_cmd = app.add_subcommand("dsep", "Decide d-separation");
    dsep_cmd->add_option("model", model, "model JSON")->required();
    dsep_cmd->add_option("--x", x, "first tuple")->required();
    dsep_cmd->add_option("--y", y, "second tuple")->required();
    dsep_cmd->add_option("--z", z, "conditioning tuple (empty string for none)");
    dsep_cmd->add_option("--at", at, "generator reference, e.g. drug[x:=c1]L");

    auto* pred_cmd = app.add_subcommand("pred", "Decide a causal predicate");
    pred_cmd->add_option("model", model, "model JSON")->required();
    pred_cmd->add_option("--pred", pred, "pa, npa, anc, nanc, allnanc or dsep")->required();
    pred_cmd->add_option("--a", pa, "first tuple")->required();
    pred_cmd->add_option("--b", pb, "second tuple")->required();
    pred_cmd->add_option("--c", pc, "third tuple (allnanc, dsep)");
    pred_cmd->add_option("--at", at, "generator reference");

    auto* intervene_cmd = app.add_subcommand("intervene", "Write an intervened model");
    intervene_cmd->add_option("model", model, "model JSON")->required();
    intervene_cmd->add_option("--mode", mode, "eager or lazy")->required();
    intervene_cmd->add_option("--set", set, "assignments, e.g. x=c1,z=c0")->required();
    intervene_cmd->add_option("--id", id, "id of the new model (default <id>_<mode>)");
    intervene_cmd->add_option("-o,--output", out, "output path (default stdout)");

    auto* effect_cmd = app.add_subcommand("effect", "Causal effect p(on | do(...))");
    effect_cmd->add_option("model", model, "model JSON")->required();
    effect_cmd->add_option("--do", dos, "assignments, e.g. x=1")->required();
    effect_cmd->add_option("--on", on, "outcome tuple")->required();

    auto* check_cmd = app.add_subcommand("check", "Evaluate a formula in the model's world");
    check_cmd->add_option("model", model, "model JSON")->required();
    check_cmd->add_option("-f,--file", formula_file, "formula file");
    check_cmd->add_option("--formula", formula, "formula text");
    check_cmd->add_option("--at", at, "generator reference");

    auto* prove_cmd = app.add_subcommand("prove", "Check a derivation file");
    prove_cmd->add_option("proof", proof, "derivation JSON")->required();

    auto* fuzz_cmd = app.add_subcommand("fuzz", "Fuzz a schema against random worlds");
    fuzz_cmd->add_option("--schema", fa.schema, "schema name");
    fuzz_cmd->add_flag("--all", fa.all, "every valid and invalid schema");
    fuzz_cmd->add_option("--trials", fa.trials, "trials per schema")->check(CLI::PositiveNumber);
    fuzz_cmd->add_option("--seed", fa.seed, "seed of trial 0");
    fuzz_cmd->add_option("--domain-size", fa.domain_size, "largest domain size (2-3)");
    fuzz_cmd->add_option("--var-count", fa.var_count, "largest variable count (1-6)");
    fuzz_cmd->add_option("--save", fa.save_dir, "directory for counterexample models");

    auto* simpson_cmd = app.add_subcommand("simpson", "Drug-trial walkthrough");
    simpson_cmd->add_option("--model", simpson_model, "drug model JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(model);
        if (*dsep_cmd) {
            auto m = load(model);
            Diagram d(generator_at(*m, at));
            return boolean(d_separated(d, parse_var_tuple(x), parse_var_tuple(y), parse_var_tuple(z)));
        }
        if (*pred_cmd) {
            auto m = load(model);
            Diagram d(generator_at(*m, at));
            std::vector<VarTuple> args{parse_var_tuple(pa), parse_var_tuple(pb)};
            if (!pc.empty() || pred == "allnanc" || pred == "dsep") args.push_back(parse_var_tuple(pc));
            return boolean(eval_causal_pred(d, pred, args));
        }
        if (*intervene_cmd) return cmd_intervene(model, mode, set, id, out);
        if (*effect_cmd) {
            auto m = load(model);
            auto dist = causal_effect(World(m), make_assigns(parse_assigns(dos)), parse_var_tuple(on));
            std::cout << dist_to_json(dist).dump() << "\n";
            return kTrue;
        }
        if (*check_cmd) return cmd_check(model, formula_file, formula, at);
        if (*prove_cmd) return cmd_prove(proof);
        if (*fuzz_cmd) return cmd_fuzz(fa);
        if (*simpson_cmd) {
            auto r = simpson_walkthrough(load(simpson_model));
            std::cout << r.to_json().dump(2) << "\n";
            return r.ok() ? kTrue : kInternal;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
