#include "xpinnlab/config.hpp"

#include "xpinnlab/errors.hpp"

#include <set>

namespace xpinnlab::config {

namespace {

using toml::Document;
using toml::Value;

std::string where(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

const Value* find(const Document& doc, const std::string& section, const std::string& key) {
    return doc.has(section, key) ? &doc.get(section, key) : nullptr;
}

std::string get_string(const Document& doc, const std::string& section, const std::string& key,
                       const std::string& fallback, bool required = false) {
    const Value* v = find(doc, section, key);
    if (!v) {
        if (required) throw ConfigError("missing required key '" + where(section, key) + "'");
        return fallback;
    }
    if (v->kind != Value::Kind::String)
        throw ConfigError("'" + where(section, key) + "' must be a string");
    return v->str;
}

double get_number(const Document& doc, const std::string& section, const std::string& key,
                  double fallback) {
    const Value* v = find(doc, section, key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError("'" + where(section, key) + "' must be a number");
    return v->as_double();
}

std::int64_t get_count(const Document& doc, const std::string& section, const std::string& key,
                       std::int64_t fallback, std::int64_t min_value = 0) {
    const Value* v = find(doc, section, key);
    std::int64_t out = fallback;
    if (v) {
        if (v->kind != Value::Kind::Integer)
            throw ConfigError("'" + where(section, key) + "' must be an integer");
        out = v->as_integer();
    }
    if (out < min_value)
        throw ConfigError("'" + where(section, key) + "' must be at least " +
                          std::to_string(min_value));
    return out;
}

bool get_bool(const Document& doc, const std::string& section, const std::string& key,
              bool fallback) {
    const Value* v = find(doc, section, key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Boolean)
        throw ConfigError("'" + where(section, key) + "' must be true or false");
    return v->boolean;
}

} // namespace

RunConfig run_config_from_document(const Document& doc) {
    RunConfig cfg;

    cfg.schema = get_count(doc, "", "schema", -1, -1);
    if (cfg.schema != 1)
        throw ConfigError("unsupported config schema " +
                          (cfg.schema < 0 ? std::string("(missing)") : std::to_string(cfg.schema)) +
                          "; this build reads schema = 1");

    static const std::set<std::string> benchmarks{"kdv", "heat", "advection", "poisson"};
    cfg.benchmark = get_string(doc, "", "benchmark", "", true);
    if (!benchmarks.count(cfg.benchmark))
        throw ConfigError("unknown benchmark '" + cfg.benchmark +
                          "' (expected kdv, heat, advection, or poisson)");

    cfg.model = get_string(doc, "", "model", "pinn");
    if (cfg.model != "pinn" && cfg.model != "xpinn")
        throw ConfigError("'model' must be pinn or xpinn");
    cfg.decomposition = get_string(doc, "", "decomposition", cfg.benchmark);
    if (cfg.model == "xpinn" && !benchmarks.count(cfg.decomposition))
        throw ConfigError("unknown decomposition '" + cfg.decomposition + "'");

    cfg.out = get_string(doc, "", "out", cfg.out);
    cfg.reference_path = get_string(doc, "", "reference", "");

    if (const Value* v = find(doc, "", "seeds")) {
        if (v->kind != Value::Kind::Array || v->array.empty())
            throw ConfigError("'seeds' must be a non-empty array of integers");
        cfg.seeds.clear();
        for (const auto& e : v->array) {
            if (e.kind != Value::Kind::Integer || e.integer < 0)
                throw ConfigError("'seeds' entries must be nonnegative integers");
            cfg.seeds.push_back(static_cast<std::uint64_t>(e.integer));
        }
    } else if (const Value* s = find(doc, "", "seed")) {
        if (s->kind != Value::Kind::Integer || s->integer < 0)
            throw ConfigError("'seed' must be a nonnegative integer");
        cfg.seeds = {static_cast<std::uint64_t>(s->integer)};
    }

    if (const Value* v = find(doc, "net", "hidden")) {
        if (v->kind != Value::Kind::Array || v->array.empty())
            throw ConfigError("'net.hidden' must be a non-empty array of widths");
        cfg.net.hidden.clear();
        for (const auto& e : v->array) {
            if (e.kind != Value::Kind::Integer || e.integer < 1)
                throw ConfigError("'net.hidden' widths must be positive integers");
            cfg.net.hidden.push_back(static_cast<std::size_t>(e.integer));
        }
    }
    const std::string act = get_string(doc, "net", "activation", "tanh");
    try {
        cfg.net.activation = activation_from_name(act);
    } catch (const InvalidInput&) {
        throw ConfigError("'net.activation' must be tanh or sine");
    }

    cfg.train.optimizer = train::optimizer_from_name(
        get_string(doc, "train", "optimizer", "adam"));
    cfg.train.lr = get_number(doc, "train", "lr", cfg.train.lr);
    if (!(cfg.train.lr > 0.0)) throw ConfigError("'train.lr' must be positive");
    cfg.train.epochs =
        static_cast<std::size_t>(get_count(doc, "train", "epochs", 1000, 1));
    cfg.train.record_every =
        static_cast<std::size_t>(get_count(doc, "train", "record_every", 100, 1));
    cfg.train.lbfgs_memory =
        static_cast<std::size_t>(get_count(doc, "train", "lbfgs_memory", 10, 1));

    cfg.train.counts.n_boundary =
        static_cast<std::size_t>(get_count(doc, "points", "boundary", 200, 0));
    cfg.train.counts.n_residual =
        static_cast<std::size_t>(get_count(doc, "points", "residual", 1000, 1));
    cfg.train.counts.n_interface =
        static_cast<std::size_t>(get_count(doc, "points", "interface", 0, 0));

    auto weight = [&](const char* key, double fallback) {
        const double w = get_number(doc, "weights", key, fallback);
        if (w < 0.0) throw ConfigError(std::string("'weights.") + key + "' must be nonnegative");
        return w;
    };
    cfg.train.weights.residual = weight("residual", 1.0);
    cfg.train.weights.boundary = weight("boundary", 1.0);
    cfg.train.weights.interface_u = weight("interface_u", 1.0);
    cfg.train.weights.interface_res = weight("interface_res", 0.0);
    cfg.train.weights.interface_grad = weight("interface_grad", 0.0);

    cfg.bounds.delta = get_number(doc, "bounds", "delta", 0.1);
    if (!(cfg.bounds.delta > 0.0 && cfg.bounds.delta < 1.0))
        throw ConfigError("'bounds.delta' must lie strictly between 0 and 1");
    cfg.bounds.c1 = get_number(doc, "bounds", "c1", 1.0);
    if (!(cfg.bounds.c1 > 0.0)) throw ConfigError("'bounds.c1' must be positive");
    cfg.bounds.include_bias = get_bool(doc, "bounds", "include_bias", true);

    if (const Value* v = find(doc, "eval", "grid")) {
        if (v->kind != Value::Kind::Array || v->array.size() != 2 ||
            v->array[0].kind != Value::Kind::Integer || v->array[1].kind != Value::Kind::Integer ||
            v->array[0].integer < 2 || v->array[1].integer < 2)
            throw ConfigError("'eval.grid' must be two integers of at least 2");
        cfg.eval_n0 = static_cast<std::size_t>(v->array[0].integer);
        cfg.eval_n1 = static_cast<std::size_t>(v->array[1].integer);
    }

    if (cfg.benchmark == "kdv" && cfg.reference_path.empty())
        throw ConfigError("the kdv benchmark needs 'reference' pointing at a solution grid");

    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    try {
        return run_config_from_document(toml::parse_file(path));
    } catch (const ParseError& e) {
        throw ConfigError(std::string(e.what()));
    }
}

} // namespace xpinnlab::config
