#include "rarequant/run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "rarequant/error.hpp"
#include "rarequant/numeric.hpp"

namespace rarequant {

using nlohmann::json;

namespace {

class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "must be an object");
    }

    void allow_only(std::initializer_list<std::string_view> keys) const {
        for (const auto& [key, value] : node_.items())
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                throw ConfigError(field(key), "unknown key");
    }

    bool has(const char* key) const { return node_.contains(key); }

    template <typename T>
    void read(const char* key, T& out) const {
        const auto it = node_.find(key);
        if (it == node_.end()) return;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) throw ConfigError(field(key), "must be a boolean");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw ConfigError(field(key), "must be an integer");
                if constexpr (std::is_unsigned_v<T>)
                    if (it->is_number_integer() && !it->is_number_unsigned())
                        throw ConfigError(field(key), "must be non-negative");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw ConfigError(field(key), "must be a number");
            }
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(field(key), e.what());
        }
    }

    Section child(const char* key) const { return Section(node_.at(key), field(key)); }
    const json& raw(const char* key) const { return node_.at(key); }
    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

private:
    const json& node_;
    std::string path_;
};

std::vector<double> read_weights(const json& node, const std::string& field) {
    if (!node.is_array()) throw ConfigError(field, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : node) {
        if (!v.is_number()) throw ConfigError(field, "must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

void RunConfig::validate() const {
    pipeline.validate();
    synth.validate();
    if (models < 1) throw ConfigError("models", "must be at least 1");
    if (models > max_models) throw ConfigError("models", "exceeds max_models (" + std::to_string(max_models) + ")");
    if (threads < 0) throw ConfigError("threads", "must be non-negative");
}

std::vector<std::uint64_t> RunConfig::seeds() const {
    if (experiment_seeds.empty()) return {seed};
    return experiment_seeds;
}

RunConfig run_config_from_json(const json& doc) {
    RunConfig cfg;
    const Section root(doc, "");
    root.allow_only({"seed", "models", "max_models", "method", "threads", "vectorizer", "train", "split", "synth",
                     "experiment"});
    root.read("seed", cfg.seed);
    root.read("models", cfg.models);
    root.read("max_models", cfg.max_models);
    root.read("threads", cfg.threads);
    if (root.has("method")) {
        std::string method;
        root.read("method", method);
        const auto parsed = parse_calibration_method(method);
        if (!parsed) throw ConfigError("method", "must be 'em' or 'bayes'");
        cfg.method = *parsed;
    }

    if (root.has("vectorizer")) {
        const auto s = root.child("vectorizer");
        s.allow_only({"dim", "sublinear_tf"});
        s.read("dim", cfg.pipeline.vectorizer.dim);
        s.read("sublinear_tf", cfg.pipeline.vectorizer.sublinear_tf);
    }
    if (root.has("train")) {
        const auto s = root.child("train");
        s.allow_only({"l2_lambda", "max_iters", "grad_tol", "initial_step", "backtrack", "armijo_c"});
        auto& t = cfg.pipeline.train;
        s.read("l2_lambda", t.l2_lambda);
        s.read("max_iters", t.max_iters);
        s.read("grad_tol", t.grad_tol);
        s.read("initial_step", t.initial_step);
        s.read("backtrack", t.backtrack);
        s.read("armijo_c", t.armijo_c);
    }
    if (root.has("split")) {
        const auto s = root.child("split");
        s.allow_only({"train_fraction", "validation_fraction_of_train"});
        s.read("train_fraction", cfg.pipeline.split.train_fraction);
        s.read("validation_fraction_of_train", cfg.pipeline.split.validation_fraction_of_train);
    }

    cfg.synth.seed = cfg.seed;
    if (root.has("synth")) {
        const auto s = root.child("synth");
        s.allow_only({"vocab_size", "doc_length_mean", "zipf_exponent", "marker_fraction", "separation", "train_size",
                      "train_prevalence", "target_size", "target_prevalence", "seed", "class_token_distributions"});
        auto& y = cfg.synth;
        s.read("vocab_size", y.vocab_size);
        s.read("doc_length_mean", y.doc_length_mean);
        s.read("zipf_exponent", y.zipf_exponent);
        s.read("marker_fraction", y.marker_fraction);
        s.read("separation", y.separation);
        s.read("train_size", y.train_size);
        s.read("train_prevalence", y.train_prevalence);
        s.read("target_size", y.target_size);
        s.read("target_prevalence", y.target_prevalence);
        s.read("seed", y.seed);
        if (s.has("class_token_distributions")) {
            const auto& node = s.raw("class_token_distributions");
            const auto field = s.field("class_token_distributions");
            if (!node.is_array() || node.size() != 2) throw ConfigError(field, "must hold exactly two arrays");
            y.class_token_distributions = std::array<std::vector<double>, 2>{
                read_weights(node[0], field + "[0]"), read_weights(node[1], field + "[1]")};
        }
    }

    if (root.has("experiment")) {
        const auto s = root.child("experiment");
        s.allow_only({"seeds"});
        if (s.has("seeds")) {
            const auto& node = s.raw("seeds");
            if (!node.is_array()) throw ConfigError("experiment.seeds", "must be an array of integers");
            for (const auto& v : node) {
                if (!v.is_number_unsigned()) throw ConfigError("experiment.seeds", "must hold non-negative integers");
                cfg.experiment_seeds.push_back(v.get<std::uint64_t>());
            }
        }
    }

    cfg.validate();
    return cfg;
}

json to_json(const RunConfig& cfg) {
    const auto& p = cfg.pipeline;
    const auto& y = cfg.synth;
    json synth = {{"vocab_size", y.vocab_size},
                  {"doc_length_mean", y.doc_length_mean},
                  {"zipf_exponent", y.zipf_exponent},
                  {"marker_fraction", y.marker_fraction},
                  {"separation", y.separation},
                  {"train_size", y.train_size},
                  {"train_prevalence", y.train_prevalence},
                  {"target_size", y.target_size},
                  {"target_prevalence", y.target_prevalence},
                  {"seed", y.seed}};
    if (y.class_token_distributions)
        synth["class_token_distributions"] = {(*y.class_token_distributions)[0], (*y.class_token_distributions)[1]};
    return {
        {"seed", cfg.seed},
        {"models", cfg.models},
        {"max_models", cfg.max_models},
        {"method", std::string(to_string(cfg.method))},
        {"threads", cfg.threads},
        {"vectorizer", {{"dim", p.vectorizer.dim}, {"sublinear_tf", p.vectorizer.sublinear_tf}}},
        {"train",
         {{"l2_lambda", p.train.l2_lambda},
          {"max_iters", p.train.max_iters},
          {"grad_tol", p.train.grad_tol},
          {"initial_step", p.train.initial_step},
          {"backtrack", p.train.backtrack},
          {"armijo_c", p.train.armijo_c}}},
        {"split",
         {{"train_fraction", p.split.train_fraction},
          {"validation_fraction_of_train", p.split.validation_fraction_of_train}}},
        {"synth", synth},
        {"experiment", {{"seeds", cfg.experiment_seeds}}},
    };
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", "'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return run_config_from_json(doc);
}

std::string config_digest(const RunConfig& cfg) {
    auto canonical = to_json(cfg);
    // Thread count never changes results, so it stays out of the digest.
    canonical.erase("threads");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical.dump())));
    return buf;
}

}  // namespace rarequant
