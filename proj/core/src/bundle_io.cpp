#include "rarequant/bundle_io.hpp"

#include <fstream>

#include "rarequant/atomic_file.hpp"
#include "rarequant/error.hpp"

namespace rarequant {

using nlohmann::json;

namespace {

json member_to_json(const Member& m) {
    json weights = json::array();
    for (std::size_t j = 0; j < m.model.weights.size(); ++j)
        if (m.model.weights[j] != 0.0) weights.push_back({j, m.model.weights[j]});
    return {
        {"seed", m.seed},
        {"retries", m.retries},
        {"weight", m.weight},
        {"model", {{"dim", m.model.dim}, {"intercept", m.model.intercept}, {"weights", std::move(weights)}}},
        {"densities",
         {{"f1", {{"alpha", m.densities.f1.alpha}, {"beta", m.densities.f1.beta}}},
          {"f0", {{"alpha", m.densities.f0.alpha}, {"beta", m.densities.f0.beta}}},
          {"n1", m.densities.n1},
          {"n0", m.densities.n0}}},
    };
}

Member member_from_json(const json& j) {
    Member m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.retries = j.at("retries").get<int>();
    m.weight = j.at("weight").get<double>();
    const auto& model = j.at("model");
    m.model = LinearModel::zeros(model.at("dim").get<std::size_t>());
    m.model.intercept = model.at("intercept").get<double>();
    for (const auto& pair : model.at("weights")) {
        const auto index = pair.at(0).get<std::size_t>();
        if (index >= m.model.dim) throw FormatError("weight index out of range");
        m.model.weights[index] = pair.at(1).get<double>();
    }
    const auto& d = j.at("densities");
    m.densities.f1 = {d.at("f1").at("alpha").get<double>(), d.at("f1").at("beta").get<double>()};
    m.densities.f0 = {d.at("f0").at("alpha").get<double>(), d.at("f0").at("beta").get<double>()};
    m.densities.n1 = d.at("n1").get<std::size_t>();
    m.densities.n0 = d.at("n0").get<std::size_t>();
    if (!(m.weight >= 0.0 && m.weight <= 1.0)) throw FormatError("member weight outside [0, 1]");
    return m;
}

}  // namespace

json bundle_to_json(const EnsembleBundle& bundle) {
    const auto& c = bundle.config;
    json members = json::array();
    for (const auto& m : bundle.members) members.push_back(member_to_json(m));
    return {
        {"format", "rarequant-bundle"},
        {"version", kBundleFormatVersion},
        {"master_seed", bundle.master_seed},
        {"vectorizer", {{"dim", c.vectorizer.dim}, {"sublinear_tf", c.vectorizer.sublinear_tf}}},
        {"train",
         {{"l2_lambda", c.train.l2_lambda},
          {"max_iters", c.train.max_iters},
          {"grad_tol", c.train.grad_tol},
          {"initial_step", c.train.initial_step},
          {"backtrack", c.train.backtrack},
          {"armijo_c", c.train.armijo_c}}},
        {"split",
         {{"train_fraction", c.split.train_fraction},
          {"validation_fraction_of_train", c.split.validation_fraction_of_train}}},
        {"single_model", bundle.single_model ? member_to_json(*bundle.single_model) : json(nullptr)},
        {"members", std::move(members)},
    };
}

EnsembleBundle bundle_from_json(const json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "rarequant-bundle") throw FormatError("not a rarequant bundle");
        const int version = doc.at("version").get<int>();
        if (version != kBundleFormatVersion)
            throw FormatError("unsupported bundle version " + std::to_string(version));

        EnsembleBundle b;
        b.master_seed = doc.at("master_seed").get<std::uint64_t>();
        const auto& v = doc.at("vectorizer");
        b.config.vectorizer = {v.at("dim").get<std::size_t>(), v.at("sublinear_tf").get<bool>()};
        const auto& t = doc.at("train");
        b.config.train.l2_lambda = t.at("l2_lambda").get<double>();
        b.config.train.max_iters = t.at("max_iters").get<int>();
        b.config.train.grad_tol = t.at("grad_tol").get<double>();
        b.config.train.initial_step = t.at("initial_step").get<double>();
        b.config.train.backtrack = t.at("backtrack").get<double>();
        b.config.train.armijo_c = t.at("armijo_c").get<double>();
        const auto& s = doc.at("split");
        b.config.split.train_fraction = s.at("train_fraction").get<double>();
        b.config.split.validation_fraction_of_train = s.at("validation_fraction_of_train").get<double>();
        if (!doc.at("single_model").is_null()) b.single_model = member_from_json(doc.at("single_model"));
        for (const auto& m : doc.at("members")) b.members.push_back(member_from_json(m));
        if (b.members.empty()) throw FormatError("bundle has no members");

        const auto check_dim = [&](const Member& m) {
            if (m.model.dim != b.config.vectorizer.dim) throw FormatError("member dimension differs from vectorizer");
        };
        if (b.single_model) check_dim(*b.single_model);
        for (const auto& m : b.members) check_dim(m);
        try {
            b.config.validate();
        } catch (const ConfigError& e) {
            throw FormatError(std::string("invalid bundle config: ") + e.what());
        }
        return b;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed bundle: ") + e.what());
    }
}

void save_bundle(const std::filesystem::path& path, const EnsembleBundle& bundle) {
    write_file_atomic(path, bundle_to_json(bundle).dump() + "\n");
}

EnsembleBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read bundle '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("bundle is not valid JSON: ") + e.what());
    }
    return bundle_from_json(doc);
}

}  // namespace rarequant
