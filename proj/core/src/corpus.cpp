#include "rarequant/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "rarequant/error.hpp"
#include "rarequant/random.hpp"

namespace rarequant {

using nlohmann::json;

LabeledDataset::LabeledDataset(std::vector<Document> documents) : documents_(std::move(documents)) {
    for (const auto& doc : documents_) {
        if (!doc.label) throw std::invalid_argument("document '" + doc.id + "' has no label");
        if (*doc.label != 0 && *doc.label != 1)
            throw std::invalid_argument("document '" + doc.id + "' has a label other than 0/1");
        positives_ += static_cast<std::size_t>(*doc.label);
    }
}

std::vector<int> LabeledDataset::labels() const {
    std::vector<int> out;
    out.reserve(documents_.size());
    for (const auto& doc : documents_) out.push_back(*doc.label);
    return out;
}

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("split.train_fraction", "must lie strictly inside (0, 1)");
    if (!(validation_fraction_of_train >= 0.0 && validation_fraction_of_train < 1.0))
        throw ConfigError("split.validation_fraction_of_train", "must lie inside [0, 1)");
}

std::vector<Document> parse_documents(std::istream& in) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(line_no, e.what());
        }
        if (!record.is_object()) throw ParseError(line_no, "record is not an object");

        Document doc;
        const auto id = record.find("id");
        if (id == record.end() || !id->is_string() || id->get_ref<const std::string&>().empty())
            throw ParseError(line_no, "missing or empty string field 'id'");
        doc.id = id->get<std::string>();

        const auto text = record.find("text");
        if (text == record.end() || !text->is_string())
            throw ParseError(line_no, "missing string field 'text'");
        doc.text = text->get<std::string>();

        if (const auto label = record.find("label"); label != record.end() && !label->is_null()) {
            if (!label->is_number_integer()) throw ParseError(line_no, "label must be the integer 0 or 1");
            const auto v = label->get<std::int64_t>();
            if (v != 0 && v != 1) throw ParseError(line_no, "label must be the integer 0 or 1");
            doc.label = static_cast<int>(v);
        }

        if (!seen.insert(doc.id).second) throw DuplicateIdError(line_no, doc.id);
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<Document> load_documents(const std::filesystem::path& path, DocumentFormat format) {
    if (format != DocumentFormat::jsonl) throw std::invalid_argument("unsupported document format");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open document file '" + path.string() + "'");
    return parse_documents(in);
}

void write_documents(std::ostream& out, std::span<const Document> documents) {
    for (const auto& doc : documents) {
        json record = {{"id", doc.id}, {"text", doc.text}};
        if (doc.label) record["label"] = *doc.label;
        out << record.dump() << '\n';
    }
}

namespace {

std::size_t rounded_share(std::size_t count, double fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(count) * fraction + 0.5));
}

struct Group {
    std::vector<std::size_t> members;
};

}  // namespace

SplitIndices stratified_split_indices(std::span<const std::size_t> group_keys,
                                      std::span<const int> labels, const SplitSpec& spec) {
    if (group_keys.size() != labels.size())
        throw std::invalid_argument("group_keys and labels differ in length");
    spec.validate();

    std::size_t class_size[2] = {0, 0};
    for (const int y : labels) {
        if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
        ++class_size[y];
    }
    for (const int c : {1, 0})
        if (class_size[c] < 2) throw InsufficientClassError(c);

    Rng rng(spec.seed ^ stream::kSplit);
    SplitIndices out;
    for (const int c : {0, 1}) {
        std::vector<Group> groups;
        std::unordered_map<std::size_t, std::size_t> slot;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] != c) continue;
            const auto [it, inserted] = slot.try_emplace(group_keys[i], groups.size());
            if (inserted) groups.emplace_back();
            groups[it->second].members.push_back(i);
        }
        rng.shuffle(std::span<Group>(groups));

        const std::size_t test_target = rounded_share(class_size[c], 1.0 - spec.train_fraction);
        std::size_t g = 0;
        std::size_t taken = 0;
        for (; g < groups.size() && taken < test_target; ++g) {
            taken += groups[g].members.size();
            out.test.insert(out.test.end(), groups[g].members.begin(), groups[g].members.end());
        }
        const std::size_t remaining = class_size[c] - taken;
        const std::size_t validation_target = rounded_share(remaining, spec.validation_fraction_of_train);
        taken = 0;
        for (; g < groups.size() && taken < validation_target; ++g) {
            taken += groups[g].members.size();
            out.validation.insert(out.validation.end(), groups[g].members.begin(),
                                  groups[g].members.end());
        }
        for (; g < groups.size(); ++g)
            out.train.insert(out.train.end(), groups[g].members.begin(), groups[g].members.end());
    }
    std::ranges::sort(out.train);
    std::ranges::sort(out.test);
    std::ranges::sort(out.validation);
    return out;
}

namespace {

LabeledDataset gather(const LabeledDataset& data, std::span<const std::size_t> indices) {
    std::vector<Document> docs;
    docs.reserve(indices.size());
    for (const auto i : indices) docs.push_back(data.documents()[i]);
    return LabeledDataset(std::move(docs));
}

}  // namespace

Split stratified_split(const LabeledDataset& data, const SplitSpec& spec) {
    std::unordered_map<std::string, std::size_t> key_of;
    std::vector<std::size_t> keys;
    keys.reserve(data.size());
    for (const auto& doc : data.documents())
        keys.push_back(key_of.try_emplace(doc.id, key_of.size()).first->second);

    const auto labels = data.labels();
    const auto idx = stratified_split_indices(keys, labels, spec);
    return Split{gather(data, idx.train), gather(data, idx.test), gather(data, idx.validation)};
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed) {
    Rng rng(seed ^ stream::kBootstrap);
    std::vector<std::size_t> out(n);
    for (auto& i : out) i = static_cast<std::size_t>(rng.below(n));
    return out;
}

LabeledDataset bootstrap_resample(const LabeledDataset& data, std::uint64_t seed) {
    if (data.empty()) throw EmptyDatasetError();
    return gather(data, bootstrap_indices(data.size(), seed));
}

}  // namespace rarequant
