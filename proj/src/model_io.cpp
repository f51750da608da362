#include "tennis/model_io.hpp"

#include <fstream>

#include "json.hpp"
#include "tennis/error.hpp"

namespace tennis {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "tennis-momentum-model";

json params_json(const BoostParams& p)
{
    json j = {
        {"n_rounds", p.n_rounds},   {"learning_rate", p.learning_rate},
        {"max_depth", p.max_depth}, {"lambda", p.lambda},
        {"gamma", p.gamma},         {"min_child_weight", p.min_child_weight},
        {"subsample", p.subsample}, {"seed", p.seed},
    };
    j["base_score"] = p.base_score ? json(*p.base_score) : json(nullptr);
    return j;
}

BoostParams params_from(const json& j)
{
    BoostParams p;
    p.n_rounds = j.at("n_rounds").get<int>();
    p.learning_rate = j.at("learning_rate").get<double>();
    p.max_depth = j.at("max_depth").get<int>();
    p.lambda = j.at("lambda").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.min_child_weight = j.at("min_child_weight").get<double>();
    p.subsample = j.at("subsample").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("base_score") && !j["base_score"].is_null()) p.base_score = j["base_score"].get<double>();
    return p;
}

json scoring_json(const ScoringParams& s)
{
    return {
        {"window", s.window}, {"xi", s.xi},           {"rho", s.rho},         {"alpha", s.alpha},
        {"ema_period", s.ema_period}, {"epsilon", s.epsilon}, {"scope", to_string(s.scope)},
    };
}

ScoringParams scoring_from(const json& j)
{
    ScoringParams s;
    s.window = j.at("window").get<int>();
    s.xi = j.at("xi").get<double>();
    s.rho = j.at("rho").get<double>();
    s.alpha = j.at("alpha").get<double>();
    s.ema_period = j.at("ema_period").get<int>();
    s.epsilon = j.at("epsilon").get<double>();
    s.scope = scope_from_string(j.at("scope").get<std::string>());
    return s;
}

} // namespace

void write_model(std::ostream& out, const ModelFile& file)
{
    const TreeEnsemble& m = file.model;
    json trees = json::array();
    for (const auto& t : m.trees) {
        json nodes = json::array();
        for (const auto& n : t.nodes) {
            json node = {{"value", n.value}, {"cover", n.cover}};
            if (!n.is_leaf()) {
                node["feature"] = n.feature;
                node["threshold"] = n.threshold;
                node["left"] = n.left;
                node["right"] = n.right;
                node["default_left"] = n.default_left;
                node["gain"] = n.gain;
            }
            nodes.push_back(std::move(node));
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    json tables = json::object();
    for (const auto& t : code_tables()) {
        json codes = json::object();
        for (const auto& [label, c] : t.codes) codes[label] = c;
        tables[t.feature] = std::move(codes);
    }
    json doc = {
        {"format", kFormat},
        {"version", kModelFormatVersion},
        {"feature_names", m.feature_names},
        {"code_tables", std::move(tables)},
        {"params", params_json(m.params)},
        {"base_score", m.base_score},
        {"learning_rate", m.learning_rate},
        {"view", to_string(file.view)},
        {"trees", std::move(trees)},
    };
    doc["scoring"] = file.scoring ? scoring_json(*file.scoring) : json(nullptr);
    out << doc.dump(1) << '\n';
}

ModelFile read_model(std::istream& in)
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::MalformedRow, std::string("model document: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kFormat) {
        throw Error(Errc::SchemaIncompatible, "not a tennis-momentum model document");
    }
    if (doc.value("version", 0) != kModelFormatVersion) {
        throw Error(Errc::SchemaIncompatible, "model format version " + doc["version"].dump() + " is not supported");
    }
    try {
        ModelFile f;
        TreeEnsemble& m = f.model;
        m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        m.params = params_from(doc.at("params"));
        m.base_score = doc.at("base_score").get<double>();
        m.learning_rate = doc.at("learning_rate").get<double>();
        f.view = player_view_from_string(doc.value("view", "both"));
        for (const auto& t : doc.at("trees")) {
            Tree tree;
            for (const auto& n : t.at("nodes")) {
                TreeNode node;
                node.value = n.at("value").get<double>();
                node.cover = n.value("cover", 0.0);
                if (n.contains("feature")) {
                    node.feature = n["feature"].get<int>();
                    node.threshold = n.at("threshold").get<double>();
                    node.left = n.at("left").get<int>();
                    node.right = n.at("right").get<int>();
                    node.default_left = n.value("default_left", true);
                    node.gain = n.value("gain", 0.0);
                    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= m.feature_names.size()) {
                        throw Error(Errc::SchemaIncompatible, "split feature out of range");
                    }
                }
                tree.nodes.push_back(node);
            }
            const auto size = static_cast<int>(tree.nodes.size());
            for (const auto& node : tree.nodes) {
                if (!node.is_leaf() && (node.left <= 0 || node.left >= size || node.right <= 0 || node.right >= size)) {
                    throw Error(Errc::SchemaIncompatible, "child index out of range");
                }
            }
            m.trees.push_back(std::move(tree));
        }
        if (doc.contains("scoring") && !doc["scoring"].is_null()) f.scoring = scoring_from(doc["scoring"]);
        return f;
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaIncompatible, std::string("model document: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelFile& file)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
    write_model(out, file);
}

ModelFile load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::EmptyFile, "cannot read " + path.string());
    return read_model(in);
}

} // namespace tennis
