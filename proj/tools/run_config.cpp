#include "run_config.hpp"

#include <fstream>

namespace photonkd::cli {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json &obj, std::initializer_list<const char *> allowed,
                         const std::string &where) {
    for (const auto &item : obj.items()) {
        bool known = false;
        for (const char *key : allowed)
            known |= item.key() == key;
        if (!known)
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
}

const json &expect_object(const json &doc, const std::string &where) {
    if (!doc.is_object())
        throw ConfigError(where + " must be a JSON object");
    return doc;
}

double number_in(const json &obj, const char *key, double lo, double hi,
                 double fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj[key].is_number())
        throw ConfigError(std::string("\"") + key + "\" must be a number");
    const double v = obj[key].get<double>();
    if (!(v >= lo && v <= hi))
        throw ConfigError(std::string("\"") + key + "\" out of range");
    return v;
}

std::vector<BasisId> parse_bases(const json &arr, const std::string &where) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError(where + " must be a nonempty array of basis names");
    std::vector<BasisId> out;
    for (const auto &entry : arr) {
        if (!entry.is_string())
            throw ConfigError(where + " entries must be strings like \"B1\"");
        const auto b = basis_from_name(entry.get<std::string>());
        if (!b)
            throw ConfigError(where + ": unknown basis \"" +
                              entry.get<std::string>() + "\"");
        out.push_back(*b);
    }
    return out;
}

MzemSettings parse_mzem(const json &obj) {
    reject_unknown_keys(obj,
                        {"preset", "phi", "bs_ratio", "visibility", "visibility_a",
                         "visibility_b", "port_a_collects_even"},
                        "\"mzem\"");
    MzemSettings s = MzemSettings::ideal();
    if (obj.contains("preset")) {
        if (!obj["preset"].is_string())
            throw ConfigError("\"mzem.preset\" must be a string");
        try {
            s = MzemSettings::preset(obj["preset"].get<std::string>());
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
    }
    if (obj.contains("visibility")) {
        const double v = number_in(obj, "visibility", 0.0, 1.0, 1.0);
        s.visibility_a.fill(v);
        s.visibility_b.fill(v);
    }
    for (const char *key : {"visibility_a", "visibility_b"}) {
        if (!obj.contains(key))
            continue;
        const json &arr = obj[key];
        if (!arr.is_array() || arr.size() != 4)
            throw ConfigError(std::string("\"mzem.") + key +
                              "\" must be an array of 4 numbers");
        auto &target = key[11] == 'a' ? s.visibility_a : s.visibility_b;
        for (int k = 0; k < 4; ++k) {
            if (!arr[k].is_number())
                throw ConfigError(std::string("\"mzem.") + key +
                                  "\" entries must be numbers");
            target[k] = arr[k].get<double>();
        }
    }
    s.phi = number_in(obj, "phi", -1e9, 1e9, s.phi);
    s.bs_ratio = number_in(obj, "bs_ratio", 1e-12, 1.0 - 1e-12, s.bs_ratio);
    if (obj.contains("port_a_collects_even")) {
        if (!obj["port_a_collects_even"].is_boolean())
            throw ConfigError("\"mzem.port_a_collects_even\" must be a boolean");
        s.port_a_collects_even = obj["port_a_collects_even"].get<bool>();
    }
    try {
        s.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return s;
}

OutputPaths parse_output(const json &obj) {
    reject_unknown_keys(obj, {"stats", "records", "alice_key", "bob_key"},
                        "\"output\"");
    OutputPaths out;
    const auto read = [&](const char *key, std::optional<std::string> &slot) {
        if (!obj.contains(key))
            return;
        if (!obj[key].is_string())
            throw ConfigError(std::string("\"output.") + key +
                              "\" must be a string path");
        slot = obj[key].get<std::string>();
    };
    read("stats", out.stats);
    read("records", out.records);
    read("alice_key", out.alice_key);
    read("bob_key", out.bob_key);
    return out;
}

} // namespace

RunConfig parse_run_config(const nlohmann::json &doc) {
    expect_object(doc, "run config");
    reject_unknown_keys(doc,
                        {"bases", "rounds", "seed", "workers", "eve", "channel",
                         "mzem", "qber_abort_threshold", "output"},
                        "run config");
    if (!doc.contains("bases"))
        throw ConfigError("run config requires \"bases\"");
    if (!doc.contains("rounds"))
        throw ConfigError("run config requires \"rounds\"");

    RunConfig cfg;
    cfg.protocol.basis_set = parse_bases(doc["bases"], "\"bases\"");

    if (!doc["rounds"].is_number_unsigned() || doc["rounds"].get<std::uint64_t>() == 0)
        throw ConfigError("\"rounds\" must be a positive integer");
    cfg.protocol.n_rounds = doc["rounds"].get<std::uint64_t>();

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned())
            throw ConfigError("\"seed\" must be a nonnegative integer");
        cfg.protocol.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("workers")) {
        if (!doc["workers"].is_number_unsigned() ||
            doc["workers"].get<std::uint64_t>() == 0 ||
            doc["workers"].get<std::uint64_t>() > 256)
            throw ConfigError("\"workers\" must be an integer in 1..256");
        cfg.protocol.workers = static_cast<int>(doc["workers"].get<std::uint64_t>());
    }
    if (doc.contains("eve")) {
        const json &eve = expect_object(doc["eve"], "\"eve\"");
        reject_unknown_keys(eve, {"enabled", "bases"}, "\"eve\"");
        if (eve.contains("enabled")) {
            if (!eve["enabled"].is_boolean())
                throw ConfigError("\"eve.enabled\" must be a boolean");
            cfg.protocol.eve.enabled = eve["enabled"].get<bool>();
        }
        if (eve.contains("bases"))
            cfg.protocol.eve.bases = parse_bases(eve["bases"], "\"eve.bases\"");
    }
    if (doc.contains("channel")) {
        const json &ch = expect_object(doc["channel"], "\"channel\"");
        reject_unknown_keys(ch, {"transmission", "depolarizing"}, "\"channel\"");
        cfg.protocol.channel.transmission =
            number_in(ch, "transmission", 1e-12, 1.0, 1.0);
        cfg.protocol.channel.depolarizing =
            number_in(ch, "depolarizing", 0.0, 1.0, 0.0);
    }
    if (doc.contains("mzem"))
        cfg.protocol.mzem = parse_mzem(expect_object(doc["mzem"], "\"mzem\""));
    cfg.protocol.qber_abort_threshold =
        number_in(doc, "qber_abort_threshold", 0.0, 1.0, 1.0);
    if (doc.contains("output"))
        cfg.output = parse_output(expect_object(doc["output"], "\"output\""));

    try {
        cfg.protocol.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

} // namespace photonkd::cli
