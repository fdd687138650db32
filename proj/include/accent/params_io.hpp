#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "accent/error.hpp"
#include "accent/model_params.hpp"
#include "accent/phone_features.hpp"

namespace accent {

/*
 * Parameter snapshot, JSON:
 *
 *   {
 *     "format": "accent-model-params",
 *     "version": 1,
 *     "feature_space_size": 714,
 *     "p_ins": 0.01, "prior_weight": 20, "sigma": 0.666...,
 *     "emit_ins": [714 numbers, indexed like FeatureSpace],
 *     "phonemes": [
 *       {"kind": "V", "features": [d2, d3, d4, d5, d6], "p_del_bar": 0.01,
 *        "emit": [714 numbers]},
 *       ...
 *     ]
 *   }
 *
 * Consonant feature arrays carry four values. Numbers are written in
 * shortest round-trip form, so load(dump(p)) == p bit for bit.
 */
inline constexpr const char* kParamsFormat = "accent-model-params";
inline constexpr int kParamsVersion = 1;

inline nlohmann::json params_to_json(const ModelParams& params) {
    nlohmann::json j;
    j["format"] = kParamsFormat;
    j["version"] = kParamsVersion;
    j["feature_space_size"] = FeatureSpace::size();
    j["p_ins"] = params.p_ins;
    j["prior_weight"] = params.prior_weight;
    j["sigma"] = params.sigma;
    j["emit_ins"] = params.emit_ins;
    auto phonemes = nlohmann::json::array();
    for (const auto& [p, dist] : params.emit) {
        nlohmann::json entry;
        entry["kind"] = p.is_vowel() ? "V" : "C";
        auto features = nlohmann::json::array();
        for (std::size_t d = 2; d < 2 + p.dimension_count(); ++d) features.push_back(p.dim(d));
        entry["features"] = features;
        entry["p_del_bar"] = params.del_bar(p);
        entry["emit"] = dist;
        phonemes.push_back(std::move(entry));
    }
    j["phonemes"] = std::move(phonemes);
    return j;
}

inline std::string dump_params(const ModelParams& params) { return params_to_json(params).dump(1) + "\n"; }

inline ModelParams params_from_json(const nlohmann::json& j) {
    auto field = [&](const nlohmann::json& obj, const char* name) -> const nlohmann::json& {
        if (!obj.is_object() || !obj.contains(name))
            throw SchemaMismatch(std::string("missing field '") + name + "'");
        return obj.at(name);
    };
    auto number = [&](const nlohmann::json& obj, const char* name) {
        const auto& v = field(obj, name);
        if (!v.is_number()) throw SchemaMismatch(std::string("field '") + name + "' is not a number");
        return v.get<double>();
    };
    auto distribution = [&](const nlohmann::json& obj, const char* name) {
        const auto& v = field(obj, name);
        if (!v.is_array() || v.size() != FeatureSpace::size())
            throw SchemaMismatch(std::string("field '") + name + "' must hold " +
                                 std::to_string(FeatureSpace::size()) + " numbers");
        FeatureDistribution out;
        out.reserve(v.size());
        for (const auto& x : v) {
            if (!x.is_number()) throw SchemaMismatch(std::string("non-numeric entry in '") + name + "'");
            out.push_back(x.get<double>());
        }
        return out;
    };

    if (!j.is_object() || j.value("format", std::string()) != kParamsFormat)
        throw SchemaMismatch("not a parameter snapshot");
    if (field(j, "version") != kParamsVersion)
        throw SchemaMismatch("unsupported snapshot version " + field(j, "version").dump());
    if (field(j, "feature_space_size") != FeatureSpace::size())
        throw SchemaMismatch("feature space size mismatch");

    ModelParams params;
    params.p_ins = number(j, "p_ins");
    params.prior_weight = number(j, "prior_weight");
    params.sigma = number(j, "sigma");
    params.emit_ins = distribution(j, "emit_ins");

    const auto& phonemes = field(j, "phonemes");
    if (!phonemes.is_array()) throw SchemaMismatch("field 'phonemes' is not an array");
    for (const auto& entry : phonemes) {
        const auto& kind = field(entry, "kind");
        const auto& f = field(entry, "features");
        if (!f.is_array()) throw SchemaMismatch("field 'features' is not an array");
        for (const auto& x : f)
            if (!x.is_number_integer()) throw SchemaMismatch("feature values must be integers");
        Phoneme p = PhoneFeatures::vowel(1, 1, 0);
        try {
            if (kind == "V" && f.size() == PhoneFeatures::kVowelDims)
                p = PhoneFeatures::vowel(f[0], f[1], f[2], f[3], f[4]);
            else if (kind == "C" && f.size() == PhoneFeatures::kConsonantDims)
                p = PhoneFeatures::consonant(f[0], f[1], f[2], f[3]);
            else
                throw SchemaMismatch("bad phoneme kind or feature count");
        } catch (const InvalidFeature& e) {
            throw SchemaMismatch(e.what());
        }
        if (params.emit.count(p)) throw SchemaMismatch("duplicate phoneme " + p.to_string());
        params.p_del_bar[p] = number(entry, "p_del_bar");
        params.emit[p] = distribution(entry, "emit");
    }
    return params;
}

inline ModelParams load_params_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaMismatch(std::string("invalid JSON: ") + e.what());
    }
    return params_from_json(j);
}

inline void save_params(const ModelParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << dump_params(params);
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline ModelParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_params_text(buf.str());
}

}  // namespace accent
