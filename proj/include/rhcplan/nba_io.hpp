#pragma once

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "rhcplan/nba.hpp"

namespace rhcplan {

class schema_error : public std::runtime_error {
public:
    schema_error(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message) {}
};

/// Serializes an NBA into the interchange document:
///   { "atoms": [..], "states": [..], "initial": [..], "accepting": [..],
///     "transitions": [{"from":s, "to":t, "labels": [["a","b"],..]}, ..] }
inline nlohmann::json export_nba(const Nba& b) {
    nlohmann::json doc;
    doc["atoms"] = b.atoms.names();
    std::vector<std::uint32_t> states(b.num_states);
    for (std::uint32_t s = 0; s < b.num_states; ++s) states[s] = s;
    doc["states"] = states;
    doc["initial"] = b.initial;
    doc["accepting"] = b.accepting;
    nlohmann::json trans = nlohmann::json::array();
    for (const auto& e : b.edges) {
        nlohmann::json je;
        je["from"] = e.from;
        je["to"] = e.to;
        nlohmann::json labels = nlohmann::json::array();
        for (auto l : e.labels) labels.push_back(b.atoms.names_of(l));
        je["labels"] = std::move(labels);
        trans.push_back(std::move(je));
    }
    doc["transitions"] = std::move(trans);
    return doc;
}

inline Nba import_nba(const nlohmann::json& doc) {
    auto need = [&](const char* field) -> const nlohmann::json& {
        if (!doc.contains(field)) throw schema_error(field, "missing field");
        return doc.at(field);
    };

    const auto& jatoms = need("atoms");
    if (!jatoms.is_array()) throw schema_error("atoms", "expected array of names");
    std::vector<std::string> names;
    for (const auto& a : jatoms) {
        if (!a.is_string()) throw schema_error("atoms", "expected string entries");
        names.push_back(a.get<std::string>());
    }

    Nba b;
    try {
        b.atoms = AtomSet(names);
    } catch (const std::invalid_argument& e) {
        throw schema_error("atoms", e.what());
    }

    const auto& jstates = need("states");
    if (!jstates.is_array() || jstates.empty())
        throw schema_error("states", "expected non-empty array of ids");
    std::map<std::uint64_t, std::uint32_t> remap; // document id -> dense id
    auto nonneg = [](const nlohmann::json& v) {
        return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    };
    for (const auto& s : jstates) {
        if (!nonneg(s)) throw schema_error("states", "ids must be unsigned integers");
        auto [it, fresh] = remap.emplace(s.get<std::uint64_t>(),
                                         static_cast<std::uint32_t>(remap.size()));
        (void)it;
        if (!fresh) throw schema_error("states", "duplicate state id");
    }
    b.num_states = static_cast<std::uint32_t>(remap.size());

    auto lookup = [&](const nlohmann::json& v, const char* where) {
        if (!nonneg(v)) throw schema_error(where, "ids must be unsigned integers");
        auto it = remap.find(v.get<std::uint64_t>());
        if (it == remap.end())
            throw schema_error(where, "dangling state reference " + v.dump());
        return it->second;
    };

    const auto& jinit = need("initial");
    if (!jinit.is_array()) throw schema_error("initial", "expected array");
    for (const auto& s : jinit) b.initial.push_back(lookup(s, "initial"));

    const auto& jacc = need("accepting");
    if (!jacc.is_array()) throw schema_error("accepting", "expected array");
    for (const auto& s : jacc) b.accepting.push_back(lookup(s, "accepting"));

    const auto& jtrans = need("transitions");
    if (!jtrans.is_array()) throw schema_error("transitions", "expected array");
    for (std::size_t i = 0; i < jtrans.size(); ++i) {
        const auto& jt = jtrans[i];
        std::string where = "transitions[" + std::to_string(i) + "]";
        if (!jt.is_object()) throw schema_error(where, "expected object");
        if (!jt.contains("from") || !jt.contains("to") || !jt.contains("labels"))
            throw schema_error(where, "needs from, to, labels");
        NbaEdge e;
        e.from = lookup(jt.at("from"), where.c_str());
        e.to = lookup(jt.at("to"), where.c_str());
        const auto& jl = jt.at("labels");
        if (!jl.is_array()) throw schema_error(where + ".labels", "expected array of label sets");
        for (const auto& one : jl) {
            if (!one.is_array()) throw schema_error(where + ".labels", "label set must be an array");
            std::vector<std::string> atom_names;
            for (const auto& a : one) {
                if (!a.is_string())
                    throw schema_error(where + ".labels", "atom names must be strings");
                atom_names.push_back(a.get<std::string>());
            }
            try {
                e.labels.push_back(b.atoms.mask_of(atom_names));
            } catch (const unknown_atom& ex) {
                throw schema_error(where + ".labels", ex.what());
            }
        }
        b.edges.push_back(std::move(e));
    }

    try {
        b.finalize();
    } catch (const std::invalid_argument& e) {
        throw schema_error("transitions", e.what());
    }
    return b;
}

inline void write_nba_file(const Nba& b, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << export_nba(b).dump(2) << "\n";
}

inline Nba read_nba_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(path, e.what());
    }
    return import_nba(doc);
}

} // namespace rhcplan
