#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ticketforge/common.hpp"
#include "ticketforge/init.hpp"
#include "ticketforge/network.hpp"
#include "ticketforge/rng.hpp"
#include "ticketforge/ticket.hpp"

namespace ticketforge {

inline constexpr const char* kFormatVersion = "ticketforge/1";

using json = nlohmann::json;

namespace detail {

inline const char* kB64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

// bits packed LSB-first into bytes, then base64 (with padding)
inline std::string bits_to_base64(const std::vector<uint8_t>& bits) {
    std::vector<uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
    std::string out;
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        uint32_t v = static_cast<uint32_t>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) v |= static_cast<uint32_t>(bytes[i + 1]) << 8;
        if (i + 2 < bytes.size()) v |= bytes[i + 2];
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += i + 1 < bytes.size() ? kB64[(v >> 6) & 63] : '=';
        out += i + 2 < bytes.size() ? kB64[v & 63] : '=';
    }
    return out;
}

inline std::vector<uint8_t> base64_to_bits(const std::string& s, std::size_t n_bits) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        if (c == '=') return -1;
        throw IoError("invalid base64 character");
    };
    if (s.size() % 4 != 0) throw IoError("truncated base64");
    std::vector<uint8_t> bytes;
    for (std::size_t i = 0; i < s.size(); i += 4) {
        int a = val(s[i]), b = val(s[i + 1]), c = val(s[i + 2]), d = val(s[i + 3]);
        if (a < 0 || b < 0) throw IoError("malformed base64");
        uint32_t v = (static_cast<uint32_t>(a) << 18) | (static_cast<uint32_t>(b) << 12);
        bytes.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
        if (c >= 0) {
            v |= static_cast<uint32_t>(c) << 6;
            bytes.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
        }
        if (d >= 0) {
            v |= static_cast<uint32_t>(d);
            bytes.push_back(static_cast<uint8_t>(v & 0xff));
        }
    }
    if (bytes.size() < (n_bits + 7) / 8) throw IoError("mask bitset too short");
    std::vector<uint8_t> bits(n_bits, 0);
    for (std::size_t i = 0; i < n_bits; ++i)
        bits[i] = (bytes[i / 8] >> (i % 8)) & 1;
    return bits;
}

inline json domain_to_json(const Box& b) {
    return json{{"low", b.low}, {"high", b.high}};
}

inline Box domain_from_json(const json& j) {
    Box b;
    b.low = j.at("low").get<Vec>();
    b.high = j.at("high").get<Vec>();
    if (b.low.size() != b.high.size()) throw IoError("domain low/high size mismatch");
    return b;
}

}  // namespace detail

inline json model_to_json(const Network& net) {
    json layers = json::array();
    for (const Layer& l : net.layers) {
        json rows = json::array();
        for (std::size_t i = 0; i < l.out_dim(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < l.in_dim(); ++j) row.push_back(l.weights(i, j));
            rows.push_back(std::move(row));
        }
        layers.push_back(json{{"weights", std::move(rows)},
                              {"bias", l.bias},
                              {"activation", l.activation}});
    }
    return json{{"format", kFormatVersion},
                {"layers", std::move(layers)},
                {"domain", detail::domain_to_json(net.domain)}};
}

inline Network model_from_json(const json& j, Role role = Role::target) {
    try {
        if (j.at("format").get<std::string>() != kFormatVersion)
            throw IoError("unknown format version");
        Network net;
        net.role = role;
        net.domain = detail::domain_from_json(j.at("domain"));
        for (const json& jl : j.at("layers")) {
            const json& rows = jl.at("weights");
            if (rows.empty()) throw IoError("layer with no rows");
            Layer l;
            l.activation = jl.at("activation").get<std::string>();
            std::size_t cols = rows[0].size();
            l.weights = Matrix(rows.size(), cols);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != cols) throw IoError("ragged weight matrix");
                for (std::size_t c = 0; c < cols; ++c) l.weights(i, c) = rows[i][c].get<double>();
            }
            l.bias = jl.at("bias").get<Vec>();
            net.layers.push_back(std::move(l));
        }
        validate(net);
        return net;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed model JSON: ") + e.what());
    }
}

namespace detail {

inline json plan_to_json(const InitPlan& p) {
    json layers = json::array();
    for (const InitLayerPlan& l : p.layers)
        layers.push_back(json{{"weight_half_range", l.weight_half_range},
                              {"bias_half_range", l.bias_half_range},
                              {"rows_mirrored", l.rows_mirrored},
                              {"cols_mirrored", l.cols_mirrored}});
    return json{{"scheme", p.scheme}, {"seed", p.seed}, {"layers", std::move(layers)}};
}

inline InitPlan plan_from_json(const json& j) {
    InitPlan p;
    p.scheme = j.at("scheme").get<std::string>();
    p.seed = j.at("seed").get<uint64_t>();
    for (const json& jl : j.at("layers"))
        p.layers.push_back({jl.at("weight_half_range").get<double>(),
                            jl.at("bias_half_range").get<double>(),
                            jl.at("rows_mirrored").get<bool>(),
                            jl.at("cols_mirrored").get<bool>()});
    return p;
}

inline json block_to_json(const BlockRecord& r) {
    return json{{"kind", static_cast<int>(r.kind)},
                {"layer", r.layer},
                {"row", r.row},
                {"target_out", r.target_out},
                {"target_in", r.target_in},
                {"copy", r.copy},
                {"branch", r.branch},
                {"z", r.z},
                {"tolerance", r.tolerance},
                {"residual", r.residual},
                {"achieved", r.achieved},
                {"mirrored", r.mirrored},
                {"picks", r.picks}};
}

inline BlockRecord block_from_json(const json& j) {
    BlockRecord r;
    int kind = j.at("kind").get<int>();
    if (kind < 0 || kind > 3) throw IoError("unknown block kind");
    r.kind = static_cast<BlockRecord::Kind>(kind);
    r.layer = j.at("layer").get<int>();
    r.row = j.at("row").get<int>();
    r.target_out = j.at("target_out").get<int>();
    r.target_in = j.at("target_in").get<int>();
    r.copy = j.at("copy").get<int>();
    r.branch = j.at("branch").get<int>();
    r.z = j.at("z").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.residual = j.at("residual").get<double>();
    r.achieved = j.at("achieved").get<bool>();
    r.mirrored = j.at("mirrored").get<bool>();
    r.picks = j.at("picks").get<std::vector<int>>();
    return r;
}

}  // namespace detail

inline json ticket_to_json(const Ticket& t) {
    validate_masks(t);
    const ConstructionManifest& m = t.manifest;
    json masks = json::array();
    for (const MaskLayer& ml : t.masks)
        masks.push_back(json{{"weights", detail::bits_to_base64(ml.weights)},
                             {"bias", detail::bits_to_base64(ml.bias)}});
    json blocks = json::array();
    for (const BlockRecord& r : m.blocks) blocks.push_back(detail::block_to_json(r));
    std::vector<std::string> tags;
    for (const Layer& l : t.source.layers) tags.push_back(l.activation);
    json manifest{{"seed", m.seed},
                  {"mode", m.mode},
                  {"eps", m.eps},
                  {"delta", m.delta},
                  {"pool_m", m.pool_m},
                  {"attempts", m.attempts},
                  {"copy_plan", m.copy_plan},
                  {"layer_eps", m.layer_eps},
                  {"blocks", std::move(blocks)},
                  {"carrier_cols", m.carrier_cols},
                  {"carrier_values", m.carrier_values}};
    return json{{"format", kFormatVersion},
                {"source_seed", m.init_plan.seed},
                {"source_arch", t.source.arch()},
                {"activations", tags},
                {"domain", detail::domain_to_json(t.source.domain)},
                {"init_plan", detail::plan_to_json(m.init_plan)},
                {"masks", std::move(masks)},
                {"scales", t.scales},
                {"manifest", std::move(manifest)}};
}

inline Ticket ticket_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != kFormatVersion)
            throw IoError("unknown format version");
        Ticket t;
        auto arch = j.at("source_arch").get<std::vector<std::size_t>>();
        auto tags = j.at("activations").get<std::vector<std::string>>();
        Box domain = detail::domain_from_json(j.at("domain"));
        t.manifest.init_plan = detail::plan_from_json(j.at("init_plan"));
        t.source = realize_source(t.manifest.init_plan, arch, tags, domain);
        t.scales = j.at("scales").get<Vec>();
        for (std::size_t l = 0; l < t.source.depth(); ++l) {
            const json& jm = j.at("masks").at(l);
            MaskLayer ml;
            ml.weights = detail::base64_to_bits(
                jm.at("weights").get<std::string>(),
                t.source.layers[l].weights.rows() * t.source.layers[l].weights.cols());
            ml.bias = detail::base64_to_bits(jm.at("bias").get<std::string>(),
                                             t.source.layers[l].bias.size());
            t.masks.push_back(std::move(ml));
        }
        const json& jm = j.at("manifest");
        ConstructionManifest& m = t.manifest;
        m.seed = jm.at("seed").get<uint64_t>();
        m.mode = jm.at("mode").get<std::string>();
        m.eps = jm.at("eps").get<double>();
        m.delta = jm.at("delta").get<double>();
        m.pool_m = jm.at("pool_m").get<int>();
        m.attempts = jm.at("attempts").get<int>();
        m.copy_plan = jm.at("copy_plan").get<std::vector<int>>();
        m.layer_eps = jm.at("layer_eps").get<Vec>();
        for (const json& jb : jm.at("blocks")) m.blocks.push_back(detail::block_from_json(jb));
        m.carrier_cols = jm.at("carrier_cols").get<std::vector<std::vector<int>>>();
        m.carrier_values = jm.at("carrier_values").get<std::vector<Vec>>();
        validate_masks(t);
        return t;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed ticket JSON: ") + e.what());
    }
}

// Canonical form: sorted keys (nlohmann objects are sorted) with shortest
// round-trip number formatting and a trailing newline. Byte-stable across
// runs and machines for the same content.
inline std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

inline json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

inline void save_model(const Network& net, const std::string& path) {
    write_text(path, canonical_dump(model_to_json(net)));
}

inline Network load_model(const std::string& path, Role role = Role::target) {
    return model_from_json(read_json(path), role);
}

inline void save_ticket(const Ticket& t, const std::string& path) {
    write_text(path, canonical_dump(ticket_to_json(t)));
}

inline Ticket load_ticket(const std::string& path) { return ticket_from_json(read_json(path)); }

// Desk-scale target: parameters U[-1,1], a `sparsity` fraction zeroed.
inline Network gen_target(const std::vector<std::size_t>& arch, const std::string& activation,
                          double sparsity, uint64_t seed) {
    if (!(sparsity >= 0.0 && sparsity <= 1.0))
        throw DomainError("gen_target: sparsity must be in [0,1]");
    if (!is_registered_activation(activation))
        throw DomainError("gen_target: unknown activation '" + activation + "'");
    Network net;
    net.role = Role::target;
    net.domain = Box::unit(arch.at(0));
    for (std::size_t l = 1; l < arch.size(); ++l) {
        Layer layer;
        layer.activation = activation;
        layer.weights = Matrix(arch[l], arch[l - 1]);
        layer.bias.assign(arch[l], 0.0);
        for (std::size_t i = 0; i < arch[l]; ++i) {
            for (std::size_t j = 0; j < arch[l - 1]; ++j) {
                bool zero = unit_at(seed, {0x7au, l, i, j}) < sparsity;
                layer.weights(i, j) =
                    zero ? 0.0 : uniform_at(seed, {0x74u, l, i, j}, 1.0);
            }
            bool zero = unit_at(seed, {0x7au, l, i}) < sparsity;
            layer.bias[i] = zero ? 0.0 : uniform_at(seed, {0x74u, l, i}, 1.0);
        }
        net.layers.push_back(std::move(layer));
    }
    validate(net);
    return net;
}

}  // namespace ticketforge
