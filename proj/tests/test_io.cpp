#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "ticketforge/construct.hpp"
#include "ticketforge/io.hpp"
#include "ticketforge/verify.hpp"

using namespace ticketforge;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("base64 bitset round trip") {
    std::vector<uint8_t> bits{1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 1};
    std::string enc = detail::bits_to_base64(bits);
    REQUIRE(detail::base64_to_bits(enc, bits.size()) == bits);
    REQUIRE_THROWS_AS(detail::base64_to_bits("abc", 12), IoError);  // not a multiple of 4
}

TEST_CASE("model JSON round trip is canonical") {
    Network net = gen_target({3, 4, 2}, "lrelu:0.1", 0.3, 7);
    json j = model_to_json(net);
    Network back = model_from_json(j);
    REQUIRE(canonical_dump(model_to_json(back)) == canonical_dump(j));
    for (std::size_t l = 0; l < net.depth(); ++l) {
        REQUIRE(back.layers[l].weights.data() == net.layers[l].weights.data());
        REQUIRE(back.layers[l].bias == net.layers[l].bias);
        REQUIRE(back.layers[l].activation == net.layers[l].activation);
    }
}

TEST_CASE("model JSON: unknown activation and non-finite values rejected") {
    Network net = gen_target({2, 2}, "relu", 0.0, 1);
    json j = model_to_json(net);
    json bad_act = j;
    bad_act["layers"][0]["activation"] = "softplus";
    REQUIRE_THROWS_AS(model_from_json(bad_act), Error);
    json bad_num = j;
    bad_num["layers"][0]["weights"][0][0] = "NaN";
    REQUIRE_THROWS_AS(model_from_json(bad_num), Error);
}

TEST_CASE("gen_target: sparsity extremes and param count") {
    Network all_zero = gen_target({3, 4, 2}, "relu", 1.0, 5);
    REQUIRE(nonzero_count(all_zero) == 0);
    Network dense = gen_target({4, 8, 2}, "relu", 0.0, 5);
    REQUIRE(nonzero_count(dense) == 4 * 8 + 8 + 8 * 2 + 2);
    for (const Layer& l : dense.layers) {
        for (double w : l.weights.data()) REQUIRE(std::abs(w) <= 1.0);
        for (double b : l.bias) REQUIRE(std::abs(b) <= 1.0);
    }
}

TEST_CASE("gen_target: same seed gives identical file bytes") {
    std::string p1 = "/tmp/tf_t1.json", p2 = "/tmp/tf_t2.json";
    save_model(gen_target({3, 4, 2}, "tanh", 0.5, 42), p1);
    save_model(gen_target({3, 4, 2}, "tanh", 0.5, 42), p2);
    REQUIRE(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("ticket file round trip reproduces evaluation bit-for-bit") {
    Network target = gen_target({2, 3, 2}, "relu", 0.4, 2);
    ConstructConfig cfg;
    cfg.eps = 0.1;
    cfg.seed = 5;
    Ticket t = construct(target, cfg, "l+1");
    std::string path = "/tmp/tf_ticket.json";
    save_ticket(t, path);
    Ticket back = load_ticket(path);
    std::remove(path.c_str());

    REQUIRE(back.depth() == t.depth());
    for (std::size_t l = 0; l < t.depth(); ++l) {
        REQUIRE(back.masks[l].weights == t.masks[l].weights);
        REQUIRE(back.source.layers[l].weights.data() == t.source.layers[l].weights.data());
    }
    Vec x{0.37, -0.81};
    REQUIRE(forward_ticket(back, x) == forward_ticket(t, x));
    REQUIRE(audit(back).flags.empty());
}

TEST_CASE("ticket save is reproducible byte-for-byte") {
    Network target = gen_target({2, 3, 2}, "tanh", 0.4, 2);
    ConstructConfig cfg;
    cfg.eps = 0.1;
    cfg.seed = 5;
    std::string p1 = "/tmp/tf_k1.json", p2 = "/tmp/tf_k2.json";
    save_ticket(construct(target, cfg, "2l"), p1);
    save_ticket(construct(target, cfg, "2l"), p2);
    REQUIRE(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("read_json: missing file raises IoError") {
    REQUIRE_THROWS_AS(read_json("/tmp/tf_does_not_exist.json"), IoError);
}

TEST_CASE("ticket file: version tag enforced") {
    Network target = gen_target({2, 2}, "relu", 0.5, 1);
    ConstructConfig cfg;
    cfg.eps = 0.1;
    cfg.seed = 1;
    Ticket t = construct(target, cfg, "2l");
    json j = ticket_to_json(t);
    REQUIRE(j["format"] == kFormatVersion);
    j["format"] = "ticketforge/9";
    REQUIRE_THROWS_AS(ticket_from_json(j), IoError);
}
