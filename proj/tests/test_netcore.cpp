#include <catch2/catch_amalgamated.hpp>

#include "ticketforge/network.hpp"
#include "ticketforge/ticket.hpp"

using namespace ticketforge;

namespace {

Network one_layer(std::size_t out, std::size_t in, std::vector<double> w, Vec b,
                  const std::string& act, double box = 1.0) {
    Network net;
    Layer l;
    l.weights = Matrix(out, in);
    for (std::size_t i = 0; i < out * in; ++i) l.weights.data()[i] = w[i];
    l.bias = std::move(b);
    l.activation = act;
    net.layers.push_back(std::move(l));
    net.domain = Box{Vec(in, -box), Vec(in, box)};
    return net;
}

}  // namespace

TEST_CASE("forward: linear identity") {
    Network net = one_layer(2, 2, {1, 0, 0, 1}, {0, 0}, "linear");
    Vec y = forward(net, {0.3, -0.2});
    REQUIRE(y[0] == 0.3);
    REQUIRE(y[1] == -0.2);
}

TEST_CASE("forward: relu clamps negative pre-activation") {
    Network net = one_layer(1, 2, {1, -1}, {0.5}, "relu", 2.0);
    Vec y = forward(net, {1.0, 2.0});
    REQUIRE(y[0] == 0.0);
}

TEST_CASE("forward: sigmoid of zero") {
    Network net = one_layer(1, 1, {0}, {0}, "sigmoid", 5.0);
    REQUIRE(forward(net, {5.0})[0] == 0.5);
}

TEST_CASE("forward: dimension mismatch throws") {
    Network net = one_layer(1, 2, {1, 1}, {0}, "relu");
    REQUIRE_THROWS_AS(forward(net, {1.0}), ShapeError);
}

TEST_CASE("forward: deterministic") {
    Network net = one_layer(2, 2, {0.3, -0.7, 0.1, 0.9}, {0.2, -0.1}, "tanh");
    Vec a = forward(net, {0.5, -0.5});
    Vec b = forward(net, {0.5, -0.5});
    REQUIRE(a == b);
}

TEST_CASE("validate: target parameter bound") {
    Network net = one_layer(1, 1, {1.5}, {0}, "relu");
    REQUIRE_THROWS_AS(validate(net), DomainError);
    net.role = Role::source;
    REQUIRE_NOTHROW(validate(net));
}

TEST_CASE("forward_ticket: all-ones mask equals forward bit-for-bit") {
    Network net = one_layer(2, 2, {0.3, -0.7, 0.1, 0.9}, {0.2, -0.1}, "tanh");
    Ticket t = make_dense_ticket(net);
    Vec x{0.37, -0.81};
    REQUIRE(forward_ticket(t, x) == forward(net, x));
}

TEST_CASE("forward_ticket: all-zeros mask gives constant composition") {
    Network net = one_layer(1, 2, {0.5, 0.5}, {0.3}, "relu");
    Ticket t = make_dense_ticket(net);
    std::fill(t.masks[0].weights.begin(), t.masks[0].weights.end(), 0);
    std::fill(t.masks[0].bias.begin(), t.masks[0].bias.end(), 0);
    REQUIRE(forward_ticket(t, {1.0, 1.0})[0] == 0.0);  // relu(0)
}

TEST_CASE("forward_ticket: scale lambda applied") {
    Network net = one_layer(1, 1, {0.5}, {0}, "linear");
    Ticket t = make_dense_ticket(net);
    t.scales[0] = 2.0;
    REQUIRE(forward_ticket(t, {1.0})[0] == 1.0);
}

TEST_CASE("nonzero_count") {
    Network zero = one_layer(2, 2, {0, 0, 0, 0}, {0, 0}, "relu");
    REQUIRE(nonzero_count(zero) == 0);
    Network net = one_layer(2, 2, {1, 0, 0, 1}, {0, 1}, "relu");
    REQUIRE(nonzero_count(net) == 3);
}

TEST_CASE("ticket_stats: params and max width") {
    Network net = one_layer(2, 2, {1, 0, 0, 1}, {0, 1}, "relu");
    Ticket t = make_dense_ticket(net);
    TicketStats st = ticket_stats(t);
    REQUIRE(st.param_count == 6);  // all mask-kept, zeros included
    REQUIRE(st.depth == 1);
    REQUIRE(st.max_width == 2);

    // drop everything touching neuron 1
    t.masks[0].weights[2] = 0;
    t.masks[0].weights[3] = 0;
    t.masks[0].bias[1] = 0;
    st = ticket_stats(t);
    REQUIRE(st.param_count == 3);
}

TEST_CASE("validate_masks: shape mismatch rejected") {
    Network net = one_layer(1, 1, {0.5}, {0}, "relu");
    Ticket t = make_dense_ticket(net);
    t.masks[0].weights.push_back(1);
    REQUIRE_THROWS_AS(validate_masks(t), ShapeError);
}
