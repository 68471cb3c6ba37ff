#include <doctest.h>

#include <cmath>
#include <random>

#include "myo/encoder.hpp"
#include "myo/errors.hpp"
#include "support.hpp"

using namespace myo;
using myo::test::rel_err;

namespace {

std::vector<double> random_input(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = u(g);
    return x;
}

}  // namespace

TEST_CASE("encoder: hidden widths double from 8 per block") {
    EncoderConfig c;
    c.n_blocks = 3;
    CHECK(c.hidden_widths() == std::vector<int>{32, 16, 8});
    c.n_blocks = 2;
    CHECK(c.hidden_widths() == std::vector<int>{16, 8});
    c.n_blocks = 1;
    CHECK(c.hidden_widths() == std::vector<int>{8});
    c.n_blocks = 4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.n_blocks = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("encoder: parameter count follows the layer layout") {
    EncoderConfig c;
    c.n_blocks = 2;
    const EncoderState s(c, 7410, 1);
    // dense 7410->16, norm 16, dense 16->8, norm 8, dense 8->2
    const std::size_t expected = 7410 * 16 + 16 + 2 * 16 + 16 * 8 + 8 + 2 * 8 + 8 * 2 + 2;
    CHECK(s.param_count() == expected);
}

TEST_CASE("encoder: seeded initialisation is deterministic") {
    const EncoderConfig c;
    const EncoderState a(c, 30, 5), b(c, 30, 5), d(c, 30, 6);
    CHECK(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
    CHECK(!std::equal(a.params().begin(), a.params().end(), d.params().begin()));
}

TEST_CASE("encoder: outputs are in (0, 1) and backward matches finite differences") {
    for (Activation act : {Activation::relu, Activation::leaky_relu}) {
        for (int blocks = 1; blocks <= 3; ++blocks) {
            EncoderConfig c;
            c.activation = act;
            c.n_blocks = blocks;
            EncoderState s(c, 12, 100 + static_cast<std::uint64_t>(blocks));
            const std::vector<double> x = random_input(12, 3);
            EncoderState::Tape tape;
            const std::vector<double> u = s.forward(x, tape);
            REQUIRE(u.size() == 2);
            for (double v : u) CHECK((v > 0.0 && v < 1.0));

            // L = 0.7 u0 - 1.3 u1
            const std::vector<double> du{0.7, -1.3};
            std::vector<double> grad(s.param_count(), 0.0);
            s.backward(x, tape, du, grad);
            auto loss = [&](EncoderState& st) {
                const auto y = st.forward(x);
                return 0.7 * y[0] - 1.3 * y[1];
            };
            std::mt19937_64 g(blocks);
            std::uniform_int_distribution<std::size_t> pick(0, s.param_count() - 1);
            for (int k = 0; k < 20; ++k) {
                const std::size_t i = pick(g);
                const double keep = s.params()[i];
                s.params()[i] = keep + 1e-6;
                const double up = loss(s);
                s.params()[i] = keep - 1e-6;
                const double dn = loss(s);
                s.params()[i] = keep;
                const double fd = (up - dn) / 2e-6;
                CHECK(std::abs(grad[i] - fd) <= 1e-6 + 1e-4 * std::abs(fd));
            }
        }
    }
}

TEST_CASE("encoder: align_output places the latent at a target") {
    EncoderState s(EncoderConfig{}, 20, 9);
    const std::vector<double> x = random_input(20, 4);
    s.align_output(x, std::vector<double>{0.25, 0.8});
    const auto u = s.forward(x);
    CHECK(u[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(s.align_output(x, std::vector<double>{0.5}), ShapeError);
}

TEST_CASE("encoder: wrong input size and stored-parameter mismatch are shape errors") {
    const EncoderState s(EncoderConfig{}, 20, 9);
    CHECK_THROWS_AS(s.forward(random_input(19, 1)), ShapeError);
    CHECK_THROWS_AS(EncoderState(EncoderConfig{}, 20, std::vector<double>(5)), ShapeError);
}

TEST_CASE("physical scaling: endpoints span the array and the velocity bounds") {
    const PhysicalScalerBounds b = PhysicalScalerBounds::for_array(ArrayConfig{}.electrodes());
    const EstimatedParams lo = physical_scale(std::vector<double>{0.0, 0.0}, b);
    const EstimatedParams hi = physical_scale(std::vector<double>{1.0, 1.0}, b);
    CHECK(lo.iz_hat == doctest::Approx(-0.0975).epsilon(1e-12));
    CHECK(lo.v_hat == 3.0);
    CHECK(hi.iz_hat == doctest::Approx(0.0975).epsilon(1e-12));
    CHECK(hi.v_hat == 6.0);
    const EstimatedParams mid{0.0123, 4.56};
    const EstimatedParams back = physical_scale(physical_unscale(mid, b), b);
    CHECK(rel_err(back.iz_hat, mid.iz_hat) < 1e-12);
    CHECK(rel_err(back.v_hat, mid.v_hat) < 1e-12);
    CHECK_THROWS_AS(PhysicalScalerBounds::for_array(ArrayConfig{}.electrodes(), {6.0, 3.0}), ConfigError);
}
