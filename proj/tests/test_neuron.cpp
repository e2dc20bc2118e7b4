#include <doctest.h>

#include <cmath>

#include "eqspike/neuron.hpp"
#include "test_util.hpp"

using namespace eqspike;

namespace {

SpikeTensor step_tracked(NeuronState& state, const Tensor& current, const LifParams& p) {
    const SpikeTensor s = lif_step(state, current, p);
    asr_update(state, s, p);
    return s;
}

}  // namespace

TEST_CASE("silent neuron stays silent") {
    NeuronState state({3});
    const SpikeTensor s = lif_step(state, Tensor::zeros({3}), {1.0, 1.0});
    CHECK(s.count() == 0);
    for (double v : state.u().data()) CHECK(v == 0.0);
}

TEST_CASE("constant sub-threshold drive spikes at 3, 6, 8, ...") {
    // Drive at 2/5 of threshold: cumulative input first exceeds v_th at step 3
    // (1.2x threshold, residual 0.4x = 0.2 in threshold units). Scaled to
    // integers so the pattern is exact in doubles.
    NeuronState state({1});
    const LifParams p{5.0, 1.0};
    std::vector<std::size_t> spike_steps;
    for (std::size_t t = 1; t <= 13; ++t) {
        if (lif_step(state, Tensor::row({2.0}), p).count() > 0) spike_steps.push_back(t);
    }
    CHECK(spike_steps == std::vector<std::size_t>{3, 6, 8, 11, 13});

    // The literal 0.4-per-step neuron agrees with a scalar loop in the same
    // arithmetic.
    NeuronState literal({1});
    double u = 0.0;
    for (std::size_t t = 1; t <= 50; ++t) {
        const SpikeTensor s = lif_step(literal, Tensor::row({0.4}), {1.0, 1.0});
        u += 0.4;
        const bool expect = u > 1.0;
        if (expect) u -= 1.0;
        CHECK(static_cast<bool>(s[0]) == expect);
        CHECK(literal.u()[0] == u);
    }
}

TEST_CASE("single large input spikes once with residual potential") {
    NeuronState state({1});
    const SpikeTensor s = lif_step(state, Tensor::row({2.5}), {1.0, 0.99});
    CHECK(s.count() == 1);
    CHECK(state.u()[0] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("lif_step rejects mismatched shapes") {
    NeuronState state({2});
    CHECK_THROWS_AS(lif_step(state, Tensor::zeros({3}), LifParams{}), ShapeError);
}

TEST_CASE("asr saturates at one and averages plainly for IF") {
    const LifParams p{1.0, 1.0};
    NeuronState ones({2});
    const SpikeTensor all = SpikeTensor::from_bits({2}, {1, 1});
    for (int t = 0; t < 7; ++t) {
        lif_step(ones, Tensor::full({2}, 5.0), p);
        asr_update(ones, all, p);
    }
    const Tensor saturated = ones.asr();
    for (double v : saturated.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    NeuronState alt({1});
    for (std::uint8_t bit : {1, 0, 1, 0}) {
        lif_step(alt, Tensor::row({0.0}), p);
        asr_update(alt, SpikeTensor::from_bits({1}, {bit}), p);
    }
    CHECK(alt.asr()[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("leaky asr matches the closed form") {
    const LifParams p{1.0, 0.5};
    NeuronState state({1});
    for (std::uint8_t bit : {1, 0}) {
        lif_step(state, Tensor::row({0.0}), p);
        asr_update(state, SpikeTensor::from_bits({1}, {bit}), p);
    }
    CHECK(state.asr()[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("asr is undefined before the first step") {
    NeuronState state({1});
    CHECK_THROWS_AS(state.asr(), ContractError);
}

TEST_CASE("IF run asr equals spike count over steps") {
    Rng rng(41);
    const LifParams p{1.0, 1.0};
    NeuronState state({4});
    std::vector<std::size_t> counts(4, 0);
    for (int t = 0; t < 200; ++t) {
        const Tensor current = eqspike::testing::random_tensor(rng, {4}, 0.0, 0.6);
        const SpikeTensor s = step_tracked(state, current, p);
        for (std::size_t i = 0; i < 4; ++i) counts[i] += s[i];
    }
    const Tensor a = state.asr();
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a[i] >= 0.0);
        CHECK(a[i] <= 1.0);
        CHECK(a[i] == doctest::Approx(counts[i] / 200.0).epsilon(1e-12));
    }
}

TEST_CASE("properties over randomized neurons") {
    Rng rng(1234);
    for (int trial = 0; trial < 250; ++trial) {
        const double v_th = rng.uniform(0.25, 5.0);
        const double gamma = trial % 2 == 0 ? 1.0 : rng.uniform(0.8, 1.0);
        const LifParams p{v_th, gamma};
        const std::size_t n = 1 + rng.below(4);
        NeuronState state(std::vector<std::size_t>{n});
        const std::size_t steps = 5 + rng.below(60);

        double total_input = 0.0;
        std::size_t total_spikes = 0;
        std::vector<std::vector<std::uint8_t>> raster;
        for (std::size_t t = 0; t < steps; ++t) {
            const Tensor current =
                eqspike::testing::random_tensor(rng, {n}, gamma == 1.0 ? 0.0 : -0.5, 1.5 * v_th);
            for (double v : current.data()) total_input += v;
            const SpikeTensor s = step_tracked(state, current, p);
            total_spikes += s.count();
            raster.emplace_back(s.bits().begin(), s.bits().end());
        }

        // Binarity is structural; ASR bounded.
        const Tensor a = state.asr();
        for (double v : a.data()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }

        // IF conservation: v_th * spikes + residual potential = total input.
        if (gamma == 1.0) {
            const double residual = state.u().sum();
            CHECK(std::abs(v_th * static_cast<double>(total_spikes) + residual - total_input) < 1e-9);
        }

        // Incremental ASR equals the direct weighted-average definition.
        for (std::size_t i = 0; i < n; ++i) {
            double num = 0.0, den = 0.0;
            for (std::size_t tau = 1; tau <= steps; ++tau) {
                const double w = std::pow(gamma, static_cast<double>(steps - tau));
                num += w * raster[tau - 1][i];
                den += w;
            }
            CHECK(std::abs(a[i] - num / den) < 1e-10);
        }
    }
}

TEST_CASE("asr recursion equivalence holds out to a thousand steps") {
    Rng rng(77);
    const LifParams p{1.0, 0.97};
    NeuronState state({1});
    double num = 0.0, den = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const std::uint8_t bit = rng.uniform() < 0.3 ? 1 : 0;
        lif_step(state, Tensor::row({0.0}), p);
        asr_update(state, SpikeTensor::from_bits({1}, {bit}), p);
        num = p.gamma * num + bit;
        den = p.gamma * den + 1.0;
    }
    CHECK(std::abs(state.asr()[0] - num / den) < 1e-10);
}
