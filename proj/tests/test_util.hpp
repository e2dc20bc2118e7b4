#pragma once

#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "eqspike/common.hpp"
#include "eqspike/tape.hpp"
#include "eqspike/tensor.hpp"

namespace eqspike::testing {

inline Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape, double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

inline bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Central-difference check of d(loss)/d(leaf) for every named leaf.
// `build` must construct the same graph from the same leaf tensors each call.
struct FdCheck {
    double step = 1e-5;
    double tol = 1e-4;

    void run(const std::vector<std::pair<std::string, Tensor>>& leaves,
             const std::function<Value(Tape&, const std::vector<Value>&)>& build) const {
        Tape tape;
        std::vector<Value> vals;
        vals.reserve(leaves.size());
        for (const auto& [name, tensor] : leaves) vals.push_back(tape.leaf(tensor, name));
        const Value loss = build(tape, vals);
        const GradMap grads = tape.backward(loss);

        for (std::size_t li = 0; li < leaves.size(); ++li) {
            const auto& [name, tensor] = leaves[li];
            const Tensor& analytic = grads.at(name);
            for (std::size_t k = 0; k < tensor.size(); ++k) {
                const double fd = central_difference(leaves, build, li, k);
                INFO("leaf ", name, " coordinate ", k, " analytic ", analytic[k], " fd ", fd);
                CHECK(close(analytic[k], fd, tol));
            }
        }
    }

private:
    double eval(const std::vector<std::pair<std::string, Tensor>>& leaves,
                const std::function<Value(Tape&, const std::vector<Value>&)>& build) const {
        Tape tape;
        std::vector<Value> vals;
        vals.reserve(leaves.size());
        for (const auto& [name, tensor] : leaves) vals.push_back(tape.leaf(tensor, name));
        return tape.value(build(tape, vals))[0];
    }

    double central_difference(std::vector<std::pair<std::string, Tensor>> leaves,
                              const std::function<Value(Tape&, const std::vector<Value>&)>& build,
                              std::size_t leaf_index, std::size_t coord) const {
        const double orig = leaves[leaf_index].second[coord];
        leaves[leaf_index].second[coord] = orig + step;
        const double up = eval(leaves, build);
        leaves[leaf_index].second[coord] = orig - step;
        const double down = eval(leaves, build);
        return (up - down) / (2.0 * step);
    }
};

}  // namespace eqspike::testing
