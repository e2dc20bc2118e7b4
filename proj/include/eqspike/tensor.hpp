#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eqspike/common.hpp"

namespace eqspike {

// Dense row-major tensor of 64-bit reals. Value semantics, immutable once
// built through the factory functions; the mutating accessors exist for
// construction sites and single-owner state (membrane potentials, optimizer
// moments). Rank 1 and 2 cover the whole model; higher ranks are not needed.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor full(std::vector<std::size_t> shape, double value);
    // Validates element count and finiteness (NaN/Inf rejected).
    static Tensor from(std::vector<std::size_t> shape, std::vector<double> data);
    static Tensor scalar(double value) { return from({1}, {value}); }
    static Tensor row(std::vector<double> data);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    // 2-D accessors; rank checked once at the call sites that need it.
    std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    std::size_t cols() const { return shape_.size() < 2 ? (shape_.empty() ? 0 : shape_[0]) : shape_[1]; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }

    std::span<const double> data() const& { return data_; }
    std::span<double> data() & { return data_; }
    // Spans into temporaries dangle; bind the tensor first.
    std::span<const double> data() const&& = delete;
    std::span<double> data() && = delete;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    double sum() const;
    double mean() const;
    double frobenius_norm() const;
    double max_abs() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Binary activations for one time step. uint8 storage makes the {0,1}
// invariant structural; `from_mask` is the only way spikes are minted.
class SpikeTensor {
public:
    SpikeTensor() = default;
    static SpikeTensor zeros(std::vector<std::size_t> shape);
    static SpikeTensor from_bits(std::vector<std::size_t> shape, std::vector<std::uint8_t> bits);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return bits_.size(); }
    std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    std::size_t cols() const { return shape_.size() < 2 ? (shape_.empty() ? 0 : shape_[0]) : shape_[1]; }

    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::span<const std::uint8_t> bits() const { return bits_; }

    std::size_t count() const;
    Tensor to_tensor() const;
    bool same_shape(const SpikeTensor& other) const { return shape_ == other.shape_; }

private:
    std::vector<std::size_t> shape_;
    std::vector<std::uint8_t> bits_;
};

// Per-simulation operation tallies. Dense kernels count one multiply and one
// accumulate per MAC position; spike-operand kernels count accumulates only,
// which is what the energy argument rests on.
struct OpCounters {
    std::uint64_t mul_ops = 0;
    std::uint64_t acc_ops = 0;
    // Multiplications attributable to a spike-typed operand; must stay 0.
    std::uint64_t spike_operand_mul_ops = 0;
};

namespace ops {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
// Adds a rank-1 bias to every row of a rank-2 tensor.
Tensor add_rowvec(const Tensor& a, const Tensor& bias);

Tensor matmul(const Tensor& a, const Tensor& b, OpCounters* counters = nullptr);
Tensor transpose(const Tensor& a);

// Accumulate-only products with a binary operand. Each asserts operand
// binarity and performs no multiplications attributable to it.
Tensor matmul_spikes_lhs(const SpikeTensor& s, const Tensor& w, OpCounters* counters = nullptr);
// a (R,K) real times transpose of s (N,K) binary -> (R,N).
Tensor matmul_spikes_rhs_t(const Tensor& a, const SpikeTensor& s, OpCounters* counters = nullptr);
// w (R,N) real times s (N,C) binary -> (R,C).
Tensor matmul_spikes_rhs(const Tensor& w, const SpikeTensor& s, OpCounters* counters = nullptr);

Tensor softmax_rows(const Tensor& x);
// Row-wise standardization (population variance + 1e-12) then affine.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift);
Tensor gelu(const Tensor& x);
Tensor clip01(const Tensor& x);

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor select_row(const Tensor& a, std::size_t r);

double dot(const Tensor& a, const Tensor& b);

}  // namespace ops

}  // namespace eqspike
