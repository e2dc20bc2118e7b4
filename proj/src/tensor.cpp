#include "eqspike/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eqspike {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

void require(bool ok, const char* msg) {
    if (!ok) throw ShapeError(msg);
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_.assign(shape_numel(t.shape_), 0.0);
    return t;
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_.assign(shape_numel(t.shape_), value);
    return t;
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> data) {
    require(shape_numel(shape) == data.size(), "tensor data length does not match shape");
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    if (!t.all_finite()) throw ShapeError("tensor rejects non-finite values");
    return t;
}

Tensor Tensor::row(std::vector<double> data) {
    const std::size_t n = data.size();
    return from({n}, std::move(data));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return from({rows, cols}, std::move(data));
}

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Tensor::sum() const {
    return std::accumulate(data_.begin(), data_.end(), 0.0);
}

double Tensor::mean() const {
    return data_.empty() ? 0.0 : sum() / static_cast<double>(data_.size());
}

double Tensor::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Tensor::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

SpikeTensor SpikeTensor::zeros(std::vector<std::size_t> shape) {
    SpikeTensor s;
    s.shape_ = std::move(shape);
    s.bits_.assign(shape_numel(s.shape_), 0);
    return s;
}

SpikeTensor SpikeTensor::from_bits(std::vector<std::size_t> shape, std::vector<std::uint8_t> bits) {
    require(shape_numel(shape) == bits.size(), "spike bits length does not match shape");
    for (std::uint8_t b : bits) {
        if (b > 1) throw ShapeError("spike tensor entries must be 0 or 1");
    }
    SpikeTensor s;
    s.shape_ = std::move(shape);
    s.bits_ = std::move(bits);
    return s;
}

std::size_t SpikeTensor::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Tensor SpikeTensor::to_tensor() const {
    std::vector<double> d(bits_.begin(), bits_.end());
    Tensor t = Tensor::zeros(shape_);
    std::copy(d.begin(), d.end(), t.data().begin());
    return t;
}

namespace ops {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ShapeError(msg);
}

void require_binary(const SpikeTensor& s) {
    for (std::uint8_t b : s.bits()) {
        if (b > 1) throw ContractError("spike operand contains a non-binary entry");
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "add: shape mismatch");
    Tensor out = a;
    auto d = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += bd[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "sub: shape mismatch");
    Tensor out = a;
    auto d = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= bd[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "mul: shape mismatch");
    Tensor out = a;
    auto d = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= bd[i];
    return out;
}

Tensor scale(const Tensor& a, double c) {
    Tensor out = a;
    for (double& v : out.data()) v *= c;
    return out;
}

Tensor add_rowvec(const Tensor& a, const Tensor& bias) {
    require(a.rank() == 2 && bias.rank() == 1 && a.cols() == bias.size(),
            "add_rowvec: bias must match row width");
    Tensor out = a;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) += bias[c];
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b, OpCounters* counters) {
    require(a.rank() == 2 && b.rank() == 2, "matmul: rank-2 operands required");
    require(a.cols() == b.rows(), "matmul: inner dimensions do not match");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out = Tensor::zeros({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a.at(i, p);
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += av * b.at(p, j);
        }
    }
    if (counters) {
        counters->mul_ops += m * k * n;
        counters->acc_ops += m * k * n;
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    require(a.rank() == 2, "transpose: rank-2 operand required");
    Tensor out = Tensor::zeros({a.cols(), a.rows()});
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out.at(c, r) = a.at(r, c);
    return out;
}

Tensor matmul_spikes_lhs(const SpikeTensor& s, const Tensor& w, OpCounters* counters) {
    require_binary(s);
    require(w.rank() == 2 && s.cols() == w.rows(), "spike matmul: inner dimensions do not match");
    const std::size_t m = s.rows(), k = s.cols(), n = w.cols();
    Tensor out = Tensor::zeros({m, n});
    std::uint64_t accs = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            if (!s[i * k + p]) continue;
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += w.at(p, j);
            accs += n;
        }
    }
    if (counters) counters->acc_ops += accs;
    return out;
}

Tensor matmul_spikes_rhs_t(const Tensor& a, const SpikeTensor& s, OpCounters* counters) {
    require_binary(s);
    require(a.rank() == 2 && a.cols() == s.cols(), "spike matmul: inner dimensions do not match");
    const std::size_t m = a.rows(), k = a.cols(), n = s.rows();
    Tensor out = Tensor::zeros({m, n});
    std::uint64_t accs = 0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < k; ++p) {
            if (!s[j * k + p]) continue;
            for (std::size_t i = 0; i < m; ++i) out.at(i, j) += a.at(i, p);
            accs += m;
        }
    }
    if (counters) counters->acc_ops += accs;
    return out;
}

Tensor matmul_spikes_rhs(const Tensor& w, const SpikeTensor& s, OpCounters* counters) {
    require_binary(s);
    require(w.rank() == 2 && w.cols() == s.rows(), "spike matmul: inner dimensions do not match");
    const std::size_t m = w.rows(), k = w.cols(), n = s.cols();
    Tensor out = Tensor::zeros({m, n});
    std::uint64_t accs = 0;
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!s[p * n + j]) continue;
            for (std::size_t i = 0; i < m; ++i) out.at(i, j) += w.at(i, p);
            accs += m;
        }
    }
    if (counters) counters->acc_ops += accs;
    return out;
}

Tensor softmax_rows(const Tensor& x) {
    require(x.rank() >= 1, "softmax_rows: empty tensor");
    const std::size_t cols = x.shape().back();
    const std::size_t rows = x.size() / cols;
    Tensor out = x;
    auto d = out.data();
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = d.data() + r * cols;
        const double mx = *std::max_element(row, row + cols);
        double denom = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            denom += row[c];
        }
        for (std::size_t c = 0; c < cols; ++c) row[c] /= denom;
    }
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift) {
    const std::size_t cols = x.shape().back();
    require(gain.size() == cols && shift.size() == cols, "layer_norm: gain/shift must match last dimension");
    const std::size_t rows = x.size() / cols;
    Tensor out = x;
    auto d = out.data();
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = d.data() + r * cols;
        double mean = 0.0;
        for (std::size_t c = 0; c < cols; ++c) mean += row[c];
        mean /= static_cast<double>(cols);
        double var = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double dv = row[c] - mean;
            var += dv * dv;
        }
        var /= static_cast<double>(cols);
        const double rstd = 1.0 / std::sqrt(var + 1e-12);
        for (std::size_t c = 0; c < cols; ++c) row[c] = (row[c] - mean) * rstd * gain[c] + shift[c];
    }
    return out;
}

Tensor gelu(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data()) v = 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0)));
    return out;
}

Tensor clip01(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
    return out;
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len) {
    require(a.rank() == 2 && start + len <= a.cols(), "slice_cols: out of range");
    Tensor out = Tensor::zeros({a.rows(), len});
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < len; ++c) out.at(r, c) = a.at(r, start + c);
    return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    require(!parts.empty(), "concat_cols: no parts");
    const std::size_t rows = parts.front().rows();
    std::size_t cols = 0;
    for (const Tensor& p : parts) {
        require(p.rank() == 2 && p.rows() == rows, "concat_cols: row mismatch");
        cols += p.cols();
    }
    Tensor out = Tensor::zeros({rows, cols});
    std::size_t off = 0;
    for (const Tensor& p : parts) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < p.cols(); ++c) out.at(r, off + c) = p.at(r, c);
        off += p.cols();
    }
    return out;
}

Tensor select_row(const Tensor& a, std::size_t r) {
    require(a.rank() == 2 && r < a.rows(), "select_row: out of range");
    Tensor out = Tensor::zeros({a.cols()});
    for (std::size_t c = 0; c < a.cols(); ++c) out[c] = a.at(r, c);
    return out;
}

double dot(const Tensor& a, const Tensor& b) {
    require(a.size() == b.size(), "dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace ops

}  // namespace eqspike
