#include "eqspike/tape.hpp"

#include <algorithm>
#include <cmath>

namespace eqspike {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ShapeError(msg);
}

// Row count when the last dimension is treated as the feature axis.
std::size_t row_count(const Tensor& t) {
    return t.rank() < 2 ? 1 : t.size() / t.shape().back();
}

}  // namespace

int Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

const Tape::Node& Tape::node(Value v) const {
    if (!v.valid() || v.id >= static_cast<int>(nodes_.size()))
        throw ContractError("value does not belong to this tape");
    return nodes_[static_cast<std::size_t>(v.id)];
}

const Tensor& Tape::value(Value v) const { return node(v).value; }

Value Tape::leaf(Tensor value, std::string name) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    n.requires_grad = true;
    n.name = std::move(name);
    return {push(std::move(n))};
}

Value Tape::constant(Tensor value) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    n.requires_grad = false;
    return {push(std::move(n))};
}

Value Tape::add(Value a, Value b) {
    Node n;
    n.op = Op::Add;
    n.a = a.id;
    n.b = b.id;
    n.value = ops::add(node(a).value, node(b).value);
    n.requires_grad = node(a).requires_grad || node(b).requires_grad;
    return {push(std::move(n))};
}

Value Tape::add_rowvec(Value a, Value bias) {
    Node n;
    n.op = Op::AddRowVec;
    n.a = a.id;
    n.b = bias.id;
    n.value = ops::add_rowvec(node(a).value, node(bias).value);
    n.requires_grad = node(a).requires_grad || node(bias).requires_grad;
    return {push(std::move(n))};
}

Value Tape::sub(Value a, Value b) {
    Node n;
    n.op = Op::Sub;
    n.a = a.id;
    n.b = b.id;
    n.value = ops::sub(node(a).value, node(b).value);
    n.requires_grad = node(a).requires_grad || node(b).requires_grad;
    return {push(std::move(n))};
}

Value Tape::mul(Value a, Value b) {
    Node n;
    n.op = Op::Mul;
    n.a = a.id;
    n.b = b.id;
    n.value = ops::mul(node(a).value, node(b).value);
    n.requires_grad = node(a).requires_grad || node(b).requires_grad;
    return {push(std::move(n))};
}

Value Tape::scale(Value a, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = a.id;
    n.scalar = c;
    n.value = ops::scale(node(a).value, c);
    n.requires_grad = node(a).requires_grad;
    return {push(std::move(n))};
}

Value Tape::matmul(Value a, Value b) {
    Node n;
    n.op = Op::MatMul;
    n.a = a.id;
    n.b = b.id;
    n.value = ops::matmul(node(a).value, node(b).value);
    n.requires_grad = node(a).requires_grad || node(b).requires_grad;
    return {push(std::move(n))};
}

Value Tape::transpose(Value a) {
    Node n;
    n.op = Op::Transpose;
    n.a = a.id;
    n.value = ops::transpose(node(a).value);
    n.requires_grad = node(a).requires_grad;
    return {push(std::move(n))};
}

Value Tape::softmax_rows(Value x) {
    Node n;
    n.op = Op::SoftmaxRows;
    n.a = x.id;
    n.value = ops::softmax_rows(node(x).value);
    n.requires_grad = node(x).requires_grad;
    return {push(std::move(n))};
}

Value Tape::layer_norm(Value x, Value gain, Value shift) {
    const Tensor& xv = node(x).value;
    const std::size_t cols = xv.shape().back();
    require(node(gain).value.size() == cols && node(shift).value.size() == cols,
            "layer_norm: gain/shift must match last dimension");
    const std::size_t rows = row_count(xv);
    Tensor normed = xv;
    Tensor rstds = Tensor::zeros({rows});
    auto d = normed.data();
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
        rstds[r] = rstd;
        for (std::size_t c = 0; c < cols; ++c) row[c] = (row[c] - mean) * rstd;
    }
    Tensor out = normed;
    auto od = out.data();
    const Tensor& g = node(gain).value;
    const Tensor& s = node(shift).value;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) od[r * cols + c] = od[r * cols + c] * g[c] + s[c];

    Node n;
    n.op = Op::LayerNorm;
    n.a = x.id;
    n.b = gain.id;
    n.c = shift.id;
    n.value = std::move(out);
    n.aux = std::move(normed);
    n.aux2 = std::move(rstds);
    n.requires_grad = node(x).requires_grad || node(gain).requires_grad || node(shift).requires_grad;
    return {push(std::move(n))};
}

Value Tape::gelu(Value x) {
    Node n;
    n.op = Op::Gelu;
    n.a = x.id;
    n.value = ops::gelu(node(x).value);
    n.requires_grad = node(x).requires_grad;
    return {push(std::move(n))};
}

Value Tape::clip01(Value x) {
    Node n;
    n.op = Op::Clip01;
    n.a = x.id;
    n.value = ops::clip01(node(x).value);
    n.requires_grad = node(x).requires_grad;
    return {push(std::move(n))};
}

Value Tape::sum(Value x) {
    Node n;
    n.op = Op::Sum;
    n.a = x.id;
    n.value = Tensor::scalar(node(x).value.sum());
    n.requires_grad = node(x).requires_grad;
    return {push(std::move(n))};
}

Value Tape::mean(Value x) {
    Node n;
    n.op = Op::Mean;
    n.a = x.id;
    n.value = Tensor::scalar(node(x).value.mean());
    n.requires_grad = node(x).requires_grad;
    return {push(std::move(n))};
}

Value Tape::slice_cols(Value a, std::size_t start, std::size_t len) {
    Node n;
    n.op = Op::SliceCols;
    n.a = a.id;
    n.i0 = start;
    n.i1 = len;
    n.value = ops::slice_cols(node(a).value, start, len);
    n.requires_grad = node(a).requires_grad;
    return {push(std::move(n))};
}

Value Tape::concat_cols(const std::vector<Value>& parts) {
    require(!parts.empty(), "concat_cols: no parts");
    Node n;
    n.op = Op::ConcatCols;
    std::vector<Tensor> tensors;
    tensors.reserve(parts.size());
    for (Value p : parts) {
        n.list.push_back(p.id);
        tensors.push_back(node(p).value);
        n.requires_grad = n.requires_grad || node(p).requires_grad;
    }
    n.value = ops::concat_cols(tensors);
    return {push(std::move(n))};
}

Value Tape::select_row(Value a, std::size_t r) {
    Node n;
    n.op = Op::SelectRow;
    n.a = a.id;
    n.i0 = r;
    n.value = ops::select_row(node(a).value, r);
    n.requires_grad = node(a).requires_grad;
    return {push(std::move(n))};
}

Value Tape::embed(Value token_table, Value position_table, const std::vector<int>& token_ids) {
    const Tensor& tok = node(token_table).value;
    const Tensor& pos = node(position_table).value;
    require(tok.rank() == 2 && pos.rank() == 2 && tok.cols() == pos.cols(),
            "embed: tables must share the embedding width");
    if (token_ids.size() > pos.rows()) throw ShapeError("embed: sequence longer than position table");
    const std::size_t d = tok.cols();
    Tensor out = Tensor::zeros({token_ids.size(), d});
    for (std::size_t i = 0; i < token_ids.size(); ++i) {
        const int id = token_ids[i];
        if (id < 0 || static_cast<std::size_t>(id) >= tok.rows())
            throw InputError("token id out of vocabulary: " + std::to_string(id));
        for (std::size_t c = 0; c < d; ++c) out.at(i, c) = tok.at(static_cast<std::size_t>(id), c) + pos.at(i, c);
    }
    Node n;
    n.op = Op::Embed;
    n.a = token_table.id;
    n.b = position_table.id;
    n.list = token_ids;
    n.value = std::move(out);
    n.requires_grad = node(token_table).requires_grad || node(position_table).requires_grad;
    return {push(std::move(n))};
}

Value Tape::cross_entropy_with_logits(Value logits, Tensor target_probs) {
    const Tensor& x = node(logits).value;
    require(x.same_shape(target_probs), "cross_entropy_with_logits: target shape mismatch");
    const std::size_t cols = x.shape().back();
    const std::size_t rows = row_count(x);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = x.data().data() + r * cols;
        const double mx = *std::max_element(row, row + cols);
        double lse = 0.0;
        for (std::size_t c = 0; c < cols; ++c) lse += std::exp(row[c] - mx);
        lse = mx + std::log(lse);
        double inner = 0.0;
        for (std::size_t c = 0; c < cols; ++c) inner += target_probs[r * cols + c] * row[c];
        total += lse - inner;
    }
    Node n;
    n.op = Op::CrossEntropyWithLogits;
    n.a = logits.id;
    n.value = Tensor::scalar(total / static_cast<double>(rows));
    n.aux = std::move(target_probs);
    n.requires_grad = node(logits).requires_grad;
    return {push(std::move(n))};
}

Value Tape::mse(Value a, Value b) { return mean(mul(sub(a, b), sub(a, b))); }

GradMap Tape::backward(Value loss) const {
    if (node(loss).value.size() != 1) throw ContractError("backward: loss must be scalar");
    return sweep(loss.id, Tensor::scalar(1.0));
}

GradMap Tape::backward_seeded(Value out, const Tensor& seed) const {
    if (!node(out).value.same_shape(seed)) throw ShapeError("backward_seeded: seed shape mismatch");
    return sweep(out.id, seed);
}

GradMap Tape::sweep(int start, Tensor seed) const {
    std::vector<Tensor> adj(nodes_.size());
    adj[static_cast<std::size_t>(start)] = std::move(seed);

    auto accumulate = [&](int id, const Tensor& g) {
        if (id < 0 || !nodes_[static_cast<std::size_t>(id)].requires_grad) return;
        Tensor& slot = adj[static_cast<std::size_t>(id)];
        slot = slot.empty() ? g : ops::add(slot, g);
    };

    for (int i = start; i >= 0; --i) {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        const Tensor& g = adj[static_cast<std::size_t>(i)];
        if (g.empty() || !n.requires_grad || n.op == Op::Leaf) continue;
        switch (n.op) {
            case Op::Add:
                accumulate(n.a, g);
                accumulate(n.b, g);
                break;
            case Op::AddRowVec: {
                accumulate(n.a, g);
                const std::size_t cols = g.cols();
                Tensor bias_g = Tensor::zeros({cols});
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < cols; ++c) bias_g[c] += g.at(r, c);
                accumulate(n.b, bias_g);
                break;
            }
            case Op::Sub:
                accumulate(n.a, g);
                accumulate(n.b, ops::scale(g, -1.0));
                break;
            case Op::Mul:
                accumulate(n.a, ops::mul(g, nodes_[static_cast<std::size_t>(n.b)].value));
                accumulate(n.b, ops::mul(g, nodes_[static_cast<std::size_t>(n.a)].value));
                break;
            case Op::Scale:
                accumulate(n.a, ops::scale(g, n.scalar));
                break;
            case Op::MatMul: {
                const Tensor& a = nodes_[static_cast<std::size_t>(n.a)].value;
                const Tensor& b = nodes_[static_cast<std::size_t>(n.b)].value;
                accumulate(n.a, ops::matmul(g, ops::transpose(b)));
                accumulate(n.b, ops::matmul(ops::transpose(a), g));
                break;
            }
            case Op::Transpose:
                accumulate(n.a, ops::transpose(g));
                break;
            case Op::SoftmaxRows: {
                const Tensor& y = n.value;
                const std::size_t cols = y.shape().back();
                const std::size_t rows = y.size() / cols;
                Tensor dx = g;
                for (std::size_t r = 0; r < rows; ++r) {
                    double inner = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) inner += g[r * cols + c] * y[r * cols + c];
                    for (std::size_t c = 0; c < cols; ++c)
                        dx[r * cols + c] = (g[r * cols + c] - inner) * y[r * cols + c];
                }
                accumulate(n.a, dx);
                break;
            }
            case Op::LayerNorm: {
                const Tensor& gain = nodes_[static_cast<std::size_t>(n.b)].value;
                const Tensor& normed = n.aux;
                const Tensor& rstds = n.aux2;
                const std::size_t cols = normed.shape().back();
                const std::size_t rows = normed.size() / cols;
                Tensor dx = Tensor::zeros(normed.shape());
                Tensor dgain = Tensor::zeros({cols});
                Tensor dshift = Tensor::zeros({cols});
                for (std::size_t r = 0; r < rows; ++r) {
                    double mean_dy = 0.0, mean_dyxn = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) {
                        const double dy = g[r * cols + c] * gain[c];
                        mean_dy += dy;
                        mean_dyxn += dy * normed[r * cols + c];
                    }
                    mean_dy /= static_cast<double>(cols);
                    mean_dyxn /= static_cast<double>(cols);
                    for (std::size_t c = 0; c < cols; ++c) {
                        const double dy = g[r * cols + c] * gain[c];
                        dx[r * cols + c] = (dy - mean_dy - normed[r * cols + c] * mean_dyxn) * rstds[r];
                        dgain[c] += g[r * cols + c] * normed[r * cols + c];
                        dshift[c] += g[r * cols + c];
                    }
                }
                accumulate(n.a, dx);
                accumulate(n.b, dgain);
                accumulate(n.c, dshift);
                break;
            }
            case Op::Gelu: {
                const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
                Tensor dx = g;
                for (std::size_t k = 0; k < x.size(); ++k) {
                    const double v = x[k];
                    const double cdf = 0.5 * (1.0 + std::erf(v / std::sqrt(2.0)));
                    const double pdf = std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
                    dx[k] = g[k] * (cdf + v * pdf);
                }
                accumulate(n.a, dx);
                break;
            }
            case Op::Clip01: {
                // Subgradient 0 at the exact boundaries and outside [0,1].
                const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
                Tensor dx = g;
                for (std::size_t k = 0; k < x.size(); ++k)
                    dx[k] = (x[k] > 0.0 && x[k] < 1.0) ? g[k] : 0.0;
                accumulate(n.a, dx);
                break;
            }
            case Op::Sum:
                accumulate(n.a, Tensor::full(nodes_[static_cast<std::size_t>(n.a)].value.shape(), g[0]));
                break;
            case Op::Mean: {
                const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
                accumulate(n.a, Tensor::full(x.shape(), g[0] / static_cast<double>(x.size())));
                break;
            }
            case Op::SliceCols: {
                const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
                Tensor dx = Tensor::zeros(x.shape());
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < g.cols(); ++c) dx.at(r, n.i0 + c) = g.at(r, c);
                accumulate(n.a, dx);
                break;
            }
            case Op::ConcatCols: {
                std::size_t off = 0;
                for (int part : n.list) {
                    const Tensor& p = nodes_[static_cast<std::size_t>(part)].value;
                    accumulate(part, ops::slice_cols(g, off, p.cols()));
                    off += p.cols();
                }
                break;
            }
            case Op::SelectRow: {
                const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
                Tensor dx = Tensor::zeros(x.shape());
                for (std::size_t c = 0; c < x.cols(); ++c) dx.at(n.i0, c) = g[c];
                accumulate(n.a, dx);
                break;
            }
            case Op::Embed: {
                const Tensor& tok = nodes_[static_cast<std::size_t>(n.a)].value;
                const Tensor& pos = nodes_[static_cast<std::size_t>(n.b)].value;
                Tensor dtok = Tensor::zeros(tok.shape());
                Tensor dpos = Tensor::zeros(pos.shape());
                const std::size_t d = tok.cols();
                for (std::size_t i = 0; i < n.list.size(); ++i) {
                    const auto id = static_cast<std::size_t>(n.list[i]);
                    for (std::size_t c = 0; c < d; ++c) {
                        dtok.at(id, c) += g.at(i, c);
                        dpos.at(i, c) += g.at(i, c);
                    }
                }
                accumulate(n.a, dtok);
                accumulate(n.b, dpos);
                break;
            }
            case Op::CrossEntropyWithLogits: {
                const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
                const std::size_t cols = x.shape().back();
                const std::size_t rows = x.size() / cols;
                Tensor sm = ops::softmax_rows(x);
                Tensor dx = Tensor::zeros(x.shape());
                const double c0 = g[0] / static_cast<double>(rows);
                for (std::size_t k = 0; k < x.size(); ++k) dx[k] = c0 * (sm[k] - n.aux[k]);
                accumulate(n.a, dx);
                break;
            }
            case Op::Leaf:
                break;
        }
    }

    GradMap grads;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.op != Op::Leaf || n.name.empty()) continue;
        grads[n.name] = adj[i].empty() ? Tensor::zeros(n.value.shape()) : adj[i];
    }
    return grads;
}

}  // namespace eqspike
