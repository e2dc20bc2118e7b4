#pragma once

#include <map>
#include <string>
#include <vector>

#include "eqspike/tensor.hpp"

namespace eqspike {

// Parameter name -> adjoint. std::map keeps reduction order fixed.
using GradMap = std::map<std::string, Tensor>;

// Handle into a Tape; valid only for the tape that minted it.
struct Value {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Append-only reverse-mode tape. Nodes reference earlier nodes only, so the
// insertion order is a topological order and one reverse sweep computes all
// adjoints deterministically. A tape is single-writer; independent tapes are
// independent.
class Tape {
public:
    Value leaf(Tensor value, std::string name);
    Value constant(Tensor value);

    Value add(Value a, Value b);
    Value add_rowvec(Value a, Value bias);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    Value scale(Value a, double c);
    Value matmul(Value a, Value b);
    Value transpose(Value a);
    Value softmax_rows(Value x);
    Value layer_norm(Value x, Value gain, Value shift);
    Value gelu(Value x);
    Value clip01(Value x);
    Value sum(Value x);
    Value mean(Value x);
    Value slice_cols(Value a, std::size_t start, std::size_t len);
    Value concat_cols(const std::vector<Value>& parts);
    Value select_row(Value a, std::size_t r);
    // Token-table + position-table lookup for a token sequence.
    Value embed(Value token_table, Value position_table, const std::vector<int>& token_ids);
    // Mean over rows of [logsumexp(logits_r) - sum_j target_rj * logits_rj].
    // Numerically safe for saturated logits; target rows must sum to 1.
    Value cross_entropy_with_logits(Value logits, Tensor target_probs);

    // mean((a - b)^2), composed from primitive nodes.
    Value mse(Value a, Value b);

    const Tensor& value(Value v) const;

    // Reverse sweep from a scalar loss; seed 1. Returns an entry for every
    // named leaf on the tape, zero-filled when the loss does not reach it.
    GradMap backward(Value loss) const;
    // Reverse sweep seeded with an arbitrary cotangent at `out`; this is the
    // vector-Jacobian product used by the implicit (fixed-point) gradients.
    GradMap backward_seeded(Value out, const Tensor& seed) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        Leaf,
        Add,
        AddRowVec,
        Sub,
        Mul,
        Scale,
        MatMul,
        Transpose,
        SoftmaxRows,
        LayerNorm,
        Gelu,
        Clip01,
        Sum,
        Mean,
        SliceCols,
        ConcatCols,
        SelectRow,
        Embed,
        CrossEntropyWithLogits,
    };

    struct Node {
        Op op = Op::Leaf;
        int a = -1, b = -1, c = -1;
        std::vector<int> list;  // ConcatCols inputs, Embed token ids
        Tensor value;
        bool requires_grad = false;
        std::string name;   // named leaves only
        double scalar = 0.0;
        std::size_t i0 = 0, i1 = 0;
        Tensor aux;   // LayerNorm normalized rows, CE target probabilities
        Tensor aux2;  // LayerNorm per-row reciprocal stddev
    };

    int push(Node n);
    const Node& node(Value v) const;
    GradMap sweep(int start, Tensor seed) const;

    std::vector<Node> nodes_;
};

}  // namespace eqspike
