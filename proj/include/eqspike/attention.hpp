#pragma once

#include "eqspike/neuron.hpp"
#include "eqspike/tape.hpp"

namespace eqspike {

// Row normalization applied to attention scores. Softmax is the default; the
// identity variant is supported because the non-linear normalization is not
// always essential.
enum class PiMode { Softmax, Identity };

// Per-head pre-normalization score matrices, already scaled by 1/sqrt(d_k).
struct AttentionScore {
    std::vector<Tensor> per_head;  // each (N_s, N_s)
};

// Learnable pieces of one spiking attention block. Queries are a plain linear
// map of the input spikes (real-valued, no neuron layer); Keys and Values pass
// through their own LIF layers and stay spiking. Weight columns are split
// evenly across heads, d_k = d_emb / n_heads.
struct AttentionWeights {
    Tensor w_q;     // (d_emb, d_emb)
    Tensor w_k;     // (d_emb, d_emb)
    Tensor w_v;     // (d_emb, d_emb)
    Tensor b_attn;  // (d_emb), bias of the attention output layer
    std::size_t n_heads = 1;
    PiMode pi_mode = PiMode::Softmax;

    std::size_t d_emb() const { return w_q.cols(); }
    std::size_t head_dim() const { return d_emb() / n_heads; }
    double scale() const;
    void validate() const;
};

struct SpikingAttentionResult {
    // (N_s, d_emb) synaptic current for the attention output LIF layer, which
    // the enclosing encoder owns; b_attn is not folded in here.
    Tensor output_current;
    AttentionScore score;
};

// One time step of spiking attention. Steps the Key/Value LIF layers (their
// ASR accumulators included) and computes pi(s Q S_K^T) S_V. Every product
// with a spike operand runs through an accumulate-only kernel.
SpikingAttentionResult spiking_attention_step(const SpikeTensor& input_spikes,
                                              const AttentionWeights& weights,
                                              NeuronState& key_state, NeuronState& value_state,
                                              const LifParams& lif, OpCounters* counters = nullptr);

// Tape handles for the attention weights, bound by the surrogate-net builder.
struct AttentionValueRefs {
    Value w_q, w_k, w_v, b_attn;
};

// Steady-state surrogate of the attention output layer:
//   clip01((pi(s (a_x W_q) a_k^T) a_v + b_attn) / v_th)
// evaluated per head and concatenated. Inputs are ASRs and must lie in [0,1]
// (1e-9 slack). Per-head pre-pi scores are appended to *scores_out when given.
Value surrogate_attention(Tape& tape, Value a_x, Value a_k, Value a_v,
                          const AttentionValueRefs& refs, std::size_t n_heads, PiMode pi_mode,
                          double v_th, std::vector<Value>* scores_out = nullptr);

// Tensor-level wrapper over the same graph, for oracles and agreement checks.
Tensor surrogate_attention_eval(const Tensor& a_x, const Tensor& a_k, const Tensor& a_v,
                                const AttentionWeights& weights, double v_th,
                                AttentionScore* score_out = nullptr);

}  // namespace eqspike
