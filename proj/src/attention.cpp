#include "eqspike/attention.hpp"

#include <cmath>

namespace eqspike {

double AttentionWeights::scale() const {
    return 1.0 / std::sqrt(static_cast<double>(head_dim()));
}

void AttentionWeights::validate() const {
    const std::size_t d = d_emb();
    if (n_heads == 0 || d % n_heads != 0)
        throw ConfigError("attention: n_heads must divide the embedding width");
    if (w_q.rows() != d || w_k.rows() != d || w_k.cols() != d || w_v.rows() != d || w_v.cols() != d)
        throw ConfigError("attention: weight matrices must be square over the embedding width");
    if (b_attn.size() != d) throw ConfigError("attention: bias width mismatch");
}

namespace {

void require_state_ready(const NeuronState& state, std::size_t rows, std::size_t cols, const char* which) {
    if (state.size() == 0) throw ContractError(std::string(which) + " neuron state not initialized");
    if (state.shape() != std::vector<std::size_t>{rows, cols})
        throw ContractError(std::string(which) + " neuron state shape mismatch");
}

void require_asr_range(const Tensor& a, const char* which) {
    for (double v : a.data()) {
        if (v < -1e-9 || v > 1.0 + 1e-9)
            throw ContractError(std::string("surrogate_attention: ") + which + " outside [0,1]");
    }
}

}  // namespace

SpikingAttentionResult spiking_attention_step(const SpikeTensor& input_spikes,
                                              const AttentionWeights& weights,
                                              NeuronState& key_state, NeuronState& value_state,
                                              const LifParams& lif, OpCounters* counters) {
    weights.validate();
    const std::size_t n_s = input_spikes.rows();
    const std::size_t d = weights.d_emb();
    if (input_spikes.cols() != d) throw ShapeError("spiking attention: input width mismatch");
    require_state_ready(key_state, n_s, d, "key");
    require_state_ready(value_state, n_s, d, "value");

    // Q is real-valued; K and V spike through their LIF layers.
    const Tensor q = ops::matmul_spikes_lhs(input_spikes, weights.w_q, counters);
    const SpikeTensor s_k = lif_step(key_state, ops::matmul_spikes_lhs(input_spikes, weights.w_k, counters), lif);
    asr_update(key_state, s_k, lif);
    const SpikeTensor s_v = lif_step(value_state, ops::matmul_spikes_lhs(input_spikes, weights.w_v, counters), lif);
    asr_update(value_state, s_v, lif);

    const std::size_t d_k = weights.head_dim();
    const double s = weights.scale();
    AttentionScore score;
    std::vector<Tensor> head_outputs;
    for (std::size_t h = 0; h < weights.n_heads; ++h) {
        const std::size_t off = h * d_k;
        const Tensor q_h = ops::slice_cols(q, off, d_k);
        // Slicing spikes keeps them binary; rebuild the head's spike views.
        std::vector<std::uint8_t> k_bits(n_s * d_k), v_bits(n_s * d_k);
        for (std::size_t r = 0; r < n_s; ++r)
            for (std::size_t c = 0; c < d_k; ++c) {
                k_bits[r * d_k + c] = s_k[r * d + off + c];
                v_bits[r * d_k + c] = s_v[r * d + off + c];
            }
        const SpikeTensor k_h = SpikeTensor::from_bits({n_s, d_k}, std::move(k_bits));
        const SpikeTensor v_h = SpikeTensor::from_bits({n_s, d_k}, std::move(v_bits));

        const Tensor raw = ops::scale(ops::matmul_spikes_rhs_t(q_h, k_h, counters), s);
        const Tensor pi = weights.pi_mode == PiMode::Softmax ? ops::softmax_rows(raw) : raw;
        head_outputs.push_back(ops::matmul_spikes_rhs(pi, v_h, counters));
        score.per_head.push_back(raw);
    }

    return SpikingAttentionResult{ops::concat_cols(head_outputs), std::move(score)};
}

Value surrogate_attention(Tape& tape, Value a_x, Value a_k, Value a_v,
                          const AttentionValueRefs& refs, std::size_t n_heads, PiMode pi_mode,
                          double v_th, std::vector<Value>* scores_out) {
    require_asr_range(tape.value(a_x), "a_x");
    require_asr_range(tape.value(a_k), "a_k");
    require_asr_range(tape.value(a_v), "a_v");

    const std::size_t d = tape.value(a_x).cols();
    if (n_heads == 0 || d % n_heads != 0)
        throw ConfigError("surrogate_attention: n_heads must divide the embedding width");
    const std::size_t d_k = d / n_heads;
    const double s = 1.0 / std::sqrt(static_cast<double>(d_k));

    const Value q = tape.matmul(a_x, refs.w_q);
    std::vector<Value> heads;
    for (std::size_t h = 0; h < n_heads; ++h) {
        const std::size_t off = h * d_k;
        const Value q_h = tape.slice_cols(q, off, d_k);
        const Value k_h = tape.slice_cols(a_k, off, d_k);
        const Value v_h = tape.slice_cols(a_v, off, d_k);
        const Value raw = tape.scale(tape.matmul(q_h, tape.transpose(k_h)), s);
        if (scores_out) scores_out->push_back(raw);
        const Value pi = pi_mode == PiMode::Softmax ? tape.softmax_rows(raw) : raw;
        heads.push_back(tape.matmul(pi, v_h));
    }
    const Value mixed = tape.add_rowvec(tape.concat_cols(heads), refs.b_attn);
    return tape.clip01(tape.scale(mixed, 1.0 / v_th));
}

Tensor surrogate_attention_eval(const Tensor& a_x, const Tensor& a_k, const Tensor& a_v,
                                const AttentionWeights& weights, double v_th,
                                AttentionScore* score_out) {
    weights.validate();
    Tape tape;
    const AttentionValueRefs refs{tape.constant(weights.w_q), tape.constant(weights.w_k),
                                  tape.constant(weights.w_v), tape.constant(weights.b_attn)};
    std::vector<Value> scores;
    const Value out = surrogate_attention(tape, tape.constant(a_x), tape.constant(a_k), tape.constant(a_v),
                                          refs, weights.n_heads, weights.pi_mode, v_th,
                                          score_out ? &scores : nullptr);
    if (score_out) {
        score_out->per_head.clear();
        for (Value v : scores) score_out->per_head.push_back(tape.value(v));
    }
    return tape.value(out);
}

}  // namespace eqspike
