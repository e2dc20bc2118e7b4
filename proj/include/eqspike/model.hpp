#pragma once

#include <functional>
#include <optional>
#include <string>

#include "eqspike/attention.hpp"

namespace eqspike {

enum class TaskHeadKind { Classification, Regression };

struct TaskHead {
    TaskHeadKind kind = TaskHeadKind::Classification;
    std::size_t classes = 2;  // 1 for regression

    std::size_t width() const { return kind == TaskHeadKind::Regression ? 1 : classes; }
};

// Architecture hyperparameters. The reference shape from the full-scale
// setting is n_encoders=4, d_emb=768, d_intermediate=3072, seq_len=128;
// desk-scale runs are free to pick anything consistent.
struct ModelConfig {
    std::size_t n_encoders = 2;
    std::size_t seq_len = 8;
    std::size_t d_emb = 16;
    std::size_t d_intermediate = 32;
    std::size_t n_heads = 2;
    std::size_t vocab_size = 16;
    LifParams lif;
    bool feedback_enabled = false;
    bool norm_enabled = true;
    PiMode pi_mode = PiMode::Softmax;
    TaskHead head;

    void validate() const;
};

struct EncoderParams {
    AttentionWeights attention;
    Tensor w_il1, b_il1, il1_gain, il1_shift;
    Tensor w_il2, b_il2;
    Tensor w_out, b_out, out_gain, out_shift;
};

// All learnable weights of the spiking model. `visit` enumerates every tensor
// in a fixed order; initialization, checkpoints, gradients, and the optimizer
// all key off those names.
struct ModelParams {
    ModelConfig config;
    Tensor token_embedding;     // (vocab_size, d_emb)
    Tensor position_embedding;  // (seq_len, d_emb)
    Tensor input_bias;          // (d_emb), bias of the input LIF layer
    std::vector<EncoderParams> encoders;
    Tensor feedback;  // (d_emb, d_emb); empty unless feedback_enabled
    Tensor head_w;    // (d_emb, head width)
    Tensor head_b;    // (head width)

    static ModelParams init(const ModelConfig& config, Rng& rng);

    void visit(const std::function<void(const std::string&, Tensor&)>& fn);
    void visit(const std::function<void(const std::string&, const Tensor&)>& fn) const;
    Tensor* find(const std::string& name);
};

// Sub-layers of one spiking encoder plus the input layer, in simulation
// order. This ordering is shared by the equilibrium record, the surrogate
// net, the energy model, and every CSV writer.
std::vector<std::string> canonical_layer_names(const ModelConfig& config);
// Feature width of each canonical layer (neuron count = width * seq_len).
std::vector<std::size_t> canonical_layer_widths(const ModelConfig& config);

struct EncoderState {
    NeuronState key, value, attn, il1, il2, out;
};

// Single-owner simulation state for one example.
struct ModelState {
    explicit ModelState(const ModelConfig& config);

    NeuronState embedding;
    std::vector<EncoderState> encoders;
    SpikeTensor last_final_spikes;  // s of the final encoder's output layer
    OpCounters counters;
    std::vector<double> spike_totals;  // per canonical layer, summed over steps
    std::size_t t = 0;

    // Canonical-order access to the per-layer neuron states.
    std::vector<const NeuronState*> layers() const;
    std::vector<NeuronState*> layers();
};

// Token + position embedding, constant across time steps; the input LIF layer
// consumes it every step.
Tensor embed(const std::vector<int>& tokens, const ModelParams& params);

// One time step through one encoder; returns the output-layer spikes and this
// step's attention scores.
SpikeTensor encoder_step(EncoderState& state, const EncoderParams& params, const SpikeTensor& input_spikes,
                         const LifParams& lif, bool norm_enabled, OpCounters* counters,
                         AttentionScore* score_out = nullptr);

// One full time step: input LIF (with optional feedback of the previous
// step's final spikes) then every encoder in order. Updates all ASR
// accumulators and spike counters; per-encoder scores are written to
// *scores_out when given.
void model_step(ModelState& state, const ModelParams& params, const Tensor& embedded_input,
                std::vector<AttentionScore>* scores_out = nullptr);

// Checkpoint JSON: format version, config, named parameter tensors. Values
// round-trip bit-exactly; writes are atomic (temp file + rename).
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace eqspike
