#pragma once

#include "eqspike/tensor.hpp"

namespace eqspike {

// Discrete-time LIF parameters. gamma = 1 gives the IF special case.
// Resting potential is 0 and the input resistance is folded into the synaptic
// weights; the continuous-time membrane equation never enters the discrete
// dynamics.
struct LifParams {
    double v_th = 1.0;
    double gamma = 1.0;

    void validate() const {
        if (v_th <= 0.0) throw ConfigError("v_th must be positive");
        if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("gamma must be in (0, 1]");
    }
};

// One LIF layer's state: membrane potentials, last spikes, and the
// leak-weighted ASR accumulators
//   asr_num[t] = sum_{tau<=t} gamma^{t-tau} s[tau],
//   asr_den[t] = sum_{tau<=t} gamma^{t-tau},
// so asr() = asr_num / asr_den. Single owner; steps are sequential in time.
class NeuronState {
public:
    NeuronState() = default;
    explicit NeuronState(std::vector<std::size_t> shape)
        : u_(Tensor::zeros(shape)),
          last_spikes_(SpikeTensor::zeros(shape)),
          asr_num_(Tensor::zeros(shape)),
          asr_den_(0.0),
          t_(0) {}

    const Tensor& u() const { return u_; }
    const SpikeTensor& last_spikes() const { return last_spikes_; }
    const Tensor& asr_num() const { return asr_num_; }
    double asr_den() const { return asr_den_; }
    std::size_t t() const { return t_; }
    std::size_t size() const { return u_.size(); }
    const std::vector<std::size_t>& shape() const { return u_.shape(); }

    // ASR is undefined before the first step.
    Tensor asr() const;

    friend SpikeTensor lif_step(NeuronState& state, const Tensor& input_current, const LifParams& params);
    friend void asr_update(NeuronState& state, const SpikeTensor& spike, const LifParams& params);

private:
    Tensor u_;
    SpikeTensor last_spikes_;
    Tensor asr_num_;
    double asr_den_ = 0.0;
    std::size_t t_ = 0;
};

// One membrane update:
//   u <- gamma u + input;  spike where u > v_th (strict);  u <- u - v_th spike.
// Bias is the caller's responsibility, folded into input_current. A neuron
// emits at most one spike per step regardless of how far u exceeds v_th.
SpikeTensor lif_step(NeuronState& state, const Tensor& input_current, const LifParams& params);

// Advances the ASR accumulators with this step's spikes:
//   asr_num <- gamma asr_num + spike;  asr_den <- gamma asr_den + 1.
void asr_update(NeuronState& state, const SpikeTensor& spike, const LifParams& params);

}  // namespace eqspike
