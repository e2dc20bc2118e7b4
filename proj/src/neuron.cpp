#include "eqspike/neuron.hpp"

namespace eqspike {

Tensor NeuronState::asr() const {
    if (t_ == 0) throw ContractError("asr undefined before the first step");
    Tensor out = asr_num_;
    const double inv = 1.0 / asr_den_;
    for (double& v : out.data()) v *= inv;
    return out;
}

SpikeTensor lif_step(NeuronState& state, const Tensor& input_current, const LifParams& params) {
    params.validate();
    if (!input_current.same_shape(state.u_)) throw ShapeError("lif_step: input shape mismatch");

    auto u = state.u_.data();
    auto in = input_current.data();
    std::vector<std::uint8_t> bits(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        double v = params.gamma * u[i] + in[i];
        if (v > params.v_th) {
            bits[i] = 1;
            v -= params.v_th;
        }
        u[i] = v;
    }
    state.last_spikes_ = SpikeTensor::from_bits(state.u_.shape(), std::move(bits));
    state.t_ += 1;
    return state.last_spikes_;
}

void asr_update(NeuronState& state, const SpikeTensor& spike, const LifParams& params) {
    if (spike.size() != state.asr_num_.size()) throw ShapeError("asr_update: spike shape mismatch");
    auto num = state.asr_num_.data();
    auto bits = spike.bits();
    for (std::size_t i = 0; i < num.size(); ++i) num[i] = params.gamma * num[i] + bits[i];
    state.asr_den_ = params.gamma * state.asr_den_ + 1.0;
}

}  // namespace eqspike
