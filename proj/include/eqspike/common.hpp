#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eqspike {

// Error taxonomy. Shape/contract violations are programming errors on the
// caller's side; the remaining kinds surface to the CLI as structured errors.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic PRNG used everywhere randomness is needed (init, data
// generation, shuffling). mt19937_64 plus hand-rolled transforms so streams
// are identical across standard libraries; std::*_distribution is
// implementation-defined and would break cross-toolchain reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}

    // Derive an independent stream, e.g. one per purpose or per epoch.
    Rng fork(std::uint64_t salt) const {
        return Rng(state_ ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    }

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dULL;
    }

    // Uniform in [0, 1) with 53 bits of entropy.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one value per call, the pair's second half is discarded to
    // keep the stream position independent of call parity.
    double normal(double mean = 0.0, double stddev = 1.0);

    // Normal resampled until within two standard deviations (BERT-style init).
    double truncated_normal(double mean, double stddev);

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return (x ^ (x >> 31)) | 1ULL;
    }

    std::uint64_t state_;
};

// Shortest round-trip decimal form of a double; used by every CSV/JSON writer
// so repeated runs are byte-identical.
std::string format_double(double v);

}  // namespace eqspike
