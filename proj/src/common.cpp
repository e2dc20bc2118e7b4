#include "eqspike/common.hpp"

#include <charconv>
#include <cmath>

namespace eqspike {

double Rng::normal(double mean, double stddev) {
    // Box-Muller, rejecting u1 == 0.
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

double Rng::truncated_normal(double mean, double stddev) {
    for (;;) {
        const double v = normal(mean, stddev);
        if (std::abs(v - mean) <= 2.0 * stddev) return v;
    }
}

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace eqspike
