#include "xpinnlab/activation.hpp"

#include "xpinnlab/errors.hpp"

#include <cmath>

namespace xpinnlab {

ActivationKind activation_from_name(const std::string& name) {
    if (name == "sine" || name == "sin") return ActivationKind::Sine;
    if (name == "tanh") return ActivationKind::Tanh;
    throw InvalidInput("unknown activation: " + name);
}

const char* activation_name(ActivationKind k) {
    return k == ActivationKind::Sine ? "sine" : "tanh";
}

double activation_eval(ActivationKind kind, int k, double z) {
    if (k < 0 || k > 4) throw UnsupportedError("activation derivative order out of range [0,4]");
    if (kind == ActivationKind::Sine) {
        switch (k & 3) { // d^k sin = sin shifted by k·π/2
            case 0: return std::sin(z);
            case 1: return std::cos(z);
            case 2: return -std::sin(z);
            default: return -std::cos(z);
        }
    }
    const double t = std::tanh(z);
    const double s = 1.0 - t * t; // sech²
    switch (k) {
        case 0: return t;
        case 1: return s;
        case 2: return -2.0 * t * s;
        case 3: return s * (6.0 * t * t - 2.0);
        default: return 8.0 * t * s * (2.0 - 3.0 * t * t);
    }
}

} // namespace xpinnlab
