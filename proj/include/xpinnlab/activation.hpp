#pragma once

#include <string>

namespace xpinnlab {

enum class ActivationKind { Sine, Tanh };

ActivationKind activation_from_name(const std::string& name);
const char* activation_name(ActivationKind k);

/// k-th derivative of the activation at z (k = 0 is the value itself).
/// Closed forms up to k = 4; the extra order is what parameter
/// differentiation of third-order input jets consumes.
double activation_eval(ActivationKind kind, int k, double z);

} // namespace xpinnlab
