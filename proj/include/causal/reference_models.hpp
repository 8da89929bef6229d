#pragma once

#include <cstddef>
#include <cstdint>

#include "causal/discrete.hpp"
#include "causal/gaussian.hpp"

namespace causal::reference {

/// Z with P(Z=0)=a, X=Z, Y=X xor Z. Nodes Z, X, Y.
DiscreteModel xor_confounded(double a);

/// X, Z independent fair bits, Y = X xor Z.
DiscreteModel independent_xor();

/// Z fair, X a symmetric noisy copy of Z with flip probability q, Y = X xor Z.
DiscreteModel noisy_copy_xor(double q);

/// E fair; B1..B_{2k+1} copy E; D is their majority.
DiscreteModel repetition_code(std::size_t k);

/// X fair; Y1..Yn copy X.
DiscreteModel broadcast(std::size_t n);

/// X fair, Y = X.
DiscreteModel copy_pair();

/// X fair, Y = not X.
DiscreteModel not_pair();

/// Two-node binary model X->Y with P(X=1)=px and a binary symmetric channel.
DiscreteModel binary_channel(double px, double flip);

/// Binary chain in which X_t copies Y_{t-1} and Y_t copies X_{t-1}, each
/// correctly with probability 1-eps; (X_0, Y_0) uniform.
ChainDefinition perturbed_copy_chain(double eps, std::size_t steps);

/// Complete DAG X1 -> ... -> Xn (every i<j arrow) with standard-normal
/// coefficients and unit noise, drawn from mt19937_64(seed).
LinearSem random_complete_sem(std::size_t n, std::uint64_t seed);

}  // namespace causal::reference
