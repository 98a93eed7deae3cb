#pragma once

// Seeded random states and unitaries for property tests and sweeps.

#include "magic/core.hpp"

#include <random>

namespace magic {

/// Haar-random unitary via QR of a complex Ginibre matrix.
Unitary random_unitary(int num_qubits, std::mt19937_64& rng);
Ket random_ket(int num_qubits, std::mt19937_64& rng);
/// Full-rank Ginibre ensemble G G^dagger / tr.
DensityMatrix random_density_matrix(int num_qubits, std::mt19937_64& rng);
/// Uniform over the 4^n unsigned words with a random +-1 sign.
PauliString random_hermitian_pauli(int num_qubits, std::mt19937_64& rng);

}  // namespace magic
