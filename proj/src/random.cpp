#include "magic/random.hpp"

namespace magic {

namespace {

CMatrix ginibre(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const double re = g(rng);
      const double im = g(rng);
      m(r, c) = cplx(re, im);
    }
  }
  return m;
}

}  // namespace

Unitary random_unitary(int num_qubits, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(dim_for(num_qubits));
  const CMatrix z = ginibre(d, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix column phases so the distribution is Haar
  for (Eigen::Index i = 0; i < d; ++i) {
    const cplx diag = r(i, i);
    if (std::abs(diag) > 0.0) q.col(i) *= diag / std::abs(diag);
  }
  return Unitary(num_qubits, std::move(q));
}

Ket random_ket(int num_qubits, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(dim_for(num_qubits));
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v(i) = cplx(re, im);
  }
  return Ket::normalized(num_qubits, std::move(v));
}

DensityMatrix random_density_matrix(int num_qubits, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(dim_for(num_qubits));
  const CMatrix g = ginibre(d, rng);
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = (m + m.adjoint()) / 2.0;
  return DensityMatrix(num_qubits, std::move(m));
}

PauliString random_hermitian_pauli(int num_qubits, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> idx(0, dim_for(num_qubits) * dim_for(num_qubits) - 1);
  std::bernoulli_distribution sign(0.5);
  const std::size_t i = idx(rng);
  const bool neg = sign(rng);
  return PauliString::from_index(num_qubits, i).with_phase(neg ? 2 : 0);
}

}  // namespace magic
