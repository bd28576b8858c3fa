#pragma once

#include "lpmf/fock/gross.hpp"
#include "lpmf/fock/krylov.hpp"

namespace lpmf {

// Immutable bundle of the truncated model: basis, hop table, H^0, H^F and U_K.
struct FockModel {
  BasisPtr basis;
  HopTable hops;
  SparseOperator H0;
  SparseOperator HF;
  GrossTransform U;

  explicit FockModel(const ModelSpec& spec)
      : basis(build_bases(spec)),
        hops(basis->particles()),
        H0(build_free_hamiltonian(*basis, hops)),
        HF(build_frohlich_hamiltonian(*basis, hops)),
        U(basis) {}

  const ModelSpec& spec() const { return basis->spec(); }
  std::size_t dim() const { return basis->dim(); }
  int particles() const { return basis->spec().n_particles; }

  GrossHamiltonian gross_hamiltonian() const { return GrossHamiltonian(basis, hops); }
};

}  // namespace lpmf
