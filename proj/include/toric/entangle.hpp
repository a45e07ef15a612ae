#pragma once

#include "toric/evolve.hpp"
#include "toric/stabilizer.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace toric {

// Schmidt factor of |psi> for the cut A | complement: M(a, b) = amplitude at
// the basis index whose A-bits spell a and complement-bits spell b, so that
// rho_A = M M^dagger without ever forming the full density matrix.
Eigen::MatrixXcd reduced_factor(const cvec& psi, const Lattice& lat, const Region& A);

// Dense reduced density matrix; refuses more than 12 region edges.
Eigen::MatrixXcd reduced_density(const cvec& psi, const Lattice& lat, const Region& A);

// Von Neumann entropy in bits of a Hermitian PSD unit-trace matrix.
// Eigenvalues below 1e-12 are dropped; anything below -1e-8 aborts.
double matrix_entropy_bits(const Eigen::MatrixXcd& rho);

// Entropy of a region, computed on the smaller Schmidt side.
double region_entropy_bits(const cvec& psi, const Lattice& lat, const Region& A);

// Levin-Wen style combination over the four annulus segments:
//   S_ABC + S_ACD - S_AC - S_ABCD
// (a union covering every edge contributes zero, the state being pure).
double topological_entropy(const cvec& psi, const Lattice& lat,
                           const std::array<Region, 4>& regs);

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
double uhlmann_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);
// Same quantity from Schmidt factors: the nuclear norm of
// sqrt(Lx) Wx^dag (Qx^dag Qy) Wy sqrt(Ly) after thin-QR + small eigh.
double uhlmann_from_factors(const Eigen::MatrixXcd& Mx, const Eigen::MatrixXcd& My);

// Region admits identical reduced states for the two sectors: the loop string
// separating them can be deformed (by star products) off the region.  This is
// the exact precondition for F(0) = 1.
bool pair_indistinguishable(const Lattice& lat, const FlipGroup& grp, const Region& A,
                            SectorLabel a, SectorLabel b);
// Stronger: every sector pair is indistinguishable on the region.
bool sector_deformable(const Lattice& lat, const FlipGroup& grp, const Region& A);

// Built-in fidelity regions: hand-picked bulk-heavy sets on the three small
// lattices, the complement of the two winding loops elsewhere.
Region default_fidelity_region(const Lattice& lat);

// F(t) between the two evolved sector states reduced to the region.
// Throws ConfigError when the region fails the pair criterion.
std::vector<double> sector_fidelity_series(const Hamiltonian& H, const Lattice& lat,
                                           const FlipGroup& grp, const Region& A,
                                           SectorLabel sa, SectorLabel sb,
                                           const std::vector<double>& times,
                                           KrylovOptions opts = {});

} // namespace toric
