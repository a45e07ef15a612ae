#pragma once

#include "toric/lattice.hpp"
#include "toric/stabilizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toric {

// One product of Pauli operators: X on the xmask bits applied after Z on the
// zmask bits.  Even xmask/zmask overlap is required so no Y phases appear and
// the matrix stays real-symmetric in the Z basis.
struct PauliString {
    uint32_t xmask = 0;
    uint32_t zmask = 0;
    double coeff = 0.0;
};

// Parameters of the named quench Hamiltonians:
//   H0  stars + plaquettes            H1  single-site fields (basis Z or X)
//   H2  nearest-pair couplings        H3  Z fields + XX pairs
//   H4  H0 + Z fields                 H5  H0 + Z fields + XX pairs
// disorder_seed, when set, scales each term by an independent U[0.5,1.5) draw
// in term order (H1/H2 only at the config level; the builder honors it always).
struct QuenchSpec {
    std::string name = "H3";
    char basis = 'Z';
    double h = 1.0;  // field strength for H1 and H4
    double J = 1.0;  // pair strength for H2
    double J1 = 0.33; // field strength for H3 and H5
    double J2 = 1.0;  // pair strength for H3 and H5
    std::optional<uint64_t> disorder_seed;
};

class Hamiltonian {
public:
    Hamiltonian(int num_spins, std::vector<PauliString> terms);

    int num_spins() const { return N_; }
    size_t dim() const { return size_t{1} << N_; }
    const std::vector<PauliString>& terms() const { return terms_; }

    bool z_diagonal() const { return zdiag_; }
    bool x_diagonal() const { return xdiag_; }

    void apply(const cvec& in, cvec& out) const; // out = H in
    cvec apply(const cvec& in) const;
    double expectation(const cvec& psi) const; // requires |psi| = 1 within 1e-9

    // Eigenvalue on the product state labelled by bits: Z-basis bitstring for
    // a z-diagonal H, X-basis (Hadamard-rotated) bitstring for an x-diagonal H.
    double diagonal_energy(uint32_t bits) const;

private:
    int N_;
    std::vector<PauliString> terms_;
    bool zdiag_, xdiag_;
};

cvec pauli_apply(const PauliString& P, const cvec& psi);

Hamiltonian build_hamiltonian(const Lattice& lat, const QuenchSpec& spec);

} // namespace toric
