#pragma once

#include "toric/lattice.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace toric {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

struct SectorLabel {
    int i = 0, j = 0; // powers of the two winding loops
};

// Abelian group generated by the star X-operators.  On an m x n torus the
// product of all stars is the identity, so mn-1 of them are independent and
// |G| = 2^{mn-1}.  Elements are stored as X-flip bitmasks over the edges.
struct FlipGroup {
    std::vector<uint32_t> masks;
    std::vector<uint32_t> generators; // star masks, the one at (m-1,n-1) dropped
};

FlipGroup enumerate_group(const Lattice& lat);

// |psi0> = |G|^{-1/2} sum_g g|0>, the +1 eigenstate of every star and plaquette.
cvec ground_state(const Lattice& lat, const FlipGroup& grp);

// Coset translate w1^i w2^j |psi0>: same amplitudes shifted by the loop masks.
cvec sector_state(const Lattice& lat, const FlipGroup& grp, SectorLabel sec);

// Normalized combination sum alpha[2i+j] |sector ij>.
cvec sector_superposition(const Lattice& lat, const FlipGroup& grp,
                          const std::array<cplx, 4>& alpha);

// Closed-form ground-state entanglement in bits: log2(|G| / (|G_A| |G_B|))
// with G_A the subgroup supported inside A and G_B the subgroup avoiding A.
double analytic_region_entropy(const Lattice& lat, const FlipGroup& grp, const Region& A);

// Closed-form overlap |<psi0|psi(t)>| = |sum_g cos(E(g) t)| / |G| for quenches
// diagonal in the Z basis whose eigenvalue on g|0> is energy_fn(g).
double analytic_overlap(const FlipGroup& grp,
                        const std::function<double(uint32_t)>& energy_fn, double t);

// True when some group translate of the loop avoids every edge of the region.
bool deformable_off(const FlipGroup& grp, uint32_t loop_mask, uint32_t region_mask);

// A region is treated as contractible (disk-like) when it is connected via
// shared vertices, the only group elements living inside it are products of
// its fully-enclosed stars, and both winding loops deform off it.
bool is_contractible(const Lattice& lat, const FlipGroup& grp, const Region& A);

// All contractible regions with 1..max_edges edges, each sorted ascending.
std::vector<Region> contractible_regions(const Lattice& lat, const FlipGroup& grp,
                                         int max_edges);

int interior_star_count(const Lattice& lat, const Region& A); // stars fully inside
int boundary_star_count(const Lattice& lat, const Region& A); // stars straddling the cut

} // namespace toric
