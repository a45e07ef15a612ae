#include "toric/stabilizer.hpp"
#include "toric/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>

namespace toric {

FlipGroup enumerate_group(const Lattice& lat) {
    int m = lat.rows(), n = lat.cols();
    FlipGroup grp;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) {
            if (r == m - 1 && c == n - 1) continue; // dependent: product of all stars = 1
            auto se = lat.star_edges(r, c);
            grp.generators.push_back(lat.region_mask(Region(se.begin(), se.end())));
        }
    grp.masks.assign(1, 0u);
    for (uint32_t g : grp.generators) {
        size_t sz = grp.masks.size();
        grp.masks.reserve(2 * sz);
        for (size_t k = 0; k < sz; ++k) grp.masks.push_back(grp.masks[k] ^ g);
    }
    return grp;
}

cvec ground_state(const Lattice& lat, const FlipGroup& grp) {
    return sector_state(lat, grp, {0, 0});
}

cvec sector_state(const Lattice& lat, const FlipGroup& grp, SectorLabel sec) {
    uint32_t shift = 0;
    if (sec.i) shift ^= lat.region_mask(lat.loop_w1());
    if (sec.j) shift ^= lat.region_mask(lat.loop_w2());
    cvec psi(size_t{1} << lat.num_edges(), cplx{0.0, 0.0});
    double amp = 1.0 / std::sqrt(double(grp.masks.size()));
    for (uint32_t g : grp.masks) psi[g ^ shift] = amp;
    return psi;
}

cvec sector_superposition(const Lattice& lat, const FlipGroup& grp,
                          const std::array<cplx, 4>& alpha) {
    double norm2 = 0.0;
    for (const auto& a : alpha) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw ConfigError("sector amplitudes must have unit norm");
    cvec psi(size_t{1} << lat.num_edges(), cplx{0.0, 0.0});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            if (alpha[2 * i + j] == cplx{0.0, 0.0}) continue;
            cvec part = sector_state(lat, grp, {i, j});
            for (size_t k = 0; k < psi.size(); ++k) psi[k] += alpha[2 * i + j] * part[k];
        }
    return psi;
}

double analytic_region_entropy(const Lattice& lat, const FlipGroup& grp, const Region& A) {
    if (A.empty() || int(A.size()) >= lat.num_edges())
        throw ConfigError("region must be a nonempty strict subset of the edges");
    uint32_t am = lat.region_mask(A);
    size_t ga = 0, gb = 0;
    for (uint32_t g : grp.masks) {
        if ((g & ~am) == 0) ++ga; // supported inside A
        if ((g & am) == 0) ++gb;  // avoids A entirely
    }
    return std::log2(double(grp.masks.size()) / (double(ga) * double(gb)));
}

double analytic_overlap(const FlipGroup& grp,
                        const std::function<double(uint32_t)>& energy_fn, double t) {
    double acc = 0.0;
    for (uint32_t g : grp.masks) acc += std::cos(energy_fn(g) * t);
    return std::abs(acc) / double(grp.masks.size());
}

bool deformable_off(const FlipGroup& grp, uint32_t loop_mask, uint32_t region_mask) {
    for (uint32_t g : grp.masks)
        if (((loop_mask ^ g) & region_mask) == 0) return true;
    return false;
}

namespace {

bool region_connected(const Lattice& lat, const Region& A) {
    if (A.empty()) return false;
    std::vector<int> verts;
    for (int e : A) {
        auto [u, v] = lat.edge_vertices(e);
        verts.push_back(u);
        verts.push_back(v);
    }
    std::vector<char> seen(A.size(), 0);
    std::queue<size_t> bfs;
    bfs.push(0);
    seen[0] = 1;
    size_t reached = 1;
    while (!bfs.empty()) {
        size_t i = bfs.front();
        bfs.pop();
        for (size_t j = 0; j < A.size(); ++j) {
            if (seen[j]) continue;
            bool adj = verts[2 * i] == verts[2 * j] || verts[2 * i] == verts[2 * j + 1] ||
                       verts[2 * i + 1] == verts[2 * j] || verts[2 * i + 1] == verts[2 * j + 1];
            if (adj) {
                seen[j] = 1;
                ++reached;
                bfs.push(j);
            }
        }
    }
    return reached == A.size();
}

} // namespace

int interior_star_count(const Lattice& lat, const Region& A) {
    uint32_t am = lat.region_mask(A);
    int count = 0;
    for (int r = 0; r < lat.rows(); ++r)
        for (int c = 0; c < lat.cols(); ++c) {
            auto se = lat.star_edges(r, c);
            uint32_t sm = lat.region_mask(Region(se.begin(), se.end()));
            if ((sm & ~am) == 0) ++count;
        }
    return count;
}

int boundary_star_count(const Lattice& lat, const Region& A) {
    uint32_t am = lat.region_mask(A);
    int count = 0;
    for (int r = 0; r < lat.rows(); ++r)
        for (int c = 0; c < lat.cols(); ++c) {
            auto se = lat.star_edges(r, c);
            uint32_t sm = lat.region_mask(Region(se.begin(), se.end()));
            if ((sm & am) != 0 && (sm & ~am) != 0) ++count;
        }
    return count;
}

bool is_contractible(const Lattice& lat, const FlipGroup& grp, const Region& A) {
    if (A.empty() || int(A.size()) >= lat.num_edges()) return false;
    if (!region_connected(lat, A)) return false;
    uint32_t am = lat.region_mask(A);
    // the enclosed subgroup must come entirely from fully-interior stars;
    // anything extra means the region wraps around a handle or encloses holes
    size_t ga = 0;
    for (uint32_t g : grp.masks)
        if ((g & ~am) == 0) ++ga;
    if (ga != size_t{1} << interior_star_count(lat, A)) return false;
    uint32_t w1 = lat.region_mask(lat.loop_w1());
    uint32_t w2 = lat.region_mask(lat.loop_w2());
    return deformable_off(grp, w1, am) && deformable_off(grp, w2, am);
}

std::vector<Region> contractible_regions(const Lattice& lat, const FlipGroup& grp,
                                         int max_edges) {
    int N = lat.num_edges();
    std::vector<Region> out;
    // enumerate fixed-size subsets with a revolving-door walk over combinations
    for (int k = 1; k <= max_edges && k < N; ++k) {
        std::vector<int> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            Region A(idx.begin(), idx.end());
            if (is_contractible(lat, grp, A)) out.push_back(A);
            int i = k - 1;
            while (i >= 0 && idx[i] == N - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

} // namespace toric
