#include "toric/lattice.hpp"
#include "toric/errors.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace toric {

namespace {
int mod(int a, int b) { return ((a % b) + b) % b; }
}

Lattice::Lattice(int m, int n) : m_(m), n_(n), N_(2 * m * n) {
    if (m < 2 || n < 2)
        throw ConfigError("lattice must be at least 2x2, got " + std::to_string(m) + "x" +
                          std::to_string(n));
    if (N_ > kMaxSpins)
        throw SizeLimitError("lattice " + std::to_string(m) + "x" + std::to_string(n) + " has " +
                             std::to_string(N_) + " spins, limit is " + std::to_string(kMaxSpins));
}

int Lattice::h_edge(int r, int c) const { return 2 * (mod(r, m_) * n_ + mod(c, n_)); }

int Lattice::v_edge(int r, int c) const { return 2 * (mod(r, m_) * n_ + mod(c, n_)) + 1; }

std::array<int, 4> Lattice::star_edges(int r, int c) const {
    return {h_edge(r, c), h_edge(r, c - 1), v_edge(r, c), v_edge(r - 1, c)};
}

std::array<int, 4> Lattice::plaq_edges(int r, int c) const {
    return {h_edge(r, c), h_edge(r + 1, c), v_edge(r, c), v_edge(r, c + 1)};
}

Region Lattice::loop_w1() const {
    Region out;
    for (int r = 0; r < m_; ++r) out.push_back(h_edge(r, 0));
    std::sort(out.begin(), out.end());
    return out;
}

Region Lattice::loop_w2() const {
    Region out;
    for (int c = 0; c < n_; ++c) out.push_back(v_edge(0, c));
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<int, int> Lattice::edge_vertices(int e) const {
    int cell = e / 2;
    int r = cell / n_, c = cell % n_;
    if (e % 2 == 0) // horizontal: (r,c)-(r,c+1)
        return {r * n_ + c, r * n_ + mod(c + 1, n_)};
    return {r * n_ + c, mod(r + 1, m_) * n_ + c}; // vertical: (r,c)-(r+1,c)
}

std::vector<std::pair<int, int>> Lattice::neighbor_pairs() const {
    // Two edges are neighbors when they share a vertex.  Collect via the
    // per-vertex incidence lists (each vertex touches exactly 4 edges), then
    // dedupe: a pair can share both endpoints on small tori.
    std::vector<std::vector<int>> incident(m_ * n_);
    for (int r = 0; r < m_; ++r)
        for (int c = 0; c < n_; ++c) {
            for (int e : star_edges(r, c)) incident[r * n_ + c].push_back(e);
        }
    std::set<std::pair<int, int>> pairs;
    for (const auto& inc : incident)
        for (size_t i = 0; i < inc.size(); ++i)
            for (size_t j = i + 1; j < inc.size(); ++j) {
                int a = inc[i], b = inc[j];
                if (a == b) continue; // 2-cycles make an edge self-incident twice
                pairs.insert({std::min(a, b), std::max(a, b)});
            }
    return {pairs.begin(), pairs.end()};
}

std::array<Region, 4> Lattice::levin_wen_regions() const {
    Region A = {h_edge(0, 0), h_edge(0, 1)};
    Region B = {v_edge(0, 1), v_edge(1, 1)};
    Region C = {h_edge(1, 1), h_edge(1, 2)};
    Region D = {v_edge(0, 2), v_edge(1, 2)};
    return {A, B, C, D};
}

uint32_t Lattice::region_mask(const Region& edges) const {
    uint32_t msk = 0;
    for (int e : edges) {
        if (e < 0 || e >= N_)
            throw ConfigError("edge id " + std::to_string(e) + " out of range for " +
                              std::to_string(m_) + "x" + std::to_string(n_));
        msk |= uint32_t{1} << e;
    }
    return msk;
}

} // namespace toric
