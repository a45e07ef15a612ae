#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace toric {

using Region = std::vector<int>; // sorted list of distinct edge ids

constexpr int kMaxSpins = 24;

// Edge lattice of the toric code on an m x n periodic vertex grid.
// Each vertex (r,c) owns one horizontal edge toward (r,c+1) and one vertical
// edge toward (r+1,c), so there are N = 2mn spins.  Edge ids interleave:
//   h(r,c) -> 2*(r*n + c),   v(r,c) -> 2*(r*n + c) + 1
class Lattice {
public:
    Lattice(int m, int n); // throws ConfigError (m or n < 2), SizeLimitError (N > 24)

    int rows() const { return m_; }
    int cols() const { return n_; }
    int num_edges() const { return N_; }
    int num_stars() const { return m_ * n_; }

    int h_edge(int r, int c) const; // indices wrap mod (m, n)
    int v_edge(int r, int c) const;

    // Four edges meeting vertex (r,c): its two outgoing edges plus the
    // incoming horizontal from the left and vertical from above.
    std::array<int, 4> star_edges(int r, int c) const;
    // Four edges bounding the face whose top-left vertex is (r,c).
    std::array<int, 4> plaq_edges(int r, int c) const;

    // Non-contractible loops winding the two cycles of the torus.
    Region loop_w1() const; // horizontal edges of column 0: {h(r,0)}
    Region loop_w2() const; // vertical edges of row 0: {v(0,c)}

    // Endpoints of an edge as vertex ids r*n + c.
    std::pair<int, int> edge_vertices(int e) const;

    // Unordered pairs of distinct edges sharing at least one vertex,
    // deduplicated; this is the XX-coupling graph for the quenches.
    std::vector<std::pair<int, int>> neighbor_pairs() const;

    // Four disjoint two-edge segments forming the annular arrangement used
    // for the topological entropy combination.  The staircase placement
    //   A={h(0,0),h(0,1)}  B={v(0,1),v(1,1)}  C={h(1,1),h(1,2)}  D={v(0,2),v(1,2)}
    // (column indices mod n) stays inside a 2x2 window of vertices and yields
    // a unit topological entropy on every lattice with m,n >= 2.
    std::array<Region, 4> levin_wen_regions() const;

    uint32_t region_mask(const Region& edges) const;

private:
    int m_, n_, N_;
};

} // namespace toric
