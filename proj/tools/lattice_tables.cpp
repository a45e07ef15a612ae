// Dumps the index tables of an m x n periodic lattice: edge layout, stabilizer
// supports, winding loops, neighbor pairs, and the annulus segments used for
// the topological-entropy combination.  Handy when freezing expected values in
// tests or picking fidelity regions by hand.

#include "toric/entangle.hpp"
#include "toric/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>

using namespace toric;

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s M N [max_region_edges]\n", argv[0]);
        return 2;
    }
    int m = std::atoi(argv[1]);
    int n = std::atoi(argv[2]);
    int max_edges = argc > 3 ? std::atoi(argv[3]) : 0;

    try {
        Lattice lat(m, n);
        std::printf("lattice %dx%d: %d edges, %d vertices\n", m, n, lat.num_edges(),
                    lat.num_stars());

        std::printf("\nedges (id: type row,col  vertices):\n");
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) {
                auto [ha, hb] = lat.edge_vertices(lat.h_edge(r, c));
                auto [va, vb] = lat.edge_vertices(lat.v_edge(r, c));
                std::printf("  %2d: h %d,%d  %d-%d\n", lat.h_edge(r, c), r, c, ha, hb);
                std::printf("  %2d: v %d,%d  %d-%d\n", lat.v_edge(r, c), r, c, va, vb);
            }

        std::printf("\nstars:\n");
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) {
                auto s = lat.star_edges(r, c);
                std::printf("  (%d,%d): %d %d %d %d\n", r, c, s[0], s[1], s[2], s[3]);
            }
        std::printf("plaquettes:\n");
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) {
                auto p = lat.plaq_edges(r, c);
                std::printf("  (%d,%d): %d %d %d %d\n", r, c, p[0], p[1], p[2], p[3]);
            }

        auto print_region = [](const char* label, const Region& reg) {
            std::printf("%s:", label);
            for (int e : reg) std::printf(" %d", e);
            std::printf("\n");
        };
        std::printf("\n");
        print_region("loop w1", lat.loop_w1());
        print_region("loop w2", lat.loop_w2());

        auto lw = lat.levin_wen_regions();
        const char* names[4] = {"segment A", "segment B", "segment C", "segment D"};
        for (int k = 0; k < 4; ++k) print_region(names[k], lw[k]);
        print_region("fidelity default", default_fidelity_region(lat));

        auto pairs = lat.neighbor_pairs();
        std::printf("\n%zu neighbor pairs:", pairs.size());
        for (auto [a, b] : pairs) std::printf(" %d-%d", a, b);
        std::printf("\n");

        if (max_edges > 0) {
            FlipGroup grp = enumerate_group(lat);
            auto regions = contractible_regions(lat, grp, max_edges);
            std::map<size_t, int> by_size;
            for (const Region& reg : regions) ++by_size[reg.size()];
            std::printf("\ncontractible regions up to %d edges: %zu total\n", max_edges,
                        regions.size());
            for (auto [sz, cnt] : by_size) std::printf("  %zu edges: %d\n", sz, cnt);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    return 0;
}
