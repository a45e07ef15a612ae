// Gate checks for the quench study, one criterion per invocation:
//
//   acceptance N        N in 1..12
//
// Each run prints exactly one verdict line with the measured values so the
// report stands on its own.  Criteria 8 and 10 probe size-scaling behaviour
// that a 12-spin torus provably cannot show (see README); they are measured
// exactly as stated and report FAIL with the observed numbers.

#include "toric/entangle.hpp"
#include "toric/errors.hpp"
#include "toric/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace toric;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

cplx inner(const cvec& a, const cvec& b) {
    cplx s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
    return s;
}

std::vector<double> grid(double t_max, double dt) { return TimeGrid{t_max, dt}.times(); }

double windowed_mean(const std::vector<double>& times, const std::vector<double>& vals,
                     double window_min) {
    double sum = 0.0;
    int cnt = 0;
    for (size_t k = 0; k < times.size(); ++k)
        if (times[k] > window_min) {
            sum += vals[k];
            ++cnt;
        }
    return sum / std::max(cnt, 1);
}

std::vector<double> stopo_series(const Lattice& lat, const Hamiltonian& H,
                                 const std::vector<double>& times, KrylovOptions kopts = {}) {
    FlipGroup grp = enumerate_group(lat);
    cvec psi0 = ground_state(lat, grp);
    auto regs = lat.levin_wen_regions();
    std::vector<double> out(times.size(), 0.0);
    if (Propagator::auto_mode(H) == Propagator::Mode::krylov) {
        Propagator prop(H, Propagator::Mode::krylov, kopts);
        prop.trajectory(psi0, times, [&](size_t k, double, const cvec& p) {
            out[k] = topological_entropy(p, lat, regs);
        });
    } else {
        Propagator prop = Propagator::make_auto(H, kopts);
        for (size_t k = 0; k < times.size(); ++k)
            out[k] = topological_entropy(prop.at(psi0, times[k]), lat, regs);
    }
    return out;
}

// 1. every stabilizer expectation +1 on the ground state, group order 2^{mn-1}
Verdict criterion1() {
    double max_dev = 0.0;
    std::string sizes;
    for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
        Lattice lat(m, n);
        FlipGroup grp = enumerate_group(lat);
        if (grp.masks.size() != (size_t{1} << (m * n - 1)))
            return {false, "group order " + std::to_string(grp.masks.size()) + " on " +
                               std::to_string(m) + "x" + std::to_string(n)};
        sizes += (sizes.empty() ? "" : "/") + std::to_string(grp.masks.size());
        cvec psi = ground_state(lat, grp);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) {
                auto star = lat.star_edges(r, c);
                auto plaq = lat.plaq_edges(r, c);
                uint32_t sm = lat.region_mask({star.begin(), star.end()});
                uint32_t pm = lat.region_mask({plaq.begin(), plaq.end()});
                cvec xs = pauli_apply({sm, 0, 1.0}, psi);
                cvec zs = pauli_apply({0, pm, 1.0}, psi);
                max_dev = std::max(max_dev, std::abs(inner(psi, xs) - 1.0));
                max_dev = std::max(max_dev, std::abs(inner(psi, zs) - 1.0));
            }
    }
    return {max_dev <= 1e-12,
            "all 2mn stabilizers +1 within " + num(max_dev) + "; |G| = " + sizes};
}

// 2. numeric region entropy matches the group formula and the boundary count
Verdict criterion2() {
    Lattice lat(2, 3);
    FlipGroup grp = enumerate_group(lat);
    cvec psi0 = ground_state(lat, grp);
    auto regions = contractible_regions(lat, grp, 6);
    double dev_formula = 0.0, dev_boundary = 0.0;
    for (const Region& A : regions) {
        double s = region_entropy_bits(psi0, lat, A);
        dev_formula = std::max(dev_formula, std::abs(s - analytic_region_entropy(lat, grp, A)));
        dev_boundary = std::max(dev_boundary, std::abs(s - (boundary_star_count(lat, A) - 1)));
    }
    return {dev_formula <= 1e-9 && dev_boundary <= 1e-9,
            std::to_string(regions.size()) + " contractible regions; |S - log2|G|/(|G_A||G_B|)| <= " +
                num(dev_formula) + ", |S - (L_A - 1)| <= " + num(dev_boundary)};
}

// 3. one topological bit on every lattice, zero on the bare vacuum
Verdict criterion3() {
    double max_dev = 0.0;
    double vac_worst = 0.0;
    for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
        Lattice lat(m, n);
        FlipGroup grp = enumerate_group(lat);
        cvec psi0 = ground_state(lat, grp);
        max_dev = std::max(max_dev,
                           std::abs(topological_entropy(psi0, lat, lat.levin_wen_regions()) - 1.0));
        cvec vac(size_t{1} << lat.num_edges(), 0.0);
        vac[0] = 1.0;
        vac_worst = std::max(vac_worst,
                             std::abs(topological_entropy(vac, lat, lat.levin_wen_regions())));
    }
    return {max_dev <= 1e-9 && vac_worst == 0.0,
            "|S_topo - 1| <= " + num(max_dev) + " on 2x2/2x3/3x3; vacuum S_topo = " +
                num(vac_worst)};
}

// 4. single-basis quenches leave block entropies and S_topo frozen
Verdict criterion4() {
    Lattice lat(2, 3);
    FlipGroup grp = enumerate_group(lat);
    cvec psi0 = ground_state(lat, grp);
    auto regs = lat.levin_wen_regions();
    const Region single = {0};
    const Region dblstar = {0, 1, 4, 6, 7, 10}; // two adjacent star supports
    auto times = grid(20.0, 0.05);

    double max_dev = 0.0;
    for (const char* name : {"H1", "H2"})
        for (char basis : {'Z', 'X'})
            for (bool disordered : {false, true}) {
                QuenchSpec q;
                q.name = name;
                q.basis = basis;
                if (disordered) q.disorder_seed = 1234;
                Hamiltonian H = build_hamiltonian(lat, q);
                Propagator prop = Propagator::make_auto(H);
                double s1_0 = region_entropy_bits(psi0, lat, single);
                double s2_0 = region_entropy_bits(psi0, lat, dblstar);
                double st_0 = topological_entropy(psi0, lat, regs);
                for (double t : times) {
                    cvec p = prop.at(psi0, t);
                    max_dev = std::max(max_dev,
                                       std::abs(region_entropy_bits(p, lat, single) - s1_0));
                    max_dev = std::max(max_dev,
                                       std::abs(region_entropy_bits(p, lat, dblstar) - s2_0));
                    max_dev = std::max(max_dev, std::abs(topological_entropy(p, lat, regs) - st_0));
                }
            }
    return {max_dev <= 1e-9,
            "S_A and S_topo drift <= " + num(max_dev) +
                " bits over [0,20] for H1/H2 x Z/X x uniform/disordered"};
}

// 5. full revival at T = pi/2 for unit couplings, 2x2 and 2x3
Verdict criterion5() {
    const double T = std::numbers::pi / 2.0;
    double worst = 1.0;
    for (auto [m, n] : {std::pair{2, 2}, {2, 3}})
        for (const char* name : {"H1", "H2"}) {
            Lattice lat(m, n);
            FlipGroup grp = enumerate_group(lat);
            cvec psi0 = ground_state(lat, grp);
            QuenchSpec q;
            q.name = name; // h = J = 1 defaults
            Propagator prop = Propagator::make_auto(build_hamiltonian(lat, q));
            worst = std::min(worst, std::abs(inner(psi0, prop.at(psi0, T))));
        }
    return {worst > 1.0 - 1e-9, "min |<psi0|psi(pi/2)>| = 1 - " + num(1.0 - worst) +
                                    " over H1,H2 on 2x2,2x3"};
}

// 6. numeric overlap equals the group cosine formula at every grid point
Verdict criterion6() {
    Lattice lat(2, 2);
    FlipGroup grp = enumerate_group(lat);
    cvec psi0 = ground_state(lat, grp);
    QuenchSpec q;
    q.name = "H1";
    Hamiltonian H = build_hamiltonian(lat, q);
    Propagator prop = Propagator::make_auto(H);
    std::function<double(uint32_t)> energy = [&](uint32_t g) { return H.diagonal_energy(g); };
    double max_dev = 0.0;
    for (double t : grid(20.0, 0.05))
        max_dev = std::max(max_dev, std::abs(std::abs(inner(psi0, prop.at(psi0, t))) -
                                             analytic_overlap(grp, energy, t)));
    return {max_dev <= 1e-9, "max |numeric - closed form| = " + num(max_dev) + " on 2x2"};
}

// 7. dense and short-step propagators agree; norm drift stays tiny at N = 18
Verdict criterion7() {
    Lattice lat(2, 3);
    FlipGroup grp = enumerate_group(lat);
    cvec psi0 = ground_state(lat, grp);
    QuenchSpec q; // H3 defaults
    Hamiltonian H = build_hamiltonian(lat, q);
    Propagator dense(H, Propagator::Mode::dense);
    cvec ref = dense.at(psi0, 5.0);
    Propagator kry(H, Propagator::Mode::krylov);
    cvec stepped;
    kry.trajectory(psi0, grid(5.0, 0.05),
                   [&](size_t, double t, const cvec& p) {
                       if (t == 5.0) stepped = p;
                   });
    double fid = std::abs(inner(ref, stepped));

    Lattice big(3, 3);
    FlipGroup bgrp = enumerate_group(big);
    cvec bpsi = ground_state(big, bgrp);
    Hamiltonian bigH = build_hamiltonian(big, q);
    Propagator bkry(bigH, Propagator::Mode::krylov);
    bkry.trajectory(bpsi, grid(5.0, 0.05), [](size_t, double, const cvec&) {});
    double drift = bkry.max_norm_drift();

    return {fid > 1.0 - 1e-8 && drift < 1e-9,
            "dense/krylov fidelity 1 - " + num(1.0 - fid) + " at t=5 on 2x3; N=18 norm drift " +
                num(drift) + " per step"};
}

// 8. survival picture under H3 at J1/J2 = 0.33: (a) deeper overlap dip at
// N = 12 than N = 8, (b) mean S_topo below half a bit, (c) sector fidelity
// dips below 0.9
Verdict criterion8() {
    QuenchSpec q; // H3, J1 = 0.33, J2 = 1
    auto times = grid(20.0, 0.05);

    double min8 = 1.0, min12 = 1.0;
    for (auto [m, n] : {std::pair{2, 2}, {2, 3}}) {
        Lattice lat(m, n);
        FlipGroup grp = enumerate_group(lat);
        cvec psi0 = ground_state(lat, grp);
        Propagator prop = Propagator::make_auto(build_hamiltonian(lat, q));
        auto ov = prop.overlap_function(psi0);
        double lo = 1.0;
        for (double t : times) lo = std::min(lo, ov(t));
        (m * n == 4 ? min8 : min12) = lo;
    }
    bool a = min12 < min8;

    Lattice lat(2, 3);
    auto st = stopo_series(lat, build_hamiltonian(lat, q), times);
    double mean = windowed_mean(times, st, 1.0);
    double lowest = *std::min_element(st.begin(), st.end());
    bool b = mean < 0.5;

    FlipGroup grp = enumerate_group(lat);
    auto fid = sector_fidelity_series(build_hamiltonian(lat, q), lat, grp,
                                      default_fidelity_region(lat), {0, 0}, {1, 0}, times);
    double fmin = *std::min_element(fid.begin(), fid.end());
    bool c = fmin < 0.9;

    std::ostringstream d;
    d << "(a) min overlap N12 " << num(min12) << " < N8 " << num(min8) << ": "
      << (a ? "yes" : "no") << "; (b) mean S_topo " << num(mean) << " < 0.5 (pointwise min "
      << num(lowest) << "): " << (b ? "yes" : "no") << "; (c) min sector fidelity " << num(fmin)
      << " < 0.9: " << (c ? "yes" : "no");
    return {a && b && c, d.str()};
}

// 9. mean S_topo grows with system size under H4 at h = 0.34
Verdict criterion9() {
    QuenchSpec q;
    q.name = "H4";
    q.h = 0.34;
    auto times = grid(20.0, 0.2);
    KrylovOptions kopts{25, 1e-10};
    std::vector<double> means;
    for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
        Lattice lat(m, n);
        auto st = stopo_series(lat, build_hamiltonian(lat, q), times, kopts);
        means.push_back(windowed_mean(times, st, 1.0));
    }
    bool pass = means[0] < means[1] && means[1] < means[2];
    return {pass, "mean S_topo " + num(means[0]) + " (N=8) -> " + num(means[1]) + " (N=12) -> " +
                      num(means[2]) + " (N=18)"};
}

// 10. weak H5 coupling should out-preserve strong coupling in mean S_topo
Verdict criterion10() {
    Lattice lat(2, 3);
    auto times = grid(20.0, 0.05);
    auto mean_for = [&](double j) {
        QuenchSpec q;
        q.name = "H5";
        q.J1 = q.J2 = j;
        return windowed_mean(times, stopo_series(lat, build_hamiltonian(lat, q), times), 1.0);
    };
    double lo = mean_for(0.033), hi = mean_for(3.3);
    return {lo > hi, "mean S_topo " + num(lo) + " at J1=J2=0.033 vs " + num(hi) +
                         " at J1=J2=3.3 on N=12"};
}

// 11. the four sector states are identical on every contractible region
Verdict criterion11() {
    Lattice lat(2, 3);
    FlipGroup grp = enumerate_group(lat);
    const SectorLabel sectors[4] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    std::vector<cvec> psi;
    for (SectorLabel s : sectors) psi.push_back(sector_state(lat, grp, s));

    auto regions = contractible_regions(lat, grp, lat.num_edges() - 1);
    double max_entry = 0.0, max_fid_dev = 0.0;
    for (const Region& A : regions) {
        Eigen::MatrixXcd rho[4], fac[4];
        for (int s = 0; s < 4; ++s) {
            rho[s] = reduced_density(psi[s], lat, A);
            fac[s] = reduced_factor(psi[s], lat, A);
        }
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                max_entry = std::max(max_entry, (rho[a] - rho[b]).cwiseAbs().maxCoeff());
                max_fid_dev = std::max(max_fid_dev,
                                       std::abs(uhlmann_from_factors(fac[a], fac[b]) - 1.0));
            }
    }
    return {max_entry <= 1e-12 && max_fid_dev <= 1e-9,
            std::to_string(regions.size()) + " regions x 6 sector pairs: entrywise <= " +
                num(max_entry) + ", |F(0) - 1| <= " + num(max_fid_dev)};
}

// 12. repeated preset runs byte-identical (summary.txt carries timings and is
// the one file excluded)
Verdict criterion12() {
    const std::string root = "/tmp/toric_acceptance_12";
    fs::remove_all(root);

    auto run = [&](const std::string& args, const std::string& dir) {
        std::string cmd = std::string(TORIC_QUENCH_BIN) + " " + args + " --out " + dir +
                          " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto compare = [&](const std::string& a, const std::string& b, std::string& why) {
        std::map<std::string, std::string> fa, fb;
        for (auto* d : {&fa, &fb})
            for (const auto& e : fs::directory_iterator(d == &fa ? a : b))
                if (e.path().extension() == ".csv") {
                    std::ifstream in(e.path(), std::ios::binary);
                    std::ostringstream os;
                    os << in.rdbuf();
                    (*d)[e.path().filename().string()] = os.str();
                }
        if (fa.empty() || fa.size() != fb.size()) {
            why = "csv file sets differ under " + a;
            return false;
        }
        for (const auto& [name, text] : fa)
            if (!fb.count(name) || fb[name] != text) {
                why = name + " differs";
                return false;
            }
        return true;
    };

    struct Case {
        std::string label, args;
    };
    const Case cases[] = {
        {"fig1 full grid", "preset fig1"},
        {"fig1 short", "preset fig1 --t-max 5 --dt 0.1"},
        {"fig2 short", "preset fig2 --t-max 5 --dt 0.1"},
        {"fig3 short", "preset fig3 --t-max 5 --dt 0.1"},
    };
    int files = 0;
    for (int k = 0; k < 4; ++k) {
        std::string da = root + "/case" + std::to_string(k) + "_a";
        std::string db = root + "/case" + std::to_string(k) + "_b";
        if (!run(cases[k].args, da) || !run(cases[k].args, db))
            return {false, cases[k].label + ": run failed"};
        std::string why;
        if (!compare(da, db, why)) return {false, cases[k].label + ": " + why};
        for (const auto& e : fs::directory_iterator(da))
            if (e.path().extension() == ".csv") ++files;
    }
    fs::remove_all(root);
    return {true, "4 preset invocations x 2 runs: " + std::to_string(files) +
                      " csv files byte-identical"};
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s N   (criterion number 1..12)\n", argv[0]);
        return 2;
    }
    int which = std::atoi(argv[1]);
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        switch (which) {
            case 1: v = criterion1(); break;
            case 2: v = criterion2(); break;
            case 3: v = criterion3(); break;
            case 4: v = criterion4(); break;
            case 5: v = criterion5(); break;
            case 6: v = criterion6(); break;
            case 7: v = criterion7(); break;
            case 8: v = criterion8(); break;
            case 9: v = criterion9(); break;
            case 10: v = criterion10(); break;
            case 11: v = criterion11(); break;
            case 12: v = criterion12(); break;
            default: std::fprintf(stderr, "criterion number out of range\n"); return 2;
        }
    } catch (const std::exception& e) {
        v = {false, std::string("unexpected error: ") + e.what()};
    }
    double secs = std::chrono::duration_cast<std::chrono::duration<double>>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    std::printf("criterion %02d: %s - %s (%.1f s)\n", which, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    return v.pass ? 0 : 1;
}
