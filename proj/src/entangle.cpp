#include "toric/entangle.hpp"
#include "toric/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <lapacke.h>

namespace toric {

namespace {

Region normalized_region(const Lattice& lat, const Region& A) {
    if (A.empty() || int(A.size()) >= lat.num_edges())
        throw ConfigError("region must be a nonempty strict subset of the edges");
    Region sorted = A;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConfigError("region contains a duplicate edge id");
    lat.region_mask(sorted); // range check
    return sorted;
}

Region complement_of(const Lattice& lat, const Region& A) {
    Region comp;
    uint32_t am = lat.region_mask(A);
    for (int e = 0; e < lat.num_edges(); ++e)
        if (!(am & (uint32_t{1} << e))) comp.push_back(e);
    return comp;
}

// pos[a] = basis-index bits obtained by scattering the bits of a onto the
// listed edges; built incrementally from the lowest set bit
std::vector<uint32_t> scatter_table(const Region& edges) {
    std::vector<uint32_t> pos(size_t{1} << edges.size(), 0u);
    for (size_t a = 1; a < pos.size(); ++a) {
        int low = std::countr_zero(a);
        pos[a] = pos[a & (a - 1)] | (uint32_t{1} << edges[low]);
    }
    return pos;
}

// eigenvalues of a Hermitian matrix, ascending; destroys the copy
std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd H) {
    int n = int(H.rows());
    std::vector<double> w(n);
    int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                              reinterpret_cast<lapack_complex_double*>(H.data()), n, w.data());
    if (info != 0) throw ConvergenceError("zheevd failed with info " + std::to_string(info));
    return w;
}

double spectrum_entropy_bits(const std::vector<double>& evals) {
    double s = 0.0;
    for (double p : evals) {
        if (p < -1e-8)
            throw ConvergenceError("density matrix eigenvalue " + std::to_string(p) +
                                   " is negative beyond tolerance");
        if (p > 1e-12) s -= p * std::log2(p);
    }
    return s;
}

} // namespace

Eigen::MatrixXcd reduced_factor(const cvec& psi, const Lattice& lat, const Region& A) {
    Region region = normalized_region(lat, A);
    if (psi.size() != size_t{1} << lat.num_edges())
        throw Error("state dimension does not match the lattice");
    Region comp = complement_of(lat, region);
    auto posA = scatter_table(region);
    auto posB = scatter_table(comp);
    Eigen::MatrixXcd M(posA.size(), posB.size());
    for (size_t b = 0; b < posB.size(); ++b)
        for (size_t a = 0; a < posA.size(); ++a) M(a, b) = psi[posA[a] | posB[b]];
    return M;
}

Eigen::MatrixXcd reduced_density(const cvec& psi, const Lattice& lat, const Region& A) {
    Region region = normalized_region(lat, A);
    if (region.size() > 12)
        throw SizeLimitError("reduced density matrices are limited to 12 edges");
    Eigen::MatrixXcd M = reduced_factor(psi, lat, region);
    return M * M.adjoint();
}

double matrix_entropy_bits(const Eigen::MatrixXcd& rho) {
    return spectrum_entropy_bits(hermitian_eigenvalues(rho));
}

double region_entropy_bits(const cvec& psi, const Lattice& lat, const Region& A) {
    Region region = normalized_region(lat, A);
    Eigen::MatrixXcd M = reduced_factor(psi, lat, region);
    // both Gram matrices share the nonzero spectrum; diagonalize the smaller
    Eigen::MatrixXcd G = (M.rows() <= M.cols()) ? Eigen::MatrixXcd(M * M.adjoint())
                                                : Eigen::MatrixXcd(M.adjoint() * M);
    return matrix_entropy_bits(G);
}

double topological_entropy(const cvec& psi, const Lattice& lat,
                           const std::array<Region, 4>& regs) {
    auto join = [&](std::initializer_list<int> which) {
        Region u;
        for (int w : which) u.insert(u.end(), regs[w].begin(), regs[w].end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        return u;
    };
    auto S = [&](const Region& r) {
        if (int(r.size()) == lat.num_edges()) return 0.0; // pure state, nothing traced out
        return region_entropy_bits(psi, lat, r);
    };
    return S(join({0, 1, 2})) + S(join({0, 2, 3})) - S(join({0, 2})) - S(join({0, 1, 2, 3}));
}

double uhlmann_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols())
        throw Error("fidelity needs square matrices of equal size");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) {
        if (lam[i] < -1e-8)
            throw ConvergenceError("density matrix eigenvalue " + std::to_string(lam[i]) +
                                   " is negative beyond tolerance");
        lam[i] = std::sqrt(std::max(lam[i], 0.0));
    }
    Eigen::MatrixXcd sq = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    std::vector<double> mid = hermitian_eigenvalues(sq * sigma * sq);
    double f = 0.0;
    for (double v : mid) f += std::sqrt(std::max(v, 0.0));
    return f;
}

double uhlmann_from_factors(const Eigen::MatrixXcd& Mx, const Eigen::MatrixXcd& My) {
    if (Mx.rows() != My.rows()) throw Error("factors must share the region dimension");
    const long r1 = std::min(Mx.rows(), Mx.cols());
    const long r2 = std::min(My.rows(), My.cols());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qx(Mx), qy(My);
    Eigen::MatrixXcd Qx = qx.householderQ() * Eigen::MatrixXcd::Identity(Mx.rows(), r1);
    Eigen::MatrixXcd Qy = qy.householderQ() * Eigen::MatrixXcd::Identity(My.rows(), r2);
    Eigen::MatrixXcd Rx = qx.matrixQR().topRows(r1).triangularView<Eigen::Upper>();
    Eigen::MatrixXcd Ry = qy.matrixQR().topRows(r2).triangularView<Eigen::Upper>();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ex(Rx * Rx.adjoint()), ey(Ry * Ry.adjoint());
    Eigen::VectorXd lx = ex.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::VectorXd ly = ey.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXcd mid = lx.asDiagonal() *
                           (ex.eigenvectors().adjoint() * (Qx.adjoint() * Qy) * ey.eigenvectors()) *
                           ly.asDiagonal();
    return mid.jacobiSvd().singularValues().sum();
}

bool pair_indistinguishable(const Lattice& lat, const FlipGroup& grp, const Region& A,
                            SectorLabel a, SectorLabel b) {
    Region region = normalized_region(lat, A);
    uint32_t diff = 0;
    if ((a.i ^ b.i) & 1) diff ^= lat.region_mask(lat.loop_w1());
    if ((a.j ^ b.j) & 1) diff ^= lat.region_mask(lat.loop_w2());
    if (diff == 0) return true;
    return deformable_off(grp, diff, lat.region_mask(region));
}

bool sector_deformable(const Lattice& lat, const FlipGroup& grp, const Region& A) {
    return pair_indistinguishable(lat, grp, A, {0, 0}, {1, 0}) &&
           pair_indistinguishable(lat, grp, A, {0, 0}, {0, 1}) &&
           pair_indistinguishable(lat, grp, A, {0, 0}, {1, 1});
}

Region default_fidelity_region(const Lattice& lat) {
    int m = lat.rows(), n = lat.cols();
    if (m == 2 && n == 2) return {1, 2, 5, 6};
    if (m == 2 && n == 3) return {0, 1, 2, 3, 5, 6, 8};
    // everything away from the two winding loops; trivially blind to the
    // sector label since the loop strings never touch it
    Region loops = lat.loop_w1();
    Region w2 = lat.loop_w2();
    loops.insert(loops.end(), w2.begin(), w2.end());
    std::sort(loops.begin(), loops.end());
    return complement_of(lat, loops);
}

std::vector<double> sector_fidelity_series(const Hamiltonian& H, const Lattice& lat,
                                           const FlipGroup& grp, const Region& A,
                                           SectorLabel sa, SectorLabel sb,
                                           const std::vector<double>& times,
                                           KrylovOptions opts) {
    Region region = normalized_region(lat, A);
    if (!pair_indistinguishable(lat, grp, region, sa, sb))
        throw ConfigError("fidelity region distinguishes the sectors at t = 0: the loop "
                          "separating them cannot be deformed off it");
    cvec psiA = sector_state(lat, grp, sa);
    cvec psiB = sector_state(lat, grp, sb);
    auto prop = Propagator::make_auto(H, opts);
    std::vector<double> out(times.size(), 0.0);
    prop.trajectory_pair(psiA, psiB, times,
                         [&](size_t k, double, const cvec& av, const cvec& bv) {
                             Eigen::MatrixXcd Mx = reduced_factor(av, lat, region);
                             Eigen::MatrixXcd My = reduced_factor(bv, lat, region);
                             out[k] = uhlmann_from_factors(Mx, My);
                         });
    return out;
}

} // namespace toric
