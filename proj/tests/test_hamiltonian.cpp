#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toric/errors.hpp"
#include "toric/hamiltonian.hpp"
#include "toric/stabilizer.hpp"

#include <Eigen/Dense>
#include <map>
#include <random>

using namespace toric;

namespace {

// Independent dense oracle built from explicit Kronecker products,
// spin k sitting at bit k of the basis index.
Eigen::MatrixXd kron_op(int N, const std::map<int, char>& factors, double coeff) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(1, 1);
    for (int k = 0; k < N; ++k) {
        char which = factors.count(k) ? factors.at(k) : 'I';
        Eigen::Matrix2d f;
        if (which == 'X')
            f << 0, 1, 1, 0;
        else if (which == 'Z')
            f << 1, 0, 0, -1;
        else
            f << 1, 0, 0, 1;
        Eigen::MatrixXd out(2 * M.rows(), 2 * M.cols());
        out.topLeftCorner(M.rows(), M.cols()) = f(0, 0) * M;
        out.topRightCorner(M.rows(), M.cols()) = f(0, 1) * M;
        out.bottomLeftCorner(M.rows(), M.cols()) = f(1, 0) * M;
        out.bottomRightCorner(M.rows(), M.cols()) = f(1, 1) * M;
        M = std::move(out);
    }
    return coeff * M;
}

Eigen::MatrixXd dense_from_apply(const Hamiltonian& H) {
    size_t dim = H.dim();
    Eigen::MatrixXd D(dim, dim);
    for (size_t col = 0; col < dim; ++col) {
        cvec e(dim, cplx{0.0, 0.0});
        e[col] = 1.0;
        cvec he = H.apply(e);
        for (size_t row = 0; row < dim; ++row) {
            CHECK(std::abs(he[row].imag()) < 1e-15);
            D(row, col) = he[row].real();
        }
    }
    return D;
}

cvec random_state(size_t dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    cvec psi(dim);
    double norm2 = 0.0;
    for (auto& a : psi) {
        a = cplx{g(rng), g(rng)};
        norm2 += std::norm(a);
    }
    for (auto& a : psi) a /= std::sqrt(norm2);
    return psi;
}

} // namespace

TEST_CASE("single pauli action") {
    Lattice lat(2, 2);
    size_t dim = size_t{1} << lat.num_edges();
    cvec vac(dim, cplx{0.0, 0.0});
    vac[0] = 1.0;
    auto flipped = pauli_apply({1u, 0u, 1.0}, vac);
    CHECK(flipped[1] == cplx{1.0, 0.0});
    auto signed_state = pauli_apply({0u, 1u, 1.0}, flipped);
    CHECK(signed_state[1] == cplx{-1.0, 0.0});
    // string along a winding loop squares to the identity
    uint32_t w1 = lat.region_mask(lat.loop_w1());
    auto once = pauli_apply({w1, 0u, 1.0}, vac);
    auto twice = pauli_apply({w1, 0u, 1.0}, once);
    CHECK(twice == vac);
}

TEST_CASE("term counts on 2x3") {
    Lattice lat(2, 3);
    CHECK(build_hamiltonian(lat, {.name = "H0"}).terms().size() == 12);
    CHECK(build_hamiltonian(lat, {.name = "H1"}).terms().size() == 12);
    CHECK(build_hamiltonian(lat, {.name = "H2"}).terms().size() == 33);
    CHECK(build_hamiltonian(lat, {.name = "H3"}).terms().size() == 45);
    CHECK(build_hamiltonian(lat, {.name = "H4"}).terms().size() == 24);
    CHECK(build_hamiltonian(lat, {.name = "H5"}).terms().size() == 57);
}

TEST_CASE("H4 at h = 0 degenerates to H0") {
    Lattice lat(2, 3);
    auto h0 = build_hamiltonian(lat, {.name = "H0"});
    QuenchSpec s4{.name = "H4"};
    s4.h = 0.0;
    auto h4 = build_hamiltonian(lat, s4);
    REQUIRE(h4.terms().size() == h0.terms().size() + lat.num_edges());
    for (size_t k = 0; k < h0.terms().size(); ++k) {
        CHECK(h4.terms()[k].xmask == h0.terms()[k].xmask);
        CHECK(h4.terms()[k].zmask == h0.terms()[k].zmask);
        CHECK(h4.terms()[k].coeff == h0.terms()[k].coeff);
    }
    for (size_t k = h0.terms().size(); k < h4.terms().size(); ++k)
        CHECK(h4.terms()[k].coeff == 0.0);
}

TEST_CASE("toric ground state is an H0 eigenstate at -2mn") {
    Lattice lat(2, 3);
    auto grp = enumerate_group(lat);
    auto psi = ground_state(lat, grp);
    auto h0 = build_hamiltonian(lat, {.name = "H0"});
    CHECK(h0.expectation(psi) == doctest::Approx(-12.0).epsilon(1e-12));
    cvec hpsi = h0.apply(psi);
    for (size_t b = 0; b < psi.size(); ++b)
        CHECK(std::abs(hpsi[b] - (-12.0) * psi[b]) < 1e-12);
    // each stabilizer individually at +1
    for (const auto& t : h0.terms()) {
        Hamiltonian single(lat.num_edges(), {{t.xmask, t.zmask, 1.0}});
        CHECK(single.expectation(psi) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dense oracle cross-check on 2x2") {
    Lattice lat(2, 2);
    QuenchSpec spec{.name = "H3"};
    spec.J1 = 0.33;
    spec.J2 = 1.0;
    auto H = build_hamiltonian(lat, spec);
    auto D = dense_from_apply(H);
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-14);

    int N = lat.num_edges();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(D.rows(), D.cols());
    for (int e = 0; e < N; ++e) K += kron_op(N, {{e, 'Z'}}, -0.33);
    for (auto [a, b] : lat.neighbor_pairs()) K += kron_op(N, {{a, 'X'}, {b, 'X'}}, -1.0);
    CHECK((D - K).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hermiticity and linearity") {
    Lattice lat(2, 2);
    auto H = build_hamiltonian(lat, {.name = "H5"});
    auto phi = random_state(H.dim(), 11);
    auto psi = random_state(H.dim(), 22);
    cvec hphi = H.apply(phi), hpsi = H.apply(psi);
    cplx lhs = 0.0, rhs = 0.0;
    for (size_t b = 0; b < phi.size(); ++b) {
        lhs += std::conj(phi[b]) * hpsi[b];
        rhs += std::conj(hphi[b]) * psi[b];
    }
    CHECK(std::abs(lhs - rhs) < 1e-10);
    cvec zero(H.dim(), cplx{0.0, 0.0});
    CHECK(H.apply(zero) == zero);
}

TEST_CASE("single-basis quenches leave product states proportional") {
    Lattice lat(2, 2);
    for (const char* name : {"H1", "H2"}) {
        QuenchSpec spec{.name = name};
        auto H = build_hamiltonian(lat, spec);
        CHECK(H.z_diagonal());
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            uint32_t b = uint32_t(rng() % H.dim());
            cvec e(H.dim(), cplx{0.0, 0.0});
            e[b] = 1.0;
            cvec he = H.apply(e);
            for (size_t k = 0; k < he.size(); ++k)
                if (k != b) CHECK(he[k] == cplx{0.0, 0.0});
            CHECK(he[b].real() == doctest::Approx(H.diagonal_energy(b)).epsilon(1e-13));
        }
        spec.basis = 'X';
        CHECK(build_hamiltonian(lat, spec).x_diagonal());
    }
    auto h3 = build_hamiltonian(Lattice(2, 2), {.name = "H3"});
    CHECK(!h3.z_diagonal());
    CHECK(!h3.x_diagonal());
    CHECK_THROWS_AS(h3.diagonal_energy(0), Error);
}

TEST_CASE("uniform Z field averages to zero on the ground state") {
    Lattice lat(2, 2);
    auto grp = enumerate_group(lat);
    auto psi = ground_state(lat, grp);
    auto h1 = build_hamiltonian(lat, {.name = "H1"});
    CHECK(h1.expectation(psi) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("seeded disorder is reproducible and bounded") {
    Lattice lat(2, 3);
    QuenchSpec spec{.name = "H1"};
    spec.h = 2.0;
    spec.disorder_seed = 1234;
    auto a = build_hamiltonian(lat, spec);
    auto b = build_hamiltonian(lat, spec);
    REQUIRE(a.terms().size() == b.terms().size());
    bool any_diff_from_uniform = false;
    for (size_t k = 0; k < a.terms().size(); ++k) {
        CHECK(a.terms()[k].coeff == b.terms()[k].coeff);
        double mag = std::abs(a.terms()[k].coeff);
        CHECK(mag >= 0.5 * 2.0);
        CHECK(mag <= 1.5 * 2.0);
        if (std::abs(a.terms()[k].coeff + 2.0) > 1e-9) any_diff_from_uniform = true;
    }
    CHECK(any_diff_from_uniform);
    spec.disorder_seed = 99;
    auto c = build_hamiltonian(lat, spec);
    bool seeds_differ = false;
    for (size_t k = 0; k < a.terms().size(); ++k)
        if (a.terms()[k].coeff != c.terms()[k].coeff) seeds_differ = true;
    CHECK(seeds_differ);
}

TEST_CASE("construction guards") {
    Lattice lat(2, 2);
    CHECK_THROWS_AS(build_hamiltonian(lat, {.name = "H9"}), ConfigError);
    QuenchSpec bad{.name = "H1"};
    bad.basis = 'Y';
    CHECK_THROWS_AS(build_hamiltonian(lat, bad), ConfigError);
    // odd X/Z overlap on one spin is a Y up to phase: rejected
    CHECK_THROWS_AS(Hamiltonian(8, {{1u, 1u, 1.0}}), ConfigError);
    CHECK_NOTHROW(Hamiltonian(8, {{3u, 3u, 1.0}}));
    auto H = build_hamiltonian(lat, {.name = "H0"});
    cvec unnorm(H.dim(), cplx{0.0, 0.0});
    unnorm[0] = 2.0;
    CHECK_THROWS_AS(H.expectation(unnorm), Error);
}
