#include "toric/hamiltonian.hpp"
#include "toric/errors.hpp"

#include <bit>
#include <cmath>
#include <random>

namespace toric {

Hamiltonian::Hamiltonian(int num_spins, std::vector<PauliString> terms)
    : N_(num_spins), terms_(std::move(terms)) {
    if (N_ < 1 || N_ > kMaxSpins)
        throw SizeLimitError("spin count " + std::to_string(N_) + " outside [1, " +
                             std::to_string(kMaxSpins) + "]");
    uint32_t full = (N_ == 32) ? ~uint32_t{0} : ((uint32_t{1} << N_) - 1);
    zdiag_ = xdiag_ = true;
    for (const auto& t : terms_) {
        if ((t.xmask | t.zmask) & ~full)
            throw ConfigError("pauli mask exceeds the spin count");
        if (std::popcount(t.xmask & t.zmask) % 2 != 0)
            throw ConfigError("odd X/Z overlap would introduce Y phases");
        if (!std::isfinite(t.coeff)) throw ConfigError("non-finite coefficient");
        if (t.xmask) zdiag_ = false;
        if (t.zmask) xdiag_ = false;
    }
}

cvec pauli_apply(const PauliString& P, const cvec& psi) {
    cvec out(psi.size(), cplx{0.0, 0.0});
    for (size_t b = 0; b < psi.size(); ++b) {
        double sign = (std::popcount(uint32_t(b) & P.zmask) & 1) ? -1.0 : 1.0;
        out[b] += P.coeff * sign * psi[b ^ P.xmask];
    }
    return out;
}

void Hamiltonian::apply(const cvec& in, cvec& out) const {
    if (in.size() != dim()) throw Error("state dimension mismatch");
    out.assign(dim(), cplx{0.0, 0.0});
    for (const auto& t : terms_) {
        const uint32_t x = t.xmask, z = t.zmask;
        const double c = t.coeff;
        if (x == 0) {
            for (size_t b = 0; b < in.size(); ++b) {
                double sign = (std::popcount(uint32_t(b) & z) & 1) ? -c : c;
                out[b] += sign * in[b];
            }
        } else {
            for (size_t b = 0; b < in.size(); ++b) {
                double sign = (std::popcount(uint32_t(b) & z) & 1) ? -c : c;
                out[b] += sign * in[b ^ x];
            }
        }
    }
}

cvec Hamiltonian::apply(const cvec& in) const {
    cvec out;
    apply(in, out);
    return out;
}

double Hamiltonian::expectation(const cvec& psi) const {
    double norm2 = 0.0;
    for (const auto& a : psi) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > 1e-9)
        throw Error("expectation requires a normalized state");
    cvec hpsi = apply(psi);
    cplx acc = 0.0;
    for (size_t b = 0; b < psi.size(); ++b) acc += std::conj(psi[b]) * hpsi[b];
    return acc.real();
}

double Hamiltonian::diagonal_energy(uint32_t bits) const {
    if (!zdiag_ && !xdiag_) throw Error("diagonal_energy needs a single-basis Hamiltonian");
    double e = 0.0;
    for (const auto& t : terms_) {
        uint32_t m = zdiag_ ? t.zmask : t.xmask;
        e += (std::popcount(bits & m) & 1) ? -t.coeff : t.coeff;
    }
    return e;
}

namespace {

// Term order is part of the output contract: stars, then plaquettes, then
// single-site fields by edge id, then pairs in sorted order.  Disorder draws
// follow this order one-to-one.
void add_stars(const Lattice& lat, std::vector<PauliString>& terms, double c) {
    for (int r = 0; r < lat.rows(); ++r)
        for (int cc = 0; cc < lat.cols(); ++cc) {
            auto se = lat.star_edges(r, cc);
            terms.push_back({lat.region_mask(Region(se.begin(), se.end())), 0u, c});
        }
}

void add_plaqs(const Lattice& lat, std::vector<PauliString>& terms, double c) {
    for (int r = 0; r < lat.rows(); ++r)
        for (int cc = 0; cc < lat.cols(); ++cc) {
            auto pe = lat.plaq_edges(r, cc);
            terms.push_back({0u, lat.region_mask(Region(pe.begin(), pe.end())), c});
        }
}

void add_fields(const Lattice& lat, std::vector<PauliString>& terms, char basis, double c) {
    for (int e = 0; e < lat.num_edges(); ++e) {
        uint32_t m = uint32_t{1} << e;
        if (basis == 'X')
            terms.push_back({m, 0u, c});
        else
            terms.push_back({0u, m, c});
    }
}

void add_pairs(const Lattice& lat, std::vector<PauliString>& terms, char basis, double c) {
    for (auto [a, b] : lat.neighbor_pairs()) {
        uint32_t m = (uint32_t{1} << a) | (uint32_t{1} << b);
        if (basis == 'X')
            terms.push_back({m, 0u, c});
        else
            terms.push_back({0u, m, c});
    }
}

} // namespace

Hamiltonian build_hamiltonian(const Lattice& lat, const QuenchSpec& spec) {
    std::vector<PauliString> terms;
    if (spec.basis != 'Z' && spec.basis != 'X')
        throw ConfigError("basis must be Z or X");
    if (spec.name == "H0") {
        add_stars(lat, terms, -1.0);
        add_plaqs(lat, terms, -1.0);
    } else if (spec.name == "H1") {
        add_fields(lat, terms, spec.basis, -spec.h);
    } else if (spec.name == "H2") {
        add_pairs(lat, terms, spec.basis, -spec.J);
    } else if (spec.name == "H3") {
        add_fields(lat, terms, 'Z', -spec.J1);
        add_pairs(lat, terms, 'X', -spec.J2);
    } else if (spec.name == "H4") {
        add_stars(lat, terms, -1.0);
        add_plaqs(lat, terms, -1.0);
        add_fields(lat, terms, 'Z', -spec.h);
    } else if (spec.name == "H5") {
        add_stars(lat, terms, -1.0);
        add_plaqs(lat, terms, -1.0);
        add_fields(lat, terms, 'Z', -spec.J1);
        add_pairs(lat, terms, 'X', -spec.J2);
    } else {
        throw ConfigError("unknown quench '" + spec.name + "'");
    }
    if (spec.disorder_seed) {
        std::mt19937_64 rng(*spec.disorder_seed);
        std::uniform_real_distribution<double> u(0.5, 1.5);
        for (auto& t : terms) t.coeff *= u(rng);
    }
    return Hamiltonian(lat.num_edges(), std::move(terms));
}

} // namespace toric
