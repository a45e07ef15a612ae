#include "toric/evolve.hpp"
#include "toric/errors.hpp"

#include <algorithm>
#include <bit>
#include <cblas.h>
#include <cmath>
#include <complex>
#include <cstring>
#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace toric {

namespace {
// Pin BLAS to one thread: reduction order then never depends on the machine,
// keeping CSV output bit-reproducible; job-level parallelism happens above.
struct BlasInit {
    BlasInit() { openblas_set_num_threads(1); }
} const blas_init_once;

double nrm2(const cvec& v) {
    return cblas_dznrm2(int(v.size()), v.data(), 1);
}

cplx dotc(const cvec& a, const cvec& b) {
    cplx out;
    cblas_zdotc_sub(int(a.size()), a.data(), 1, b.data(), 1, &out);
    return out;
}

void axpy(cplx alpha, const cvec& x, cvec& y) {
    cblas_zaxpy(int(x.size()), &alpha, x.data(), 1, y.data(), 1);
}
} // namespace

std::vector<double> TimeGrid::times() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_max >= dt)) throw ConfigError("t_max must be at least dt");
    size_t count = size_t(std::floor(t_max / dt + 1e-9)) + 1;
    std::vector<double> out(count);
    for (size_t k = 0; k < count; ++k) out[k] = double(k) * dt;
    return out;
}

Propagator::Mode Propagator::auto_mode(const Hamiltonian& H) {
    if (H.z_diagonal()) return Mode::diag_z;
    if (H.x_diagonal()) return Mode::diag_x;
    return H.num_spins() <= 12 ? Mode::dense : Mode::krylov;
}

Propagator Propagator::make_auto(const Hamiltonian& H, KrylovOptions opts) {
    return Propagator(H, auto_mode(H), opts);
}

Propagator::Propagator(const Hamiltonian& H, Mode mode, KrylovOptions opts)
    : H_(H), mode_(mode), opts_(opts) {
    size_t dim = H_.dim();
    switch (mode_) {
    case Mode::diag_z:
        if (!H_.z_diagonal()) throw ConfigError("Hamiltonian is not Z-diagonal");
        break;
    case Mode::diag_x:
        if (!H_.x_diagonal()) throw ConfigError("Hamiltonian is not X-diagonal");
        break;
    case Mode::dense:
        if (H_.num_spins() > 14)
            throw SizeLimitError("dense propagator limited to 14 spins");
        break;
    case Mode::krylov:
        if (opts_.dim < 2) throw ConfigError("krylov subspace must have at least 2 vectors");
        break;
    }
    if (mode_ == Mode::diag_z || mode_ == Mode::diag_x) {
        energies_.resize(dim);
        for (size_t b = 0; b < dim; ++b) energies_[b] = H_.diagonal_energy(uint32_t(b));
    } else if (mode_ == Mode::dense) {
        // assemble the real-symmetric matrix column by column and factor it
        vecs_.assign(dim * dim, 0.0);
        for (const auto& t : H_.terms()) {
            for (size_t b = 0; b < dim; ++b) {
                double sign = (std::popcount(uint32_t(b) & t.zmask) & 1) ? -t.coeff : t.coeff;
                vecs_[(b ^ t.xmask) * dim + b] += sign; // column b^x feeds row b... see below
            }
        }
        // note: entry stored at column (b^x), row b means vecs_[col*dim + row];
        // the matrix is symmetric so the transpose ambiguity is harmless
        energies_.resize(dim);
        int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', int(dim), vecs_.data(),
                                  int(dim), energies_.data());
        if (info != 0)
            throw ConvergenceError("dsyevd failed with info " + std::to_string(info));
    }
}

const std::vector<double>& Propagator::eigenvalues() const {
    if (mode_ == Mode::krylov) throw Error("krylov mode has no precomputed spectrum");
    return energies_;
}

double Propagator::reconstruction_error(const Hamiltonian& H) const {
    if (mode_ != Mode::dense) throw Error("reconstruction check is for dense mode");
    size_t dim = H.dim();
    double worst = 0.0;
    // compare H e_b against V diag(eps) V^T e_b for every basis column
    std::vector<double> w(dim), col(dim);
    for (size_t b = 0; b < dim; ++b) {
        cvec e(dim, cplx{0.0, 0.0});
        e[b] = 1.0;
        cvec he = H.apply(e);
        for (size_t l = 0; l < dim; ++l) {
            double acc = 0.0;
            const double* vl = &vecs_[l * dim];
            acc = vl[b];
            w[l] = energies_[l] * acc;
        }
        cblas_dgemv(CblasColMajor, CblasNoTrans, int(dim), int(dim), 1.0, vecs_.data(),
                    int(dim), w.data(), 1, 0.0, col.data(), 1);
        for (size_t r = 0; r < dim; ++r)
            worst = std::max(worst, std::abs(col[r] - he[r].real()));
    }
    return worst;
}

void fwht(cvec& v) {
    for (size_t h = 1; h < v.size(); h <<= 1)
        for (size_t i = 0; i < v.size(); i += h << 1)
            for (size_t j = i; j < i + h; ++j) {
                cplx a = v[j], b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
}

void Propagator::project(const cvec& psi0, std::vector<double>& wr,
                         std::vector<double>& wi) const {
    size_t dim = H_.dim();
    std::vector<double> xr(dim), xi(dim);
    for (size_t b = 0; b < dim; ++b) {
        xr[b] = psi0[b].real();
        xi[b] = psi0[b].imag();
    }
    wr.resize(dim);
    wi.resize(dim);
    cblas_dgemv(CblasColMajor, CblasTrans, int(dim), int(dim), 1.0, vecs_.data(), int(dim),
                xr.data(), 1, 0.0, wr.data(), 1);
    cblas_dgemv(CblasColMajor, CblasTrans, int(dim), int(dim), 1.0, vecs_.data(), int(dim),
                xi.data(), 1, 0.0, wi.data(), 1);
}

cvec Propagator::dense_at(const std::vector<double>& wr, const std::vector<double>& wi,
                          double t) const {
    size_t dim = H_.dim();
    std::vector<double> cr(dim), ci(dim), outr(dim), outi(dim);
    for (size_t l = 0; l < dim; ++l) {
        double ph = -energies_[l] * t;
        double co = std::cos(ph), si = std::sin(ph);
        // (co + i si) * (wr + i wi)
        cr[l] = co * wr[l] - si * wi[l];
        ci[l] = co * wi[l] + si * wr[l];
    }
    cblas_dgemv(CblasColMajor, CblasNoTrans, int(dim), int(dim), 1.0, vecs_.data(), int(dim),
                cr.data(), 1, 0.0, outr.data(), 1);
    cblas_dgemv(CblasColMajor, CblasNoTrans, int(dim), int(dim), 1.0, vecs_.data(), int(dim),
                ci.data(), 1, 0.0, outi.data(), 1);
    cvec out(dim);
    for (size_t b = 0; b < dim; ++b) out[b] = cplx{outr[b], outi[b]};
    return out;
}

cvec Propagator::at(const cvec& psi0, double t) const {
    size_t dim = H_.dim();
    if (psi0.size() != dim) throw Error("state dimension mismatch");
    switch (mode_) {
    case Mode::diag_z: {
        cvec out(dim);
        for (size_t b = 0; b < dim; ++b)
            out[b] = std::polar(1.0, -energies_[b] * t) * psi0[b];
        return out;
    }
    case Mode::diag_x: {
        cvec out = psi0;
        fwht(out);
        for (size_t b = 0; b < dim; ++b) out[b] *= std::polar(1.0, -energies_[b] * t);
        fwht(out);
        double inv = 1.0 / double(dim);
        for (auto& a : out) a *= inv;
        return out;
    }
    case Mode::dense: {
        std::vector<double> wr, wi;
        project(psi0, wr, wi);
        return dense_at(wr, wi, t);
    }
    case Mode::krylov:
        throw Error("krylov mode evolves along a grid, use trajectory()");
    }
    throw Error("unreachable");
}

cvec Propagator::krylov_step(const cvec& psi, double dt) {
    const int kdim = opts_.dim;
    double in_norm = nrm2(psi);
    if (!(in_norm > 0.0)) throw ConvergenceError("zero state in krylov step");

    std::vector<cvec> basis;
    basis.reserve(kdim);
    basis.push_back(psi);
    for (auto& a : basis[0]) a /= in_norm;

    std::vector<double> alpha, beta;
    cvec w;
    for (int j = 0; j < kdim; ++j) {
        H_.apply(basis[j], w);
        double a = dotc(basis[j], w).real();
        alpha.push_back(a);
        axpy(cplx{-a, 0.0}, basis[j], w);
        if (j > 0) axpy(cplx{-beta[j - 1], 0.0}, basis[j - 1], w);
        for (const auto& q : basis) axpy(-dotc(q, w), q, w); // full reorthogonalization
        double b = nrm2(w);
        if (b < 1e-14 || j == kdim - 1) break;
        beta.push_back(b);
        basis.push_back(w);
        for (auto& a2 : basis.back()) a2 /= b;
    }

    int k = int(basis.size());
    // exp(-i T dt) e1 through the tridiagonal eigendecomposition
    std::vector<double> diag(alpha.begin(), alpha.begin() + k);
    std::vector<double> off(beta.begin(), beta.begin() + (k - 1));
    std::vector<double> U(size_t(k) * k);
    int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', k, diag.data(),
                             k > 1 ? off.data() : nullptr, U.data(), k);
    if (info != 0) throw ConvergenceError("dstev failed with info " + std::to_string(info));
    std::vector<cplx> small(k, cplx{0.0, 0.0});
    for (int l = 0; l < k; ++l) {
        cplx ph = std::polar(1.0, -diag[l] * dt); // diag now holds Ritz values
        for (int i = 0; i < k; ++i) small[i] += U[size_t(l) * k + i] * ph * U[size_t(l) * k];
    }
    cvec out(psi.size(), cplx{0.0, 0.0});
    for (int i = 0; i < k; ++i) axpy(small[i] * in_norm, basis[i], out);

    double out_norm = nrm2(out);
    double drift = std::abs(out_norm / in_norm - 1.0);
    max_norm_drift_ = std::max(max_norm_drift_, drift);
    if (!std::isfinite(out_norm) || drift > opts_.tol)
        throw ConvergenceError("krylov norm drift " + std::to_string(drift) +
                               " exceeds tolerance");
    return out;
}

void Propagator::trajectory(const cvec& psi0, const std::vector<double>& times,
                            const std::function<void(size_t, double, const cvec&)>& cb) {
    if (times.empty()) return;
    if (mode_ == Mode::krylov) {
        cvec psi = psi0;
        if (times[0] != 0.0) psi = krylov_step(psi, times[0]);
        cb(0, times[0], psi);
        for (size_t k = 1; k < times.size(); ++k) {
            psi = krylov_step(psi, times[k] - times[k - 1]);
            cb(k, times[k], psi);
        }
        return;
    }
    if (mode_ == Mode::dense) {
        std::vector<double> wr, wi;
        project(psi0, wr, wi);
        for (size_t k = 0; k < times.size(); ++k) cb(k, times[k], dense_at(wr, wi, times[k]));
        return;
    }
    for (size_t k = 0; k < times.size(); ++k) cb(k, times[k], at(psi0, times[k]));
}

void Propagator::trajectory_pair(
    const cvec& a0, const cvec& b0, const std::vector<double>& times,
    const std::function<void(size_t, double, const cvec&, const cvec&)>& cb) {
    if (times.empty()) return;
    if (mode_ == Mode::krylov) {
        cvec a = a0, b = b0;
        if (times[0] != 0.0) {
            a = krylov_step(a, times[0]);
            b = krylov_step(b, times[0]);
        }
        cb(0, times[0], a, b);
        for (size_t k = 1; k < times.size(); ++k) {
            double dt = times[k] - times[k - 1];
            a = krylov_step(a, dt);
            b = krylov_step(b, dt);
            cb(k, times[k], a, b);
        }
        return;
    }
    if (mode_ == Mode::dense) {
        std::vector<double> war, wai, wbr, wbi;
        project(a0, war, wai);
        project(b0, wbr, wbi);
        for (size_t k = 0; k < times.size(); ++k)
            cb(k, times[k], dense_at(war, wai, times[k]), dense_at(wbr, wbi, times[k]));
        return;
    }
    for (size_t k = 0; k < times.size(); ++k)
        cb(k, times[k], at(a0, times[k]), at(b0, times[k]));
}

std::function<double(double)> Propagator::overlap_function(const cvec& psi0) const {
    if (mode_ == Mode::krylov) return {};
    size_t dim = H_.dim();
    // spectral weights of psi0 in the eigenbasis; drop numerically empty ones
    std::vector<double> weight, energy;
    auto keep = [&](double w, double e) {
        if (w > 1e-18) {
            weight.push_back(w);
            energy.push_back(e);
        }
    };
    if (mode_ == Mode::diag_z) {
        for (size_t b = 0; b < dim; ++b) keep(std::norm(psi0[b]), energies_[b]);
    } else if (mode_ == Mode::diag_x) {
        cvec f = psi0;
        fwht(f);
        double inv = 1.0 / double(dim);
        for (size_t b = 0; b < dim; ++b) keep(std::norm(f[b]) * inv, energies_[b]);
    } else {
        std::vector<double> wr, wi;
        project(psi0, wr, wi);
        for (size_t l = 0; l < dim; ++l) keep(wr[l] * wr[l] + wi[l] * wi[l], energies_[l]);
    }
    return [weight = std::move(weight), energy = std::move(energy)](double t) {
        cplx acc{0.0, 0.0};
        for (size_t k = 0; k < weight.size(); ++k)
            acc += weight[k] * std::polar(1.0, -energy[k] * t);
        return std::abs(acc);
    };
}

std::vector<double> overlap_series(Propagator& prop, const cvec& psi0,
                                   const std::vector<double>& times) {
    std::vector<double> vals(times.size(), 0.0);
    prop.trajectory(psi0, times, [&](size_t k, double, const cvec& psi) {
        cplx acc{0.0, 0.0};
        for (size_t b = 0; b < psi.size(); ++b) acc += std::conj(psi0[b]) * psi[b];
        vals[k] = std::abs(acc);
    });
    return vals;
}

std::optional<double> recurrence_period(const std::vector<double>& times,
                                        const std::vector<double>& vals, double threshold,
                                        const std::function<double(double)>& evaluator,
                                        double margin) {
    if (times.size() != vals.size() || times.empty())
        throw Error("times and values must align");
    // skip the initial plateau where the state has not yet left |psi0>
    size_t kd = 0;
    while (kd < vals.size() && vals[kd] >= threshold) ++kd;
    if (kd == vals.size()) return std::nullopt;

    size_t k = kd;
    while (k < vals.size()) {
        if (vals[k] >= threshold - margin) {
            size_t k_end = k;
            while (k_end + 1 < vals.size() && vals[k_end + 1] >= threshold - margin) ++k_end;
            if (evaluator) {
                double lo = std::max(k > 0 ? times[k - 1] : times[0], times[kd]);
                double hi = times[std::min(k_end + 1, times.size() - 1)];
                size_t fine = std::max<size_t>(2001, 200 * (k_end - k + 2));
                for (size_t s = 0; s < fine; ++s) {
                    double t = lo + (hi - lo) * double(s) / double(fine - 1);
                    if (evaluator(t) >= threshold) return t;
                }
            } else {
                for (size_t s = k; s <= k_end; ++s)
                    if (vals[s] >= threshold) return times[s];
            }
            k = k_end + 1;
        }
        ++k;
    }
    return std::nullopt;
}

} // namespace toric
