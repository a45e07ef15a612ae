#pragma once

#include "toric/hamiltonian.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace toric {

// Uniform sampling grid t = 0, dt, 2dt, ... <= t_max (within rounding).
struct TimeGrid {
    double t_max = 20.0;
    double dt = 0.05;
    std::vector<double> times() const; // throws ConfigError on bad parameters
};

struct KrylovOptions {
    int dim = 30;        // Lanczos subspace size per step
    double tol = 1e-10;  // per-step norm drift beyond this aborts
};

// exp(-iHt) specialized by structure: quenches diagonal in the Z (or X) basis
// evolve by pure phases, small systems by full eigendecomposition, and large
// ones by short-step Lanczos with full reorthogonalization.
class Propagator {
public:
    enum class Mode { diag_z, diag_x, dense, krylov };

    Propagator(const Hamiltonian& H, Mode mode, KrylovOptions opts = {});
    static Mode auto_mode(const Hamiltonian& H);
    static Propagator make_auto(const Hamiltonian& H, KrylovOptions opts = {});

    Mode mode() const { return mode_; }

    // |psi(t)> from the initial state in one shot (all modes except krylov).
    cvec at(const cvec& psi0, double t) const;

    // Walk the grid in order, invoking cb(index, t, psi) at every point
    // including t = 0.  Krylov steps sequentially and records norm drift.
    void trajectory(const cvec& psi0, const std::vector<double>& times,
                    const std::function<void(size_t, double, const cvec&)>& cb);

    // Evolve two states through the same grid in lockstep; avoids holding
    // either full trajectory in memory when both are needed per time point.
    void trajectory_pair(const cvec& a0, const cvec& b0, const std::vector<double>& times,
                         const std::function<void(size_t, double, const cvec&, const cvec&)>& cb);

    // Cheap spectral evaluator for |<psi0|psi(t)>|; empty in krylov mode.
    std::function<double(double)> overlap_function(const cvec& psi0) const;

    double max_norm_drift() const { return max_norm_drift_; }

    // dense mode internals, exposed for validation
    const std::vector<double>& eigenvalues() const;
    double reconstruction_error(const Hamiltonian& H) const;

private:
    cvec dense_at(const std::vector<double>& wr, const std::vector<double>& wi, double t) const;
    void project(const cvec& psi0, std::vector<double>& wr, std::vector<double>& wi) const;
    cvec krylov_step(const cvec& psi, double dt);

    Hamiltonian H_;
    Mode mode_;
    KrylovOptions opts_;
    std::vector<double> energies_; // diag modes: per basis label; dense: spectrum
    std::vector<double> vecs_;     // dense mode eigenvectors, column-major
    double max_norm_drift_ = 0.0;
};

// In-place unnormalized Walsh-Hadamard transform; applying it twice scales by the length.
void fwht(cvec& v);

std::vector<double> overlap_series(Propagator& prop, const cvec& psi0,
                                   const std::vector<double>& times);

// First return time of the overlap above the threshold, skipping the initial
// plateau: find the first sample that drops below the threshold, then scan
// later contiguous runs of samples within `margin` of it and refine each run
// on a fine grid via `evaluator` (when supplied) to locate the earliest
// crossing.  Returns nothing when the series never recovers on the grid.
std::optional<double> recurrence_period(const std::vector<double>& times,
                                        const std::vector<double>& vals, double threshold,
                                        const std::function<double(double)>& evaluator = {},
                                        double margin = 0.1);

} // namespace toric
