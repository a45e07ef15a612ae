#include "toric/experiment.hpp"

#include "toric/entangle.hpp"
#include "toric/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>
#include <vector>

namespace toric {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string lattice_tag(std::pair<int, int> mn) {
    return std::to_string(mn.first) + "x" + std::to_string(mn.second);
}

int spin_count(std::pair<int, int> mn) { return 2 * mn.first * mn.second; }

// Parameter columns appended to every row; fixed per quench family so each
// CSV keeps one schema (the parser enforces a single quench name per run).
std::string param_header(const std::string& name) {
    if (name == "H1") return "quench,basis,h,disorder";
    if (name == "H2") return "quench,basis,J,disorder";
    if (name == "H3" || name == "H5") return "quench,J1,J2";
    if (name == "H4") return "quench,h";
    return "quench";
}

std::string param_row(const QuenchSpec& q) {
    std::string seed = q.disorder_seed ? std::to_string(*q.disorder_seed) : "none";
    if (q.name == "H1") return q.name + "," + q.basis + "," + fmt17(q.h) + "," + seed;
    if (q.name == "H2") return q.name + "," + q.basis + "," + fmt17(q.J) + "," + seed;
    if (q.name == "H3" || q.name == "H5")
        return q.name + "," + fmt17(q.J1) + "," + fmt17(q.J2);
    if (q.name == "H4") return q.name + "," + fmt17(q.h);
    return q.name;
}

std::string variant_tag(const QuenchSpec& q) {
    std::ostringstream os;
    os << q.name;
    if (q.name == "H1" || q.name == "H2") os << " basis=" << q.basis;
    if (q.name == "H1" || q.name == "H4") os << " h=" << format_double(q.h);
    if (q.name == "H2") os << " J=" << format_double(q.J);
    if (q.name == "H3" || q.name == "H5")
        os << " J1=" << format_double(q.J1) << " J2=" << format_double(q.J2);
    if (q.disorder_seed) os << " disorder_seed=" << *q.disorder_seed;
    return os.str();
}

double abs_overlap(const cvec& a, const cvec& b) {
    cplx s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
    return std::abs(s);
}

// Shares the expensive spectral decompositions between the measures that hit
// the same (lattice, variant) pair.  Only non-krylov propagators land here;
// their use is read-only, so one instance can serve several worker threads.
class PropCache {
public:
    explicit PropCache(const KrylovOptions& opts) : opts_(opts) {}

    std::shared_ptr<const Propagator> get(std::pair<int, int> mn, size_t variant,
                                          const Hamiltonian& H) {
        std::tuple<int, int, size_t> key{mn.first, mn.second, variant};
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (auto it = map_.find(key); it != map_.end()) return it->second;
        }
        // built outside the lock so distinct lattices decompose in parallel;
        // under a race the first insert wins and the loser is dropped
        auto built = std::make_shared<const Propagator>(Propagator::make_auto(H, opts_));
        std::lock_guard<std::mutex> lock(mu_);
        return map_.emplace(key, built).first->second;
    }

private:
    KrylovOptions opts_;
    std::mutex mu_;
    std::map<std::tuple<int, int, size_t>, std::shared_ptr<const Propagator>> map_;
};

struct JobSpec {
    std::string measure;
    std::pair<int, int> mn;
    bool is_largest = false; // fidelity runs on the largest lattice only
};

struct JobResult {
    std::string csv_name;
    std::string csv_text;
    std::string summary;
    double wall = 0.0;
    std::exception_ptr error;
};

double window_average(const std::vector<double>& times, const std::vector<double>& vals,
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

JobResult run_job(const ExperimentConfig& cfg, const JobSpec& job,
                  const std::vector<double>& times, PropCache& cache) {
    JobResult res;
    const std::string tag = lattice_tag(job.mn);
    std::ostringstream sum;
    sum << "== " << job.measure << " on " << tag << " ==\n";

    if (job.measure == "fidelity" && !job.is_largest) {
        sum << "skipped (not the largest lattice)\n";
        res.summary = sum.str();
        return res;
    }

    Lattice lat(job.mn.first, job.mn.second);
    FlipGroup grp = enumerate_group(lat);
    cvec psi0 = ground_state(lat, grp);
    auto lw_regions = lat.levin_wen_regions();

    Region fid_region;
    if (job.measure == "fidelity") {
        fid_region = cfg.measures.fidelity_region ? *cfg.measures.fidelity_region
                                                  : default_fidelity_region(lat);
        sum << "region =";
        for (int e : fid_region) sum << ' ' << e;
        sum << " (interior stars " << interior_star_count(lat, fid_region) << ", boundary stars "
            << boundary_star_count(lat, fid_region) << ")\n";
    }

    std::ostringstream csv;
    csv << "t," << job.measure << ",lattice," << param_header(cfg.quenches.at(0).name) << "\n";

    const std::string window_label =
        "(" + format_double(cfg.measures.tavg_window_min) + ", " +
        format_double(cfg.grid.t_max) + "]";

    for (size_t v = 0; v < cfg.quenches.size(); ++v) {
        const QuenchSpec& q = cfg.quenches[v];
        Hamiltonian H = build_hamiltonian(lat, q);
        Propagator::Mode mode = Propagator::auto_mode(H);

        std::vector<double> series(times.size(), 0.0);
        std::function<double(double)> evaluator; // spectral overlap, when cheap

        if (job.measure == "fidelity") {
            // reduced states of the two sectors agree at t = 0 exactly when
            // the separating loop deforms off the region; the parser already
            // checked this, but the config may have been built by hand
            if (!pair_indistinguishable(lat, grp, fid_region, cfg.measures.sector_a,
                                        cfg.measures.sector_b))
                throw ConfigError("fidelity region distinguishes the configured sectors on " +
                                  tag);
            cvec pa = sector_state(lat, grp, cfg.measures.sector_a);
            cvec pb = sector_state(lat, grp, cfg.measures.sector_b);
            auto fid_at = [&](size_t k, const cvec& x, const cvec& y) {
                series[k] = uhlmann_from_factors(reduced_factor(x, lat, fid_region),
                                                 reduced_factor(y, lat, fid_region));
            };
            if (mode == Propagator::Mode::krylov) {
                Propagator prop(H, mode, cfg.krylov);
                prop.trajectory_pair(pa, pb, times,
                                     [&](size_t k, double, const cvec& x, const cvec& y) {
                                         fid_at(k, x, y);
                                     });
            } else {
                auto prop = cache.get(job.mn, v, H);
                for (size_t k = 0; k < times.size(); ++k)
                    fid_at(k, prop->at(pa, times[k]), prop->at(pb, times[k]));
            }
        } else {
            std::function<double(const cvec&)> functional;
            if (job.measure == "overlap")
                functional = [&](const cvec& p) { return abs_overlap(psi0, p); };
            else if (job.measure == "s_topo")
                functional = [&](const cvec& p) { return topological_entropy(p, lat, lw_regions); };
            else // block_entropy
                functional = [&](const cvec& p) {
                    return region_entropy_bits(p, lat, cfg.measures.block_region);
                };

            if (mode == Propagator::Mode::krylov) {
                Propagator prop(H, mode, cfg.krylov);
                prop.trajectory(psi0, times, [&](size_t k, double, const cvec& p) {
                    series[k] = functional(p);
                });
            } else {
                auto prop = cache.get(job.mn, v, H);
                if (job.measure == "overlap") {
                    evaluator = prop->overlap_function(psi0);
                    for (size_t k = 0; k < times.size(); ++k) series[k] = evaluator(times[k]);
                } else {
                    for (size_t k = 0; k < times.size(); ++k)
                        series[k] = functional(prop->at(psi0, times[k]));
                }
            }
        }

        const std::string suffix = "," + tag + "," + param_row(q);
        for (size_t k = 0; k < times.size(); ++k)
            csv << fmt17(times[k]) << ',' << fmt17(series[k]) << suffix << '\n';

        sum << variant_tag(q) << ": ";
        if (job.measure == "overlap") {
            double lo = *std::min_element(series.begin(), series.end());
            auto rec = recurrence_period(times, series, cfg.measures.recurrence_threshold,
                                         evaluator);
            sum << "min = " << format_double(lo) << ", recurrence "
                << (rec ? "t = " + format_double(*rec) : std::string("none")) << " (threshold "
                << format_double(cfg.measures.recurrence_threshold) << ")";
        } else if (job.measure == "s_topo") {
            sum << "time-avg " << window_label << " = "
                << format_double(window_average(times, series, cfg.measures.tavg_window_min));
        } else if (job.measure == "block_entropy") {
            double dev = 0.0;
            for (double s : series) dev = std::max(dev, std::abs(s - series[0]));
            sum << "time-avg " << window_label << " = "
                << format_double(window_average(times, series, cfg.measures.tavg_window_min))
                << ", max |S(t) - S(0)| = " << format_double(dev);
        } else { // fidelity
            sum << "min = "
                << format_double(*std::min_element(series.begin(), series.end()));
        }
        sum << "\n";
    }

    res.csv_name = job.measure + "_" + tag + ".csv";
    res.csv_text = csv.str();
    res.summary = sum.str();
    return res;
}

} // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    using clock = std::chrono::steady_clock;
    auto secs = [](clock::duration d) {
        return std::chrono::duration_cast<std::chrono::duration<double>>(d).count();
    };
    auto t_start = clock::now();
    try {
        const std::vector<double> times = cfg.grid.times();

        size_t largest = 0;
        for (size_t i = 1; i < cfg.lattices.size(); ++i)
            if (spin_count(cfg.lattices[i]) > spin_count(cfg.lattices[largest])) largest = i;

        std::vector<JobSpec> jobs;
        for (const std::string& measure : cfg.measures.list)
            for (size_t i = 0; i < cfg.lattices.size(); ++i)
                jobs.push_back({measure, cfg.lattices[i], i == largest});

        PropCache cache(cfg.krylov);
        std::vector<JobResult> results(jobs.size());
        std::atomic<size_t> next{0};
        std::mutex log_mu;
        auto worker = [&]() {
            for (;;) {
                size_t k = next.fetch_add(1);
                if (k >= jobs.size()) return;
                auto t0 = clock::now();
                try {
                    results[k] = run_job(cfg, jobs[k], times, cache);
                } catch (...) {
                    results[k].error = std::current_exception();
                }
                results[k].wall = secs(clock::now() - t0);
                std::lock_guard<std::mutex> lock(log_mu);
                log << "[" << k + 1 << "/" << jobs.size() << "] " << jobs[k].measure << " "
                    << lattice_tag(jobs[k].mn) << (results[k].error ? " failed" : " done") << " ("
                    << format_double(results[k].wall) << " s)\n";
            }
        };

        int pool_size = std::max(1, std::min<int>(cfg.threads, static_cast<int>(jobs.size())));
        if (pool_size <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < pool_size; ++t) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }

        for (const JobResult& r : results)
            if (r.error) std::rethrow_exception(r.error);

        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " +
                                  ec.message());
        for (const JobResult& r : results) {
            if (r.csv_name.empty()) continue;
            std::ofstream f(out_dir + "/" + r.csv_name, std::ios::binary);
            if (!f) throw ConfigError("cannot write " + out_dir + "/" + r.csv_name);
            f << r.csv_text;
        }

        char wall[32];
        std::ofstream s(out_dir + "/summary.txt");
        if (!s) throw ConfigError("cannot write " + out_dir + "/summary.txt");
        s << "toric-quench run: " << cfg.name << "\noutput: " << out_dir << "\n\n"
          << echo_config(cfg) << "\n";
        for (const JobResult& r : results) {
            std::snprintf(wall, sizeof wall, "%.2f", r.wall);
            s << r.summary << "wall " << wall << " s\n\n";
        }
        std::snprintf(wall, sizeof wall, "%.2f", secs(clock::now() - t_start));
        s << "total wall " << wall << " s\n";

        log << "wrote " << out_dir << "/summary.txt\n";
        return 0;
    } catch (const ConvergenceError& e) {
        log << "convergence error: " << e.what() << "\n";
        return 3;
    } catch (const SizeLimitError& e) {
        log << "size limit: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace toric
