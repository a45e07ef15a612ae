#include "toric/config.hpp"

#include "toric/entangle.hpp"
#include "toric/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace toric {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

bool to_ll(const std::string& s, long long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool to_u64(const std::string& s, uint64_t& out) {
    if (s.empty() || s[0] == '-' || s[0] == '+') return false;
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool to_dbl(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (errno == ERANGE || end != s.c_str() + s.size() || !std::isfinite(v)) return false;
    out = v;
    return true;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-')
            return false;
    return true;
}

struct KeyVal {
    std::string value;
    int line = 0;
};
using Section = std::map<std::string, KeyVal>;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"experiment", {"name", "threads", "output_dir"}},
    {"lattices", {"list"}},
    {"grid", {"t_max", "dt"}},
    {"measures",
     {"list", "block_region", "fidelity_region", "sector_pair", "tavg_window_min",
      "recurrence_threshold"}},
    {"quench", {"name", "basis", "h", "J", "J1", "J2", "disorder_seed"}},
    {"krylov", {"dim", "tol"}},
};

// Which [quench] keys each named quench accepts besides `name`.
const std::map<std::string, std::set<std::string>> kQuenchKeys = {
    {"H0", {}},
    {"H1", {"basis", "h", "disorder_seed"}},
    {"H2", {"basis", "J", "disorder_seed"}},
    {"H3", {"J1", "J2"}},
    {"H4", {"h"}},
    {"H5", {"J1", "J2"}},
};

const std::set<std::string> kMeasureNames = {"overlap", "s_topo", "fidelity", "block_entropy"};

// One sampling point per grid step plus t = 0; beyond this the CSVs stop
// being useful and the run time is dominated by I/O.
constexpr double kMaxGridSamples = 2e6;

ExperimentConfig parse_impl(std::istream& in, std::vector<std::string>& errors,
                            int& size_limited) {
    ExperimentConfig cfg;

    auto err = [&](int line, const std::string& msg) {
        errors.push_back("line " + std::to_string(line) + ": " + msg);
    };
    auto err0 = [&](const std::string& msg) { errors.push_back(msg); };

    // ---- raw scan: sections of key = value, '#' or ';' starts a comment ----
    std::map<std::string, Section> fixed;
    std::vector<std::pair<int, Section>> quenches; // header line + keys
    std::set<std::string> opened;
    std::string cur;           // "" before any header, "!" inside a discarded one
    Section* cur_kv = nullptr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (size_t cut = line.find_first_of("#;"); cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                err(lineno, "unterminated section header");
                cur = "!";
                cur_kv = nullptr;
                continue;
            }
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "quench") {
                quenches.emplace_back(lineno, Section{});
                cur_kv = &quenches.back().second;
                cur = "quench";
            } else if (kKnownKeys.count(name)) {
                if (!opened.insert(name).second) {
                    err(lineno, "section [" + name + "] appears more than once");
                    cur = "!";
                    cur_kv = nullptr;
                } else {
                    cur_kv = &fixed[name];
                    cur = name;
                }
            } else {
                err(lineno, "unknown section [" + name + "]");
                cur = "!";
                cur_kv = nullptr;
            }
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            err(lineno, "expected 'key = value' or '[section]'");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) {
            err(lineno, "empty key");
            continue;
        }
        if (cur.empty()) {
            err(lineno, "key '" + key + "' outside any section");
            continue;
        }
        if (cur == "!") continue; // the bad header was already reported
        if (!kKnownKeys.at(cur).count(key)) {
            err(lineno, "unknown key '" + key + "' in [" + cur + "]");
            continue;
        }
        if (val.empty()) {
            err(lineno, "empty value for '" + key + "'");
            continue;
        }
        auto [it, fresh] = cur_kv->emplace(key, KeyVal{val, lineno});
        if (!fresh)
            err(lineno, "duplicate key '" + key + "' in [" + cur + "] (first set on line " +
                            std::to_string(it->second.line) + ")");
    }

    auto get = [&](const char* sec, const char* key) -> const KeyVal* {
        auto s = fixed.find(sec);
        if (s == fixed.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };

    // ---- [experiment] ----
    if (const KeyVal* kv = get("experiment", "name")) {
        if (valid_name(kv->value))
            cfg.name = kv->value;
        else
            err(kv->line, "name must use only letters, digits, '.', '_', '-'");
    }
    if (const KeyVal* kv = get("experiment", "threads")) {
        long long v;
        if (to_ll(kv->value, v) && v >= 1 && v <= 256)
            cfg.threads = static_cast<int>(v);
        else
            err(kv->line, "threads must be an integer in [1, 256]");
    }
    if (const KeyVal* kv = get("experiment", "output_dir")) cfg.output_dir = kv->value;

    // ---- [lattices] ----
    if (const KeyVal* kv = get("lattices", "list")) {
        std::vector<std::string> toks = split_ws(kv->value);
        if (toks.empty()) err(kv->line, "[lattices] list needs at least one MxN entry");
        for (const std::string& tok : toks) {
            long long m = 0, n = 0;
            size_t x = tok.find('x');
            bool ok = x != std::string::npos && to_ll(tok.substr(0, x), m) &&
                      to_ll(tok.substr(x + 1), n);
            if (!ok) {
                err(kv->line, "bad lattice '" + tok + "' (expected MxN, e.g. 2x3)");
            } else if (m < 2 || n < 2) {
                err(kv->line, "lattice " + tok + ": both dimensions must be at least 2");
            } else if (m > 12 || n > 12 || 2 * m * n > kMaxSpins) {
                err(kv->line, "lattice " + tok + " exceeds the " + std::to_string(kMaxSpins) +
                                  "-spin cap");
                ++size_limited;
            } else if (std::find(cfg.lattices.begin(), cfg.lattices.end(),
                                 std::make_pair(int(m), int(n))) != cfg.lattices.end()) {
                err(kv->line, "duplicate lattice " + tok);
            } else {
                cfg.lattices.emplace_back(int(m), int(n));
            }
        }
    } else {
        err0("missing [lattices] list = MxN ...");
    }

    // ---- [grid] ----
    bool grid_ok = true;
    if (const KeyVal* kv = get("grid", "t_max")) {
        double v;
        if (to_dbl(kv->value, v) && v > 0)
            cfg.grid.t_max = v;
        else {
            err(kv->line, "t_max must be a positive number");
            grid_ok = false;
        }
    }
    if (const KeyVal* kv = get("grid", "dt")) {
        double v;
        if (to_dbl(kv->value, v) && v > 0)
            cfg.grid.dt = v;
        else {
            err(kv->line, "dt must be a positive number");
            grid_ok = false;
        }
    }
    if (grid_ok) {
        if (cfg.grid.t_max < cfg.grid.dt)
            err0("t_max must be at least dt");
        else if (cfg.grid.t_max / cfg.grid.dt + 1 > kMaxGridSamples)
            err0("grid would have more than 2e6 samples; raise dt or lower t_max");
    }

    // ---- [measures] ----
    if (const KeyVal* kv = get("measures", "list")) {
        std::vector<std::string> toks = split_ws(kv->value);
        if (toks.empty()) err(kv->line, "[measures] list needs at least one measure");
        for (const std::string& tok : toks) {
            if (!kMeasureNames.count(tok))
                err(kv->line,
                    "unknown measure '" + tok + "' (overlap, s_topo, fidelity, block_entropy)");
            else if (std::find(cfg.measures.list.begin(), cfg.measures.list.end(), tok) !=
                     cfg.measures.list.end())
                err(kv->line, "duplicate measure '" + tok + "'");
            else
                cfg.measures.list.push_back(tok);
        }
    } else {
        err0("missing [measures] list (overlap, s_topo, fidelity, block_entropy)");
    }

    auto parse_region = [&](const KeyVal& kv, const char* what) -> std::optional<Region> {
        Region region;
        for (const std::string& tok : split_ws(kv.value)) {
            long long e;
            if (!to_ll(tok, e) || e < 0 || e >= kMaxSpins) {
                err(kv.line, std::string(what) + ": bad edge id '" + tok + "'");
                return std::nullopt;
            }
            if (std::find(region.begin(), region.end(), int(e)) != region.end()) {
                err(kv.line, std::string(what) + ": duplicate edge " + tok);
                return std::nullopt;
            }
            region.push_back(int(e));
        }
        if (region.empty()) {
            err(kv.line, std::string(what) + " needs at least one edge id");
            return std::nullopt;
        }
        std::sort(region.begin(), region.end());
        return region;
    };

    bool block_ok = true; // defaults stay valid when the key is absent
    if (const KeyVal* kv = get("measures", "block_region")) {
        if (auto r = parse_region(*kv, "block_region"))
            cfg.measures.block_region = *r;
        else
            block_ok = false;
    }
    bool fid_explicit = false;
    if (const KeyVal* kv = get("measures", "fidelity_region")) {
        if (trim(kv->value) == "auto") {
            cfg.measures.fidelity_region.reset();
        } else if (auto r = parse_region(*kv, "fidelity_region")) {
            cfg.measures.fidelity_region = *r;
            fid_explicit = true;
        }
    }
    bool pair_ok = true;
    if (const KeyVal* kv = get("measures", "sector_pair")) {
        std::vector<std::string> toks = split_ws(kv->value);
        SectorLabel lab[2];
        bool ok = toks.size() == 2;
        for (int k = 0; ok && k < 2; ++k) {
            size_t c = toks[k].find(',');
            long long i = -1, j = -1;
            ok = c != std::string::npos && to_ll(toks[k].substr(0, c), i) &&
                 to_ll(toks[k].substr(c + 1), j) && (i == 0 || i == 1) && (j == 0 || j == 1);
            lab[k] = {int(i), int(j)};
        }
        if (ok) {
            cfg.measures.sector_a = lab[0];
            cfg.measures.sector_b = lab[1];
        } else {
            err(kv->line, "sector_pair must be two labels i,j with i,j in {0,1}, e.g. 0,0 1,0");
            pair_ok = false;
        }
    }
    if (const KeyVal* kv = get("measures", "tavg_window_min")) {
        double v;
        if (to_dbl(kv->value, v) && v >= 0)
            cfg.measures.tavg_window_min = v;
        else
            err(kv->line, "tavg_window_min must be a nonnegative number");
    }
    if (const KeyVal* kv = get("measures", "recurrence_threshold")) {
        double v;
        if (to_dbl(kv->value, v) && v > 0 && v <= 1)
            cfg.measures.recurrence_threshold = v;
        else
            err(kv->line, "recurrence_threshold must lie in (0, 1]");
    }
    if (grid_ok && cfg.measures.tavg_window_min >= cfg.grid.t_max)
        err0("tavg_window_min must be below t_max");

    // ---- [quench] sections ----
    if (quenches.empty()) err0("at least one [quench] section is required");
    for (const auto& [hline, sec] : quenches) {
        auto nit = sec.find("name");
        if (nit == sec.end()) {
            err(hline, "[quench] needs name = H0..H5");
            continue;
        }
        QuenchSpec q;
        q.name = nit->second.value;
        auto allowed = kQuenchKeys.find(q.name);
        if (allowed == kQuenchKeys.end()) {
            err(nit->second.line, "unknown quench '" + q.name + "' (H0..H5)");
            continue;
        }
        bool ok = true;
        for (const auto& [key, kv] : sec) {
            if (key == "name") continue;
            if (!allowed->second.count(key)) {
                err(kv.line, "key '" + key + "' does not apply to " + q.name);
                ok = false;
                continue;
            }
            if (key == "basis") {
                std::string b = kv.value;
                if (b == "Z" || b == "z" || b == "X" || b == "x") {
                    q.basis = static_cast<char>(std::toupper(static_cast<unsigned char>(b[0])));
                } else {
                    err(kv.line, "basis must be Z or X");
                    ok = false;
                }
            } else if (key == "disorder_seed") {
                uint64_t v;
                if (to_u64(kv.value, v)) {
                    q.disorder_seed = v;
                } else {
                    err(kv.line, "disorder_seed must be a nonnegative integer");
                    ok = false;
                }
            } else { // h, J, J1, J2
                double v;
                if (!to_dbl(kv.value, v)) {
                    err(kv.line, key + " must be a finite number");
                    ok = false;
                } else if (key == "h") {
                    q.h = v;
                } else if (key == "J") {
                    q.J = v;
                } else if (key == "J1") {
                    q.J1 = v;
                } else {
                    q.J2 = v;
                }
            }
        }
        if (ok) cfg.quenches.push_back(std::move(q));
    }
    for (size_t k = 1; k < cfg.quenches.size(); ++k)
        if (cfg.quenches[k].name != cfg.quenches[0].name) {
            err0("all [quench] sections must share one quench name (found " +
                 cfg.quenches[0].name + " and " + cfg.quenches[k].name +
                 "); variants differ only in couplings or seeds");
            break;
        }

    // ---- [krylov] ----
    if (const KeyVal* kv = get("krylov", "dim")) {
        long long v;
        if (to_ll(kv->value, v) && v >= 2 && v <= 200)
            cfg.krylov.dim = static_cast<int>(v);
        else
            err(kv->line, "krylov dim must be an integer in [2, 200]");
    }
    if (const KeyVal* kv = get("krylov", "tol")) {
        double v;
        if (to_dbl(kv->value, v) && v > 0 && v <= 1)
            cfg.krylov.tol = v;
        else
            err(kv->line, "krylov tol must lie in (0, 1]");
    }

    // ---- cross checks that need the assembled lattice list ----
    if (!cfg.lattices.empty()) {
        auto spins = [](const std::pair<int, int>& mn) { return 2 * mn.first * mn.second; };
        auto smallest = *std::min_element(cfg.lattices.begin(), cfg.lattices.end(),
                                          [&](auto a, auto b) { return spins(a) < spins(b); });
        auto largest = *std::max_element(cfg.lattices.begin(), cfg.lattices.end(),
                                         [&](auto a, auto b) { return spins(a) < spins(b); });

        if (block_ok && cfg.measures.block_region.back() >= spins(smallest))
            err0("block_region edge " + std::to_string(cfg.measures.block_region.back()) +
                 " is out of range for the smallest lattice " + std::to_string(smallest.first) +
                 "x" + std::to_string(smallest.second) + " (" + std::to_string(spins(smallest)) +
                 " edges)");

        bool want_fid = std::find(cfg.measures.list.begin(), cfg.measures.list.end(),
                                  "fidelity") != cfg.measures.list.end();
        if (want_fid && pair_ok) {
            // Fidelity runs on the largest lattice only, so the region and the
            // sector pair are checked against that one.
            Lattice lat(largest.first, largest.second);
            Region region = cfg.measures.fidelity_region ? *cfg.measures.fidelity_region
                                                         : default_fidelity_region(lat);
            if (fid_explicit && region.back() >= lat.num_edges()) {
                err0("fidelity_region edge " + std::to_string(region.back()) +
                     " is out of range for the largest lattice " + std::to_string(largest.first) +
                     "x" + std::to_string(largest.second) + " (" +
                     std::to_string(lat.num_edges()) + " edges)");
            } else {
                FlipGroup grp = enumerate_group(lat);
                if (!pair_indistinguishable(lat, grp, region, cfg.measures.sector_a,
                                            cfg.measures.sector_b))
                    err0("fidelity_region distinguishes the configured sectors on the largest "
                         "lattice " +
                         std::to_string(largest.first) + "x" + std::to_string(largest.second) +
                         ": the loop separating them cannot be deformed off the region, so the "
                         "sector states are not locally identical at t = 0");
            }
        }
    }

    return cfg;
}

} // namespace

ExperimentConfig parse_config(std::istream& in, std::vector<std::string>& errors) {
    int size_limited = 0;
    return parse_impl(in, errors, size_limited);
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::vector<std::string> errors;
    int size_limited = 0;
    ExperimentConfig cfg = parse_impl(in, errors, size_limited);
    if (!errors.empty()) {
        std::string joined;
        for (size_t k = 0; k < errors.size(); ++k) {
            if (k) joined += '\n';
            joined += errors[k];
        }
        if (size_limited == static_cast<int>(errors.size())) throw SizeLimitError(joined);
        throw ConfigError(joined);
    }
    return cfg;
}

ExperimentConfig preset_config(const std::string& which) {
    ExperimentConfig cfg;
    cfg.measures.list = {"overlap", "s_topo", "fidelity"};
    cfg.grid = {20.0, 0.05};
    if (which == "fig1") {
        cfg.name = "fig1";
        cfg.lattices = {{2, 2}, {2, 3}};
        QuenchSpec q;
        q.name = "H3";
        q.J1 = 0.33;
        q.J2 = 1.0;
        cfg.quenches = {q};
    } else if (which == "fig2") {
        cfg.name = "fig2";
        cfg.lattices = {{2, 2}, {2, 3}, {3, 3}};
        QuenchSpec q;
        q.name = "H4";
        q.h = 0.34;
        cfg.quenches = {q};
    } else if (which == "fig3") {
        cfg.name = "fig3";
        cfg.lattices = {{2, 2}, {2, 3}};
        QuenchSpec weak, strong;
        weak.name = strong.name = "H5";
        weak.J1 = weak.J2 = 0.033;
        strong.J1 = strong.J2 = 3.3;
        cfg.quenches = {weak, strong};
    } else {
        throw ConfigError("unknown preset '" + which + "' (fig1, fig2, fig3)");
    }
    return cfg;
}

std::string echo_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[experiment]\nname = " << cfg.name << "\nthreads = " << cfg.threads << "\n";
    if (!cfg.output_dir.empty()) os << "output_dir = " << cfg.output_dir << "\n";

    os << "\n[lattices]\nlist =";
    for (const auto& [m, n] : cfg.lattices) os << ' ' << m << 'x' << n;

    os << "\n\n[grid]\nt_max = " << format_double(cfg.grid.t_max)
       << "\ndt = " << format_double(cfg.grid.dt) << "\n";

    os << "\n[measures]\nlist =";
    for (const std::string& m : cfg.measures.list) os << ' ' << m;
    os << "\nblock_region =";
    for (int e : cfg.measures.block_region) os << ' ' << e;
    os << "\nfidelity_region =";
    if (cfg.measures.fidelity_region)
        for (int e : *cfg.measures.fidelity_region) os << ' ' << e;
    else
        os << " auto";
    os << "\nsector_pair = " << cfg.measures.sector_a.i << ',' << cfg.measures.sector_a.j << ' '
       << cfg.measures.sector_b.i << ',' << cfg.measures.sector_b.j
       << "\ntavg_window_min = " << format_double(cfg.measures.tavg_window_min)
       << "\nrecurrence_threshold = " << format_double(cfg.measures.recurrence_threshold) << "\n";

    for (const QuenchSpec& q : cfg.quenches) {
        os << "\n[quench]\nname = " << q.name << "\n";
        if (q.name == "H1" || q.name == "H2") os << "basis = " << q.basis << "\n";
        if (q.name == "H1" || q.name == "H4") os << "h = " << format_double(q.h) << "\n";
        if (q.name == "H2") os << "J = " << format_double(q.J) << "\n";
        if (q.name == "H3" || q.name == "H5")
            os << "J1 = " << format_double(q.J1) << "\nJ2 = " << format_double(q.J2) << "\n";
        if (q.disorder_seed) os << "disorder_seed = " << *q.disorder_seed << "\n";
    }

    os << "\n[krylov]\ndim = " << cfg.krylov.dim << "\ntol = " << format_double(cfg.krylov.tol)
       << "\n";
    return os.str();
}

std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("TORIC_QUENCH_OUT"); env && *env)
        return std::string(env) + "/" + cfg.name;
    return "out/" + cfg.name;
}

std::string format_double(double v) {
    char buf[40];
    std::string best;
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v && (best.empty() || std::string(buf).size() < best.size()))
            best = buf;
    }
    if (best.empty()) best = buf; // non-finite values never round-trip
    return best;
}

} // namespace toric
