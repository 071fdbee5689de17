#include "ultrawalk/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <utility>

#include "ultrawalk/analysis.hpp"
#include "ultrawalk/error.hpp"
#include "ultrawalk/evolve.hpp"
#include "ultrawalk/rg.hpp"
#include "ultrawalk/walls.hpp"

namespace ultrawalk::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

using Config = std::vector<std::pair<std::string, std::string>>;

std::int64_t parse_int(std::string_view s, std::string_view what) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc{} || r.ptr != end)
        throw ConfigError(fmt::format("bad {} '{}'", what, s));
    return v;
}

double parse_real(std::string_view s) {
    const std::string str(s);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size() || !std::isfinite(v))
        throw ConfigError(fmt::format("bad number '{}'", s));
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output helpers.

std::string header(std::string_view command, const Config& cfg) {
    std::string h = fmt::format("# ultrawalk {}\n# command: {}\n", kVersion, command);
    for (const auto& [k, v] : cfg) h += fmt::format("# {}: {}\n", k, v);
    return h;
}

ordered_json meta(std::string_view command, const Config& cfg) {
    ordered_json m;
    m["artifact"] = "ultrawalk";
    m["version"] = kVersion;
    m["command"] = command;
    ordered_json c = ordered_json::object();
    for (const auto& [k, v] : cfg) c[k] = v;
    m["config"] = std::move(c);
    return m;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError(fmt::format("cannot write {}", p.string()));
    f << content;
    if (!f) throw ConfigError(fmt::format("failed writing {}", p.string()));
}

fs::path prepare_dir(const std::string& out) {
    fs::path p(out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ConfigError(fmt::format("cannot create output directory {}: {}", out, ec.message()));
    return p;
}

ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

ordered_json json_complex(const Cplx& c) { return ordered_json::array({json_number(c.real()), json_number(c.imag())}); }

std::string format_ic(const Vec2c& v) {
    return fmt::format("{},{},{},{}", format_double(v.up.real()), format_double(v.up.imag()),
                       format_double(v.down.real()), format_double(v.down.imag()));
}

// ---------------------------------------------------------------------------
// Shared option sets.

struct WalkOptions {
    std::string flavor = "quantum";
    double epsilon = 0.5;
    double eta0 = -1.0; // flavor default when negative
    bool persistent = false;
    std::string ic = "default";
    int origin_level = -1;

    CoinHierarchy hierarchy() const {
        const Flavor f = parse_flavor(flavor);
        const double e0 = eta0 >= 0.0 ? eta0
                          : (f == Flavor::stochastic ? kDefaultStochasticEta0 : kDefaultUnitaryEta0);
        CoinHierarchy h(e0, epsilon, f, persistent ? Persistence::persistent : Persistence::anti_persistent);
        if (origin_level >= 0) h = h.with_origin_level(origin_level);
        return h;
    }

    void add_to(const CoinHierarchy& h, Config& cfg, const Vec2c& psi) const {
        cfg.emplace_back("flavor", std::string(to_string(h.flavor())));
        cfg.emplace_back("epsilon", format_double(h.epsilon()));
        cfg.emplace_back("eta0", format_double(h.eta0()));
        cfg.emplace_back("persistence", persistent ? "persistent" : "anti-persistent");
        cfg.emplace_back("ic", format_ic(psi));
        if (origin_level >= 0) cfg.emplace_back("origin_level", std::to_string(origin_level));
    }
};

void add_walk_options(CLI::App* app, WalkOptions& w) {
    app->add_option("--flavor", w.flavor, "classical|quantum (stochastic|unitary)")->capture_default_str();
    app->add_option("--epsilon", w.epsilon, "barrier ratio in (0, 1]")->capture_default_str();
    app->add_option("--eta0", w.eta0, "level-0 coin parameter (default: 0.45 classical, pi/4 quantum)");
    app->add_flag("--persistent", w.persistent, "classical persistent variant");
    app->add_option("--ic", w.ic, "initial coin state: default or re+,im+,re-,im-")->capture_default_str();
    app->add_option("--origin-level", w.origin_level, "hierarchy level of x = 0 (default: truncation level)");
}

struct SimOptions {
    std::int64_t t_max = 4096;
    std::string sample = "dyadic";
    int truncation = -1;
    std::int64_t x0 = 0;
};

void add_sim_options(CLI::App* app, SimOptions& s) {
    app->add_option("--tmax", s.t_max, "number of time steps")->capture_default_str();
    app->add_option("--sample", s.sample, "dyadic | linear:<n> | list:t1,t2,...")->capture_default_str();
    app->add_option("--L", s.truncation, "truncation level (default: fits tmax)");
    app->add_option("--x0", s.x0, "start site")->capture_default_str();
}

struct SimRun {
    CoinHierarchy hierarchy;
    Vec2c psi;
    int truncation;
    std::vector<PdfSnapshot> snapshots;
};

SimRun run_simulation(const WalkOptions& w, const SimOptions& s, Config& cfg,
                      std::vector<std::int64_t> times) {
    const CoinHierarchy h = w.hierarchy();
    const Vec2c psi = parse_ic(w.ic, h.flavor());
    if (s.t_max < 1) throw ConfigError("--tmax must be positive");
    const int L = s.truncation > 0 ? s.truncation : open_truncation_level(s.t_max + std::abs(s.x0));
    const Lattice lat = open_lattice(L);
    w.add_to(h, cfg, psi);
    cfg.emplace_back("tmax", std::to_string(s.t_max));
    cfg.emplace_back("sample", s.sample);
    cfg.emplace_back("L", std::to_string(L));
    cfg.emplace_back("x0", std::to_string(s.x0));
    WalkState st = init_point(s.x0, psi, h.flavor(), lat, Boundary::open);
    auto snaps = evolve(std::move(st), h, L, s.t_max, std::move(times));
    return {h, psi, L, std::move(snaps)};
}

int cmd_simulate(const WalkOptions& w, const SimOptions& s, const std::string& out) {
    Config cfg;
    const auto times = parse_schedule(s.sample, s.t_max);
    parse_ic(w.ic, w.hierarchy().flavor());
    const fs::path dir = prepare_dir(out);
    const SimRun run = run_simulation(w, s, cfg, times);
    const std::string head = header("simulate", cfg);

    std::string moments = head + "t,mean,msd,norm\n";
    for (const auto& p : run.snapshots) {
        std::string body = head;
        body += fmt::format("# t: {}\n", p.t);
        body += "x,rho,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus\n";
        const std::int64_t x_hi = p.x_min + static_cast<std::int64_t>(p.rho.size()) - 1;
        const std::int64_t lo = std::max(p.x_min, p.x0 - p.t);
        const std::int64_t hi = std::min(x_hi, p.x0 + p.t);
        for (std::int64_t x = lo; x <= hi; ++x) {
            const auto i = static_cast<std::size_t>(x - p.x_min);
            const Vec2c& v = p.psi[i];
            body += fmt::format("{},{},{},{},{},{}\n", x, format_double(p.rho[i]),
                                format_double(v.up.real()), format_double(v.up.imag()),
                                format_double(v.down.real()), format_double(v.down.imag()));
        }
        write_file(dir / fmt::format("pdf_{}.csv", p.t), body);
        moments += fmt::format("{},{},{},{}\n", p.t, format_double(p.mean), format_double(p.msd),
                               format_double(p.norm));
    }
    write_file(dir / "moments.csv", moments);
    return kOk;
}

int cmd_collapse(const WalkOptions& w, const SimOptions& s, double dw_override, bool half,
                 const std::string& out) {
    Config cfg;
    const auto times = parse_schedule(s.sample, s.t_max);
    const CoinHierarchy h = w.hierarchy();
    parse_ic(w.ic, h.flavor());
    const fs::path dir = prepare_dir(out);
    double dw = dw_override;
    if (dw_override <= 0.0) {
        dw = h.flavor() == Flavor::unitary ? rg::dw_quantum(h.epsilon()) : rg::dw_classical(h.epsilon());
    }
    const SimRun run = run_simulation(w, s, cfg, times);
    cfg.emplace_back("dw", format_double(dw));
    cfg.emplace_back("dw_source", dw_override > 0.0 ? "override" : "theory");
    cfg.emplace_back("half", half ? "true" : "false");

    std::string body = header("collapse", cfg) + "t,u,g\n";
    for (const auto& p : run.snapshots) {
        if (p.t < 1) continue;
        const CollapseSeries c = rescale_collapse(p, dw, half);
        const double reach = static_cast<double>(p.t);
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            if (std::abs(static_cast<double>(c.x[i] - p.x0)) > reach) continue;
            body += fmt::format("{},{},{}\n", p.t, format_double(c.points[i].u),
                                format_double(c.points[i].g));
        }
    }
    write_file(dir / "collapse.csv", body);
    return kOk;
}

// ---------------------------------------------------------------------------
// rg

struct GridOptions {
    double start = 0.01;
    double stop = 0.99;
    int count = 99;
    std::string branches = "quantum-autonomous,classical-transformed,classical-diffusive,"
                           "bernoulli-correlated,quantum-transformed";
};

std::vector<double> epsilon_grid(const GridOptions& g) {
    if (g.count < 1) throw ConfigError("--eps-count must be positive");
    if (!(g.start > 0.0 && g.start <= 1.0 && g.stop > 0.0 && g.stop <= 1.0))
        throw ConfigError("epsilon grid must lie in (0, 1]");
    if (g.count == 1) return {g.start};
    std::vector<double> out;
    for (int i = 0; i < g.count; ++i)
        out.push_back((g.start * (g.count - 1 - i) + g.stop * i) / (g.count - 1));
    return out;
}

ordered_json fixed_point_row(rg::Branch b, double e) {
    ordered_json row;
    row["branch"] = rg::to_string(b);
    row["epsilon"] = e;
    try {
        const auto r = rg::find_fixed_point(b, e, rg::default_guess(b, e));
        row["converged"] = true;
        row["fp"] = ordered_json::array({json_complex(r.fp[0]), json_complex(r.fp[1])});
        row["eigenvalues"] =
            ordered_json::array({json_complex(r.eigenvalues[0]), json_complex(r.eigenvalues[1])});
        row["dw"] = json_number(r.dw);
        row["dw_rule"] = r.dw_rule == rg::DwRule::log2_geometric_mean ? "log2_geometric_mean"
                                                                       : "log2_lambda_max";
        row["physical"] = r.physical;
        row["residual"] = r.residual;
        row["iterations"] = r.iterations;
        row["jacobian_fd_deviation"] = r.jacobian_fd_deviation;
    } catch (const std::exception& ex) {
        row["converged"] = false;
        row["error"] = ex.what();
        row["physical"] = false;
    }
    return row;
}

template <class F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned workers = sweep_threads(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

int cmd_rg(const GridOptions& g, const std::string& out) {
    const auto grid = epsilon_grid(g);
    std::vector<rg::Branch> branches;
    for (auto name : split(g.branches, ',')) {
        const auto b = rg::parse_branch(name);
        if (!rg::is_autonomous(b))
            throw ConfigError(fmt::format("branch {} has no autonomous map", name));
        branches.push_back(b);
    }
    const fs::path dir = prepare_dir(out);
    Config cfg{{"eps_start", format_double(g.start)},
               {"eps_stop", format_double(g.stop)},
               {"eps_count", std::to_string(g.count)},
               {"branches", g.branches}};

    // One slot per (epsilon, branch); filled in parallel, written in order.
    std::vector<ordered_json> rows(grid.size() * branches.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        rows[i] = fixed_point_row(branches[i % branches.size()], grid[i / branches.size()]);
    });

    ordered_json doc;
    doc["meta"] = meta("rg", cfg);
    doc["fixed_points"] = std::move(rows);
    write_file(dir / "fixed_points.json", doc.dump(2) + "\n");

    std::string csv = header("rg", cfg) + "epsilon,inv_dw_classical,inv_dw_quantum,inv_dw_lambda_plus\n";
    for (double e : grid) {
        csv += fmt::format("{},{},{},{}\n", format_double(e), format_double(1.0 / rg::dw_classical(e)),
                           format_double(1.0 / rg::dw_quantum(e)),
                           format_double(1.0 / rg::dw_lambda_plus(e)));
    }
    write_file(dir / "dw_curve.csv", csv);
    return kOk;
}

// ---------------------------------------------------------------------------
// absorb

struct AbsorbOptions {
    int level = 4;
    std::int64_t t_max = 10000000;
    double tail_tol = 1e-10;
    std::int64_t stride = 0;
};

ordered_json walls_json(const WallAmplitudes& w) {
    ordered_json j;
    j["F_left"] = w.F_left;
    j["F_right"] = w.F_right;
    j["psi_left"] = ordered_json::array({json_complex(w.psi_left.up), json_complex(w.psi_left.down)});
    j["psi_right"] = ordered_json::array({json_complex(w.psi_right.up), json_complex(w.psi_right.down)});
    j["probabilistic"] = w.probabilistic;
    return j;
}

int cmd_absorb(const WalkOptions& w, const AbsorbOptions& a, const std::string& out) {
    const CoinHierarchy h = w.hierarchy();
    const Vec2c psi = parse_ic(w.ic, h.flavor());
    if (a.level < 2 || a.level > 30) throw ConfigError("--level must lie in [2, 30]");
    if (a.t_max < 1) throw ConfigError("--tmax must be positive");
    if (!(a.tail_tol > 0.0)) throw ConfigError("--tail-tol must be positive");
    if (a.stride < 0) throw ConfigError("--stride must be non-negative");
    const fs::path dir = prepare_dir(out);

    Config cfg;
    w.add_to(h, cfg, psi);
    cfg.emplace_back("level", std::to_string(a.level));
    cfg.emplace_back("tmax", std::to_string(a.t_max));
    cfg.emplace_back("tail_tol", format_double(a.tail_tol));
    cfg.emplace_back("stride", std::to_string(a.stride));

    const AbsorptionRecord rec = run_absorbing(a.level, h, psi, a.t_max, a.tail_tol, a.stride);
    std::string csv = header("absorb", cfg) + "t,cum_left,cum_right,interior\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        csv += fmt::format("{},{},{},{}\n", rec.times[i], format_double(rec.cumulative_left[i]),
                           format_double(rec.cumulative_right[i]), format_double(rec.interior[i]));
    }
    write_file(dir / "absorption.csv", csv);

    ordered_json doc;
    doc["meta"] = meta("absorb", cfg);
    if (h.flavor() == Flavor::stochastic) {
        auto pred = walls_json(rg_wall_amplitudes_precise(a.level, h, psi));
        pred["method"] = "rg-z1-extended-precision";
        doc["rg_prediction"] = std::move(pred);
        if (h.persistence() == Persistence::anti_persistent && h.epsilon() <= 0.5) {
            auto lim = walls_json(classical_wall_closed_form(h.epsilon(), psi));
            lim["method"] = "closed-form-large-l";
            doc["closed_form"] = std::move(lim);
        }
    } else {
        auto pred = walls_json(rg_wall_amplitudes(a.level, h, psi));
        pred["method"] = "rg-z1-amplitude-diagnostic";
        doc["rg_prediction"] = std::move(pred);
    }
    ordered_json sim;
    sim["cum_left"] = rec.cumulative_left.back();
    sim["cum_right"] = rec.cumulative_right.back();
    sim["interior"] = rec.interior.back();
    sim["total"] = rec.cumulative_left.back() + rec.cumulative_right.back();
    sim["t_final"] = rec.times.back();
    sim["converged"] = rec.converged;
    doc["simulated"] = std::move(sim);
    write_file(dir / "wall_summary.json", doc.dump(2) + "\n");
    return kOk;
}

} // namespace

std::vector<std::int64_t> parse_schedule(std::string_view text, std::int64_t t_max) {
    if (t_max < 1) throw ConfigError("t_max must be positive");
    if (text == "dyadic") return dyadic_times(t_max);
    if (text.rfind("linear:", 0) == 0) {
        const std::int64_t n = parse_int(text.substr(7), "sample count");
        if (n < 1 || n > t_max) throw ConfigError("linear sample count must lie in [1, tmax]");
        std::vector<std::int64_t> out;
        for (std::int64_t i = 1; i <= n; ++i) out.push_back(i * t_max / n);
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    if (text.rfind("list:", 0) == 0) {
        std::vector<std::int64_t> out;
        for (auto item : split(text.substr(5), ',')) {
            const std::int64_t t = parse_int(item, "sample time");
            if (t < 0 || t > t_max) throw ConfigError(fmt::format("sample time {} outside [0, tmax]", t));
            out.push_back(t);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    throw ConfigError(fmt::format("unknown sample schedule '{}'", text));
}

Vec2c parse_ic(std::string_view text, Flavor flavor) {
    if (text == "default") return default_ic(flavor);
    const auto parts = split(text, ',');
    if (parts.size() != 4) throw ConfigError("--ic needs four numbers re+,im+,re-,im-");
    const Vec2c v{{parse_real(parts[0]), parse_real(parts[1])}, {parse_real(parts[2]), parse_real(parts[3])}};
    if (flavor == Flavor::stochastic &&
        (v.up.imag() != 0.0 || v.down.imag() != 0.0 || v.up.real() < 0.0 || v.down.real() < 0.0))
        throw ConfigError("classical initial condition must be real and non-negative");
    if (std::abs(site_density(flavor, v) - 1.0) > 1e-12)
        throw ConfigError("initial condition is not normalized");
    return v;
}

unsigned sweep_threads(std::size_t tasks) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ULTRAWALK_THREADS")) {
        const std::string_view s(env);
        unsigned v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec == std::errc{} && r.ptr == s.data() + s.size() && v > 0) n = v;
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Walks on an ultrametric hierarchy of barriers"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    WalkOptions walk;
    SimOptions sim;
    GridOptions grid;
    AbsorbOptions absorb;
    std::string out = ".";
    double dw = -1.0;
    bool half = false;

    auto* simulate = app.add_subcommand("simulate", "evolve an open-boundary walk and write PDFs and moments");
    add_walk_options(simulate, walk);
    add_sim_options(simulate, sim);
    simulate->add_option("--out", out, "output directory")->capture_default_str();

    auto* rgc = app.add_subcommand("rg", "fixed points and walk dimensions over an epsilon grid");
    rgc->add_option("--eps-start", grid.start, "first epsilon of the grid")->capture_default_str();
    rgc->add_option("--eps-stop", grid.stop, "last epsilon of the grid")->capture_default_str();
    rgc->add_option("--eps-count", grid.count, "number of evenly spaced grid points")->capture_default_str();
    rgc->add_option("--branches", grid.branches, "comma-separated autonomous branches")->capture_default_str();
    rgc->add_option("--out", out, "output directory")->capture_default_str();

    auto* absorbc = app.add_subcommand("absorb", "absorption at walls 0 and 2^l");
    add_walk_options(absorbc, walk);
    absorbc->add_option("--level", absorb.level, "system level l")->capture_default_str();
    absorbc->add_option("--tmax", absorb.t_max, "step limit")->capture_default_str();
    absorbc->add_option("--tail-tol", absorb.tail_tol, "stop once interior weight drops below")->capture_default_str();
    absorbc->add_option("--stride", absorb.stride, "record every n steps (0: automatic)")->capture_default_str();
    absorbc->add_option("--out", out, "output directory")->capture_default_str();

    auto* collapse = app.add_subcommand("collapse", "rescaled PDFs for a scaling collapse");
    add_walk_options(collapse, walk);
    add_sim_options(collapse, sim);
    collapse->add_option("--dw", dw, "walk dimension override");
    collapse->add_flag("--half", half, "keep x >= x0 only");
    collapse->add_option("--out", out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(walk, sim, out);
        if (rgc->parsed()) return cmd_rg(grid, out);
        if (absorbc->parsed()) return cmd_absorb(walk, absorb, out);
        if (collapse->parsed()) {
            if (collapse->count("--dw") && !(dw > 0.0)) throw ConfigError("--dw must be positive");
            return cmd_collapse(walk, sim, dw, half, out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    }
    return kConfigError;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"ultrawalk"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace ultrawalk::cli
