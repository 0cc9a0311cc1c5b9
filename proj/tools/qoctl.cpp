// qoctl: batch front end for the qoc library.
//
// Subcommands:
//   eigen            field-free spectrum of a grid system (imaginary time)
//   optimize         run one optimal-control optimization, write artifacts
//   twolevel         pulse-area (RWA) estimate vs optimal control table
//   controllability  Lie-algebra rank analysis of an N-level system
//
// Configuration is a sectioned key=value file ([system], [target],
// [optimizer], [output]); see the recipes/ directory for complete examples.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "qoc/qoc.hpp"

namespace fs = std::filesystem;
using namespace qoc;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    int max_iters_override = -1;
    double j1_floor = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir,
                    "output directory (default: [output] directory or '.')");
    cmd->add_option("--jobs", args.jobs, "concurrent sweep points")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", args.max_iters_override,
                    "override the configured iteration cap");
}

fs::path resolve_out_dir(const RunConfig& cfg, const CommonArgs& args) {
    std::string dir = args.out_dir;
    if (dir.empty()) dir = cfg.get("output", "directory", ".");
    fs::create_directories(dir);
    return dir;
}

double scratch_budget_bytes() {
    const char* env = std::getenv("QOC_SCRATCH_MB");
    const double mb = env ? std::atof(env) : 4096.0;
    return mb * 1024.0 * 1024.0;
}

TimeGrid make_time_grid(const RunConfig& cfg) {
    return TimeGrid(cfg.get_double("system", "t_final"),
                    cfg.get_double("system", "dt"));
}

Potential make_potential(const RunConfig& cfg) {
    const std::string kind = cfg.get("system", "potential", "double_well");
    if (kind == "double_well") {
        AsymmetricDoubleWell w;
        w.B = cfg.get_double("system", "well_B", 1.0);
        w.omega0 = cfg.get_double("system", "well_omega0", 1.0);
        w.beta = cfg.get_double("system", "well_beta", 1.0 / 256.0);
        return Potential(w);
    }
    if (kind == "harmonic") {
        const double w0 = cfg.get_double("system", "omega", 1.0);
        return Potential([w0](double x) { return 0.5 * w0 * w0 * x * x; });
    }
    if (kind == "file") {
        const RMatrix tab = read_matrix(cfg.get("system", "potential_file"));
        if (tab.cols() != 2)
            throw Error("potential file must have two columns: x V");
        TabulatedPotential t;
        for (Eigen::Index i = 0; i < tab.rows(); ++i) {
            t.x.push_back(tab(i, 0));
            t.v.push_back(tab(i, 1));
        }
        return Potential(std::move(t));
    }
    throw Error("unknown potential kind: " + kind);
}

SpatialGrid make_grid(const RunConfig& cfg) {
    return SpatialGrid(cfg.get_double("system", "x_max"),
                       static_cast<int>(cfg.get_int("system", "n_points")));
}

RMatrix config_matrix(const RunConfig& cfg, const std::string& section,
                      const std::string& key) {
    if (cfg.has(section, key + "_file"))
        return read_matrix(cfg.get(section, key + "_file"));
    return parse_matrix(cfg.get(section, key));
}

LevelSystem make_level_system(const RunConfig& cfg) {
    const std::string type = cfg.get("system", "type");
    if (type == "twolevel") {
        return LevelSystem::two_level(cfg.get_double("system", "omega_a", 0.0),
                                      cfg.get_double("system", "omega_b"),
                                      cfg.get_double("system", "mu"));
    }
    const RMatrix h0 = config_matrix(cfg, "system", "h0");
    std::vector<CMatrix> mus;
    mus.push_back(config_matrix(cfg, "system", "dipole").cast<Complex>());
    if (cfg.has("system", "dipole_y") || cfg.has("system", "dipole_y_file"))
        mus.push_back(config_matrix(cfg, "system", "dipole_y").cast<Complex>());
    return LevelSystem(h0.cast<Complex>(), std::move(mus));
}

FieldFilter make_filter(const RunConfig& cfg) {
    std::vector<FieldFilter> parts;
    if (cfg.has("optimizer", "filter_centers")) {
        parts.push_back(FieldFilter::gaussian_pass(
            cfg.get_list("optimizer", "filter_centers"),
            cfg.get_double("optimizer", "filter_gamma", 500.0)));
    }
    if (cfg.has("optimizer", "filter_band")) {
        const auto edges = cfg.get_list("optimizer", "filter_band");
        if (edges.size() != 2) throw Error("filter_band needs two edges");
        parts.push_back(FieldFilter::band(edges[0], edges[1]));
    }
    if (parts.empty()) throw Error("scheme requires a filter but none configured");
    if (parts.size() == 1) return parts.front();
    return FieldFilter::chain(std::move(parts));
}

OptimizerConfig make_optimizer_config(const RunConfig& cfg,
                                      const CommonArgs& args) {
    OptimizerConfig oc;
    oc.alpha = cfg.get_double("optimizer", "alpha", 1.0);
    oc.delta_J = cfg.get_double("optimizer", "delta_J", 1e-5);
    oc.max_iterations = static_cast<int>(cfg.get_int("optimizer", "max_iterations", 200));
    if (args.max_iters_override > 0) oc.max_iterations = args.max_iters_override;
    oc.eta = cfg.get_double("optimizer", "eta", 1.0);
    oc.xi = cfg.get_double("optimizer", "xi", 1.0);
    return oc;
}

ControlField make_guess(const RunConfig& cfg, const TimeGrid& tg, int channels) {
    if (cfg.has("optimizer", "guess_file")) {
        const RMatrix tab = read_matrix(cfg.get("optimizer", "guess_file"));
        if (tab.rows() != tg.n_steps || tab.cols() < channels + 1)
            throw Error("guess file shape does not match the time grid");
        ControlField f(tg, channels);
        for (int j = 0; j < channels; ++j)
            for (int i = 0; i < tg.n_steps; ++i) f.at(i, j) = tab(i, j + 1);
        return f;
    }
    return ControlField::constant(tg, cfg.get_double("optimizer", "guess", 0.0),
                                  channels);
}

void echo_effective_config(const RunConfig& cfg, const fs::path& dir) {
    std::ofstream out(dir / "config_effective.ini");
    out << cfg.serialize();
}

// ---------------------------------------------------------------------------

int cmd_eigen(const CommonArgs& args) {
    RunConfig cfg = RunConfig::parse_file(args.config_path);
    const fs::path dir = resolve_out_dir(cfg, args);
    const int n_states = static_cast<int>(cfg.get_int("system", "n_states", 5));
    GridSystem sys(make_grid(cfg), make_potential(cfg));
    EigenStates es = imaginary_time_eigenstates(sys, n_states);
    const RMatrix mu = dipole_matrix(sys, es);

    echo_effective_config(cfg, dir);
    const std::string hash = fnv1a_hex(cfg.serialize());
    {
        TsvWriter w((dir / "energies.tsv").string(), hash,
                    {"n", "E_n", "E_n_minus_E0"});
        for (int nn = 0; nn < n_states; ++nn)
            w.row({static_cast<double>(nn), es.energies[nn],
                   es.energies[nn] - es.energies[0]});
    }
    {
        TsvWriter w((dir / "dipoles.tsv").string(), hash, {"m", "n", "mu_mn"});
        for (int m = 0; m < n_states; ++m)
            for (int nn = m; nn < n_states; ++nn)
                w.row({static_cast<double>(m), static_cast<double>(nn), mu(m, nn)});
    }
    std::cout << "wrote " << (dir / "energies.tsv").string() << " and "
              << (dir / "dipoles.tsv").string() << "\n";
    return 0;
}

struct GridRun {
    GridSystem sys;
    EigenStates es;
    RMatrix mu;
};

GridRun make_grid_run(const RunConfig& cfg) {
    GridSystem sys(make_grid(cfg), make_potential(cfg));
    const int n_states = static_cast<int>(cfg.get_int("system", "n_states", 6));
    EigenStates es = imaginary_time_eigenstates(sys, n_states);
    RMatrix mu = dipole_matrix(sys, es);
    return {std::move(sys), std::move(es), std::move(mu)};
}

int cmd_optimize(const CommonArgs& args) {
    const auto t_start = std::chrono::steady_clock::now();
    RunConfig cfg = RunConfig::parse_file(args.config_path);
    const fs::path dir = resolve_out_dir(cfg, args);
    const TimeGrid tg = make_time_grid(cfg);
    const std::string type = cfg.get("system", "type", "grid");
    const double floor = cfg.get_double("output", "j1_floor", args.j1_floor);
    OptimizerConfig oc = make_optimizer_config(cfg, args);
    const std::string scheme = cfg.get("optimizer", "scheme", "standard");

    OptimizationResult result;
    Trajectory best_traj;
    std::vector<CVector> basis;

    auto run_with = [&](auto& sys, const CVector& phi_i, const TargetSpec& target,
                        const std::optional<CVector>& phi_f) {
        const double bytes =
            16.0 * static_cast<double>(sys.dim()) * (tg.n_steps + 1.0) * 2.0;
        if (bytes > scratch_budget_bytes())
            throw Error("trajectory storage exceeds the scratch budget; raise "
                        "QOC_SCRATCH_MB or coarsen the time grid");
        ControlField guess = make_guess(cfg, tg, sys.n_dipole_channels());
        if (scheme == "standard") {
            result = run_standard(sys, phi_i, target, guess, oc);
        } else if (scheme == "rapid") {
            if (!phi_f) throw Error("rapid scheme needs a projection target");
            result = run_rapid_projection(sys, phi_i, *phi_f, guess, oc);
        } else if (scheme == "fluence_fixed") {
            result = run_fluence_fixed(sys, phi_i, target,
                                       cfg.get_double("optimizer", "fluence_E0"),
                                       guess, oc);
        } else if (scheme == "filtered" || scheme == "filtered_fluence") {
            std::optional<double> e0;
            if (scheme == "filtered_fluence")
                e0 = cfg.get_double("optimizer", "fluence_E0");
            result = run_filtered(sys, phi_i, target, make_filter(cfg), guess,
                                  oc, e0);
        } else if (scheme == "time_dependent") {
            oc.validate();
            if (cfg.has("optimizer", "filter_centers") ||
                cfg.has("optimizer", "filter_band"))
                oc.filter = make_filter(cfg);
            if (cfg.has("optimizer", "fluence_E0"))
                oc.fluence_target = cfg.get_double("optimizer", "fluence_E0");
            result = run_time_dependent(sys, phi_i, target, guess, oc);
        } else {
            throw Error("unknown scheme: " + scheme);
        }
        // Re-propagate the best field for the occupation trajectory.
        best_traj = Trajectory(sys.dim(), tg.n_steps);
        CVector psi = phi_i;
        propagate(sys, psi, result.field, Direction::Forward,
                  [&](int i, const CVector& p) { best_traj.store(i, p); });
    };

    if (type == "grid") {
        GridRun g = make_grid_run(cfg);
        basis = g.es.states;
        const int i0 = static_cast<int>(cfg.get_int("target", "initial_state", 0));
        const CVector phi_i = g.es.states.at(i0);
        const std::string kind = cfg.get("target", "kind", "projection");
        TargetSpec target;
        std::optional<CVector> phi_f;
        if (kind == "projection") {
            const int f = static_cast<int>(cfg.get_int("target", "target_state"));
            phi_f = g.es.states.at(f);
            target = projection_target(*phi_f, g.sys.measure());
        } else if (kind == "phase_fixed") {
            const int f = static_cast<int>(cfg.get_int("target", "target_state"));
            target = {std::make_shared<PhaseFixedOverlapTarget>(
                          g.es.states.at(f), g.sys.measure()),
                      WeightFunction::final_time()};
        } else if (kind == "local_density") {
            const double x0 = cfg.get_double("target", "x0");
            const double sigma =
                cfg.get_double("target", "sigma", 2.0 * g.sys.grid().dx());
            target = {std::make_shared<LocalDensityTarget>(g.sys.grid(), x0, sigma),
                      WeightFunction::final_time()};
        } else if (kind == "follower_path") {
            if (g.es.states.size() < 5)
                throw Error("follower path needs n_states >= 5");
            std::vector<CVector> b5(g.es.states.begin(), g.es.states.begin() + 5);
            std::vector<double> e5(g.es.energies.begin(), g.es.energies.begin() + 5);
            target = build_follower_path(std::move(b5), std::move(e5),
                                         g.sys.measure(), tg);
            if (cfg.get("target", "weight", "paper") == "uniform")
                target.weight = WeightFunction::uniform();
        } else {
            throw Error("unknown target kind: " + kind);
        }
        run_with(g.sys, phi_i, target, phi_f);
    } else {
        LevelSystem sys = make_level_system(cfg);
        for (int nn = 0; nn < sys.dim(); ++nn) {
            CVector b = CVector::Zero(sys.dim());
            b[nn] = 1.0;
            basis.push_back(b);
        }
        const int i0 = static_cast<int>(cfg.get_int("target", "initial_state", 0));
        const int f = static_cast<int>(cfg.get_int("target", "target_state"));
        const CVector phi_i = basis.at(i0);
        const CVector phi_f = basis.at(f);
        TargetSpec target = projection_target(phi_f, 1.0);
        run_with(sys, phi_i, target, phi_f);
    }

    echo_effective_config(cfg, dir);
    const std::string hash = fnv1a_hex(cfg.serialize());
    write_field_tsv((dir / "field.tsv").string(), hash, result.field);
    write_spectrum_tsv((dir / "spectrum.tsv").string(), hash,
                       spectrum(result.field));
    write_convergence_tsv((dir / "convergence.tsv").string(), hash, result.record);
    {
        const int stride = static_cast<int>(cfg.get_int("output", "dump_stride", 100));
        if (type == "grid") {
            GridSystem tmp(make_grid(cfg), make_potential(cfg));
            write_occupations_tsv((dir / "occupations.tsv").string(), hash, tmp,
                                  best_traj, basis, tg, stride);
        } else {
            LevelSystem tmp = make_level_system(cfg);
            write_occupations_tsv((dir / "occupations.tsv").string(), hash, tmp,
                                  best_traj, basis, tg, stride);
        }
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    double e0 = 0.0;
    for (int j = 0; j < result.field.n_channels(); ++j)
        e0 += result.field.fluence(j);
    {
        std::ofstream s(dir / "summary.txt");
        s << "best_J1 " << TsvWriter::fmt(result.record.best_J1) << "\n"
          << "best_iteration " << result.record.best_index << "\n"
          << "fluence " << TsvWriter::fmt(e0) << "\n"
          << "iterations " << result.record.iterations.size() - 1 << "\n"
          << "converged " << (result.record.converged ? "yes" : "no") << "\n"
          << "stop_reason " << result.record.stop_reason << "\n"
          << "wall_seconds " << TsvWriter::fmt(wall) << "\n";
    }
    std::cout << "best J1 = " << result.record.best_J1 << ", E0 = " << e0
              << ", " << result.record.stop_reason << "\n";
    return result.record.best_J1 >= floor ? 0 : 1;
}

int cmd_twolevel(const CommonArgs& args) {
    RunConfig cfg = RunConfig::parse_file(args.config_path);
    const fs::path dir = resolve_out_dir(cfg, args);
    TwoLevelParams p;
    p.omega_a = cfg.get_double("twolevel", "omega_a", 0.0);
    p.omega_b = cfg.get_double("twolevel", "omega_b");
    p.mu = cfg.get_double("twolevel", "mu");
    const std::vector<double> t_list =
        cfg.get_list("twolevel", "T_list", std::vector<double>{});
    std::vector<double> penalties =
        cfg.get_list("twolevel", "penalties", std::vector<double>{});
    if (!penalties.empty() && penalties.size() != t_list.size())
        throw Error("penalties list must match T_list");
    const double dt_exact = cfg.get_double("twolevel", "dt", 0.01);
    const bool with_oct = cfg.get_bool("twolevel", "oct", true);
    int max_iters = static_cast<int>(cfg.get_int("twolevel", "max_iterations", 2000));
    if (args.max_iters_override > 0) max_iters = args.max_iters_override;

    struct Row {
        double T, p_rwa, p_oct, e0_rwa, e0_oct;
    };
    std::vector<Row> rows(t_list.size());

    auto compute_row = [&](size_t idx) {
        const double T = t_list[idx];
        const double A = pulse_area_amplitude(p.mu, T);
        const double nu = p.omega_ba();
        const TimeGrid tg_exact(T, dt_exact);
        const CVector c = integrate_exact(
            p, [&](double t) { return A * std::sin(nu * t); }, tg_exact);
        Row r{};
        r.T = T;
        r.p_rwa = std::norm(c[1]);
        ControlField rwa_field = ControlField::from_function(
            tg_exact, [&](double t) { return A * std::sin(nu * t); });
        r.e0_rwa = rwa_field.fluence();
        r.p_oct = std::nan("");
        r.e0_oct = std::nan("");
        if (with_oct) {
            LevelSystem sys = LevelSystem::two_level(p.omega_a, p.omega_b, p.mu);
            CVector phi_i(2), phi_f(2);
            phi_i << 1, 0;
            phi_f << 0, 1;
            OptimizerConfig oc;
            oc.alpha = penalties.empty() ? 1.0 : penalties[idx];
            oc.delta_J = 0.0;  // run the full budget like the reference tables
            oc.max_iterations = max_iters;
            ControlField guess = ControlField::constant(tg_exact, 0.05);
            auto res = run_rapid_projection(sys, phi_i, phi_f, guess, oc);
            r.p_oct = res.record.best_J1;
            r.e0_oct = res.field.fluence();
        }
        rows[idx] = r;
    };

    if (args.jobs > 1 && rows.size() > 1) {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        const int nthreads = static_cast<int>(
            std::min(static_cast<size_t>(args.jobs), rows.size()));
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next++; i < rows.size(); i = next++) compute_row(i);
            });
        for (auto& th : pool) th.join();
    } else {
        for (size_t i = 0; i < rows.size(); ++i) compute_row(i);
    }

    echo_effective_config(cfg, dir);
    TsvWriter w((dir / "twolevel.tsv").string(), fnv1a_hex(cfg.serialize()),
                {"T", "P_RWA", "P_OCT", "E0_RWA", "E0_OCT"});
    for (const auto& r : rows) w.row({r.T, r.p_rwa, r.p_oct, r.e0_rwa, r.e0_oct});
    std::cout << "wrote " << (dir / "twolevel.tsv").string() << " ("
              << rows.size() << " rows)\n";
    return 0;
}

int cmd_controllability(const CommonArgs& args) {
    RunConfig cfg = RunConfig::parse_file(args.config_path);
    const fs::path dir = resolve_out_dir(cfg, args);
    const RMatrix h0 = config_matrix(cfg, "system", "h0");
    std::vector<CMatrix> mus;
    mus.push_back(config_matrix(cfg, "system", "dipole").cast<Complex>());
    if (cfg.has("system", "dipole_y") || cfg.has("system", "dipole_y_file"))
        mus.push_back(config_matrix(cfg, "system", "dipole_y").cast<Complex>());
    const ControllabilityResult r = lie_rank(h0.cast<Complex>(), mus);

    echo_effective_config(cfg, dir);
    std::ostringstream line;
    line << "rank " << r.rank << " of " << r.dim * r.dim << ": "
         << (r.controllable ? "completely controllable" : "not completely controllable");
    std::ofstream(dir / "controllability.txt") << line.str() << "\n";
    std::cout << line.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qoctl: quantum optimal control batch runner"};
    app.require_subcommand(1);
    CommonArgs args;

    auto* eigen = app.add_subcommand("eigen", "field-free spectrum of a grid system");
    add_common(eigen, args);
    auto* optimize = app.add_subcommand("optimize", "run one optimization");
    add_common(optimize, args);
    auto* twolevel = app.add_subcommand("twolevel", "RWA vs OCT comparison table");
    add_common(twolevel, args);
    auto* control = app.add_subcommand("controllability", "Lie-algebra rank analysis");
    add_common(control, args);

    CLI11_PARSE(app, argc, argv);
    try {
        if (eigen->parsed()) return cmd_eigen(args);
        if (optimize->parsed()) return cmd_optimize(args);
        if (twolevel->parsed()) return cmd_twolevel(args);
        if (control->parsed()) return cmd_controllability(args);
    } catch (const std::exception& e) {
        std::cerr << "qoctl: error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
