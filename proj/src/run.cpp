#include "nsrl/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nsrl/config.hpp"
#include "nsrl/criteria.hpp"
#include "nsrl/csv.hpp"
#include "nsrl/errors.hpp"
#include "nsrl/generators.hpp"
#include "nsrl/parallel.hpp"
#include "nsrl/pressure.hpp"
#include "nsrl/reduce.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/sampler.hpp"
#include "nsrl/snapshot.hpp"
#include "nsrl/solver.hpp"
#include "nsrl/structure.hpp"

namespace nsrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

GridSpec grid_from_config(KeyValueConfig& cfg) {
    GridSpec grid;
    grid.n = static_cast<int>(cfg.get_int("grid.n", 32));
    grid.domain_length = cfg.get_double("grid.domain_length", two_pi);
    grid.nu = cfg.get_double("grid.nu", 0.1);
    grid.validate();
    return grid;
}

Field initial_field(KeyValueConfig& cfg, const GridSpec& grid,
                    const std::optional<std::uint64_t>& seed_override) {
    const std::string kind = cfg.get_string("ic.kind", "taylor_green_2d");
    if (kind == "snapshot") {
        const std::string path = cfg.get_string("ic.snapshot", "");
        if (path.empty()) throw ConfigError("ic.kind=snapshot requires ic.snapshot=<path>");
        Snapshot snap = load_snapshot(path);
        return std::move(snap.field);
    }
    const std::uint64_t seed = seed_override.value_or(cfg.get_u64("ic.seed", 1));
    std::map<std::string, double> params;
    params["slope"] = cfg.get_double("ic.slope", -5.0 / 3.0);
    params["k_min"] = static_cast<double>(cfg.get_int("ic.k_min", 1));
    params["k_max"] = static_cast<double>(cfg.get_int("ic.k_max", std::max(2, grid.n / 4)));
    params["u_rms"] = cfg.get_double("ic.u_rms", 1.0);
    params["kx"] = static_cast<double>(cfg.get_int("ic.kx", 1));
    params["ky"] = static_cast<double>(cfg.get_int("ic.ky", 0));
    params["kz"] = static_cast<double>(cfg.get_int("ic.kz", 0));
    params["amplitude"] = cfg.get_double("ic.amplitude", 1.0);
    params["length_scale"] = cfg.get_double("ic.length_scale", 1.0);
    params["beta"] = cfg.get_double("ic.beta", 0.5);
    return generate(kind, grid, params, seed);
}

SolverConfig solver_from_config(KeyValueConfig& cfg) {
    SolverConfig sc;
    sc.dt = cfg.get_double("solver.dt", 1e-3);
    sc.t_end = cfg.get_double("solver.t_end", 1.0);
    sc.dealias = cfg.get_bool("solver.dealias", true);
    sc.snapshot_stride = static_cast<int>(cfg.get_int("solver.snapshot_stride", 10));
    sc.stats_stride = static_cast<int>(cfg.get_int("solver.stats_stride", 1));
    return sc;
}

std::vector<Vec3> probes_from_config(KeyValueConfig& cfg, const GridSpec& grid) {
    std::vector<Vec3> probes;
    const std::string list = cfg.get_string("probes.list", "");
    if (!list.empty()) {
        std::istringstream ss(list);
        std::string triple;
        while (std::getline(ss, triple, ';')) {
            std::istringstream ts(triple);
            std::string coord;
            Vec3 p{};
            int i = 0;
            while (std::getline(ts, coord, ',') && i < 3) p[i++] = std::stod(coord);
            if (i != 3) throw ConfigError("probes.list: expected x,y,z triples separated by ';'");
            probes.push_back(p);
        }
        return probes;
    }
    const int count = static_cast<int>(cfg.get_int("probes.count", 20));
    Rng rng(cfg.get_u64("probes.seed", 7));
    for (int i = 0; i < count; ++i) {
        probes.push_back(Vec3{rng.uniform(0.0, grid.domain_length),
                              rng.uniform(0.0, grid.domain_length),
                              rng.uniform(0.0, grid.domain_length)});
    }
    return probes;
}

void write_stats_csv(const Trajectory& traj, const fs::path& path) {
    CsvWriter csv(path.string(), "t,energy,enstrophy,dissipation,max_u,max_grad_u");
    for (const FlowStats& s : traj.stats)
        csv.row_values({s.t, s.energy, s.enstrophy, s.dissipation, s.max_u, s.max_grad_u});
}

void write_resolved_config(KeyValueConfig& cfg, const fs::path& dir) {
    std::ofstream out(dir / "config_resolved.nsrl", std::ios::trunc);
    if (!out) throw IoError("cannot write resolved config");
    out << cfg.resolved_text();
}

void warn_unused_keys(KeyValueConfig& cfg, const fs::path& dir);

void append_log(const fs::path& dir, const std::string& message) {
    std::ofstream log(dir / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
    log << stamp << " " << message << "\n";
}

void warn_unused_keys(KeyValueConfig& cfg, const fs::path& dir) {
    for (const std::string& key : cfg.unused_keys())
        append_log(dir, "warning: unused config key '" + key + "'");
}

// ---- per-snapshot scalar series from a time-dependent policy ----

std::vector<double> policy_series(const std::string& spec_text, const Trajectory& traj,
                                  bool gradient) {
    std::vector<double> out(traj.snapshots.size());
    if (spec_text.rfind("quantile:", 0) == 0) {
        const double q = std::stod(spec_text.substr(9));
        if (!(q > 0.0) || !(q < 1.0)) throw ConfigError("policy: quantile must be in (0,1)");
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            std::vector<double> mag = gradient ? gradient_magnitude_samples(traj.snapshots[i])
                                               : magnitude_samples(traj.snapshots[i]);
            std::sort(mag.begin(), mag.end());
            const std::size_t idx =
                static_cast<std::size_t>(q * static_cast<double>(mag.size() - 1));
            out[i] = mag[idx];
        }
        return out;
    }
    const double v = std::stod(spec_text);
    if (!(v > 0.0)) throw ConfigError("policy: constant threshold must be positive");
    std::fill(out.begin(), out.end(), v);
    return out;
}

std::vector<double> r_policy_series(KeyValueConfig& cfg, const std::string& prefix,
                                    const Trajectory& traj) {
    const std::string kind = cfg.get_string(prefix + ".r_policy", "fixed");
    std::vector<double> r(traj.snapshots.size());
    if (kind == "fixed") {
        const double r0 = cfg.get_double(prefix + ".r", 0.1);
        std::fill(r.begin(), r.end(), r0);
    } else if (kind == "kolmogorov") {
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            const double ens = norm_v(traj.snapshots[i]);
            const double eps = traj.grid.nu * ens * ens / traj.grid.volume();
            r[i] = kolmogorov_eta(traj.grid.nu, eps);
        }
    } else {
        throw ConfigError(prefix + ".r_policy must be fixed or kolmogorov");
    }
    return r;
}

void write_criterion_csv(const CriterionReport& rep, const fs::path& dir) {
    CsvWriter csv((dir / ("criterion_" + rep.id + ".csv")).string(),
                  "t,measured,bound,ratio,required_C,pass");
    for (const CriterionPoint& pt : rep.points) {
        csv.row({format_full(pt.t), format_full(pt.measured), format_full(pt.bound),
                 format_full(pt.ratio), format_full(rep.required_c), pt.pass ? "1" : "0"});
    }
}

json report_to_json(const CriterionReport& rep) {
    json j;
    j["id"] = rep.id;
    j["pass"] = rep.pass;
    j["required_C"] = rep.required_c;
    json params;
    for (const auto& [k, v] : rep.params) params[k] = v;
    j["params"] = params;
    return j;
}

// ---- subcommands ----

int cmd_simulate(KeyValueConfig& cfg, const fs::path& out,
                 const std::optional<std::uint64_t>& seed) {
    const GridSpec grid = grid_from_config(cfg);
    const Field u0 = initial_field(cfg, grid, seed);
    const SolverConfig sc = solver_from_config(cfg);
    const bool write_snaps = cfg.get_bool("solver.write_snapshots", true);

    const Trajectory traj = simulate(u0, sc);
    write_stats_csv(traj, out / "stats.csv");
    if (write_snaps) {
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%06zu.nsrl", i);
            store_snapshot(traj.snapshots[i], traj.snapshot_times[i], (out / name).string());
        }
    }
    write_resolved_config(cfg, out);
    warn_unused_keys(cfg, out);
    append_log(out, "simulate: " + std::to_string(traj.stats.size()) + " stats rows, " +
                        std::to_string(traj.snapshots.size()) + " snapshots");
    return 0;
}

int cmd_verify_pressure(KeyValueConfig& cfg, const fs::path& out,
                        const std::optional<std::uint64_t>& seed, int refine) {
    const GridSpec grid = grid_from_config(cfg);
    const Field u = leray_project(initial_field(cfg, grid, seed));
    const ScalarField p = solve_pressure(u);

    const double r = cfg.get_double("pressure.r", 0.3);
    PressureQuadrature base;
    base.n_theta = static_cast<int>(cfg.get_int("pressure.n_theta", 16));
    base.n_phi = static_cast<int>(cfg.get_int("pressure.n_phi", 32));
    base.n_rad = static_cast<int>(cfg.get_int("pressure.n_rad", 32));
    base.rho_min_factor = cfg.get_double("pressure.rho_min_factor", 1e-3);

    const std::vector<Vec3> probes = probes_from_config(cfg, grid);

    std::vector<double> max_rel(refine + 1, 0.0);
    for (int level = 0; level <= refine; ++level) {
        const PressureQuadrature quad = base.refined(level);
        std::vector<PressureDecomposition> rows(probes.size());
        parallel_for(probes.size(), [&](std::size_t i) {
            rows[i] = verify_representation(u, p, probes[i], r, std::nullopt, quad);
        });
        CsvWriter csv((out / ("verify_pressure_L" + std::to_string(level) + ".csv")).string(),
                      "x1,x2,x3,r,p,beta,pi,K,residual,rel_residual");
        for (const auto& d : rows) {
            csv.row_values({d.x[0], d.x[1], d.x[2], d.r, d.p_x, d.beta, d.pi, d.k_singular,
                            d.residual, d.rel_residual});
            max_rel[level] = std::max(max_rel[level], d.rel_residual);
        }
    }

    CsvWriter summary((out / "refinement_summary.csv").string(),
                      "level,n_theta,n_phi,n_rad,max_rel_residual,ratio_vs_previous");
    for (int level = 0; level <= refine; ++level) {
        const PressureQuadrature quad = base.refined(level);
        const double ratio = level == 0 ? 0.0
                                        : (max_rel[level] > 0.0
                                               ? max_rel[level - 1] / max_rel[level]
                                               : std::numeric_limits<double>::infinity());
        summary.row({std::to_string(level), std::to_string(quad.n_theta),
                     std::to_string(quad.n_phi), std::to_string(quad.n_rad),
                     format_full(max_rel[level]), format_full(ratio)});
    }
    write_resolved_config(cfg, out);
    warn_unused_keys(cfg, out);
    append_log(out, "verify-pressure: " + std::to_string(probes.size()) + " probes, " +
                        std::to_string(refine + 1) + " levels");
    return 0;
}

int cmd_structure(KeyValueConfig& cfg, const fs::path& out,
                  const std::optional<std::uint64_t>& seed) {
    const GridSpec grid = grid_from_config(cfg);
    const Field u = initial_field(cfg, grid, seed);

    const double r_min = cfg.get_double("structure.r_min", grid.domain_length / 64.0);
    const double r_max = cfg.get_double("structure.r_max", grid.domain_length / 8.0);
    const int n_r = static_cast<int>(cfg.get_int("structure.n_r", 12));
    const int n_rad = static_cast<int>(cfg.get_int("structure.n_rad", 32));
    const RadialGrid radii = RadialGrid::logarithmic(r_min, r_max, n_r);
    const std::size_t count = grid.point_count();

    {
        CsvWriter csv((out / "structure_radial.csv").string(), "r,s2_mean,S2_mean,S2_L32_norm");
        for (double r : radii.rho) {
            const std::vector<double> s2 = shell_s2_field(u, r);
            const std::vector<double> s2c = cumulative_s2_field(u, r, n_rad);
            const double s2_mean = pairwise_sum(s2) / double(count);
            const double s2c_mean = pairwise_sum(s2c) / double(count);
            const double l32 = std::pow(
                grid.cell_volume() * pairwise_sum(std::size_t{0}, count,
                                                  [&](std::size_t i) {
                                                      return std::pow(std::max(s2c[i], 0.0), 1.5);
                                                  }),
                2.0 / 3.0);
            csv.row_values({r, s2_mean, s2c_mean, l32});
        }
    }

    std::vector<int> multiples;
    for (double v : cfg.get_list("structure.multiples", {1, 2, 3, 4, 6, 8}))
        multiples.push_back(static_cast<int>(v));
    std::vector<int> p_list;
    for (double v : cfg.get_list("structure.p_list", {1, 2, 3, 4})) p_list.push_back(static_cast<int>(v));
    const MomentTable table = longitudinal_moments(u, multiples, p_list);
    {
        CsvWriter csv((out / "structure_moments.csv").string(), "p,ell,moment,four_fifths_ratio");
        for (const MomentRow& row : table.rows)
            csv.row({std::to_string(row.p), format_full(row.ell), format_full(row.moment),
                     format_full(row.four_fifths_ratio)});
    }
    {
        const double fit_min = cfg.get_double("structure.fit_min", 4.0 * grid.spacing());
        const double fit_max = cfg.get_double("structure.fit_max", grid.domain_length / 8.0);
        CsvWriter csv((out / "structure_zeta.csv").string(),
                      "p,zeta,r2,ell_min,ell_max,n_points,ok");
        for (int p : p_list) {
            const ZetaFit f = fit_zeta(table, p, fit_min, fit_max);
            csv.row({std::to_string(p), format_full(f.zeta), format_full(f.r2),
                     format_full(f.ell_min), format_full(f.ell_max), std::to_string(f.count),
                     f.ok ? "1" : "0"});
        }
    }
    write_resolved_config(cfg, out);
    warn_unused_keys(cfg, out);
    append_log(out, "structure: tables written");
    return 0;
}

int cmd_criteria(KeyValueConfig& cfg, const fs::path& out,
                 const std::optional<std::uint64_t>& seed) {
    const GridSpec grid = grid_from_config(cfg);
    const Field u0 = initial_field(cfg, grid, seed);
    const SolverConfig sc = solver_from_config(cfg);
    const Trajectory traj = simulate(u0, sc);
    write_stats_csv(traj, out / "stats.csv");

    Constants constants;
    constants.c_absolute = cfg.get_double("criteria.constants.C", 1.0);
    constants.c_morrey = cfg.get_double("criteria.constants.C_morrey", 0.30596);

    std::vector<std::string> list;
    {
        std::istringstream ss(cfg.get_string("criteria.list", ""));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (!item.empty()) list.push_back(item);
        }
    }

    const std::vector<double>& t = traj.snapshot_times;
    const std::vector<double> enstrophy = snapshot_enstrophy(traj);
    const double u0_l2 = norm_lp(traj.snapshots.front(), 2.0);

    json summary;
    summary["constants"] = {{"C", constants.c_absolute}, {"C_morrey", constants.c_morrey}};
    summary["criteria"] = json::array();

    for (const std::string& name : list) {
        std::vector<CriterionReport> reps;
        if (name == "quantaV") {
            const double q = cfg.get_double("criteria.quantaV.q", 6.0);
            reps.push_back(certificate_quanta_v(t, enstrophy, snapshot_norm_lq(traj, q), q,
                                                grid.nu, constants));
        } else if (name == "vcond") {
            reps.push_back(certificate_vcond(t, enstrophy, grid.nu, constants));
        } else if (name == "gradL3") {
            reps.push_back(
                certificate_grad_l3(t, enstrophy, snapshot_grad_l3_sq(traj), grid.nu, constants));
        } else if (name == "lambda32") {
            const std::vector<double> m32 = snapshot_lambda32_sq(traj);
            reps.push_back(certificate_lambda32(t, enstrophy, m32, grid.nu, constants));
            reps.push_back(
                certificate_lambda12_growth(t, snapshot_hdot(traj, 0.5), m32, constants));
        } else if (name == "foias") {
            const double delta_cfg = cfg.get_double("criteria.foias.delta", 0.0);
            std::optional<double> delta_override;
            if (delta_cfg > 0.0) delta_override = delta_cfg;
            FoiasCertificate fc = certificate_foias(t, enstrophy, snapshot_u3_curves(traj), u0_l2,
                                                    grid.nu, constants, delta_override);
            reps.push_back(fc.report);
        } else if (name == "pressure_lr") {
            const double lr = cfg.get_double("criteria.pressure_lr.r", 4.0);
            const double delta_cfg = cfg.get_double("criteria.pressure_lr.delta", 0.0);
            std::optional<double> delta_override;
            if (delta_cfg > 0.0) delta_override = delta_cfg;
            reps.push_back(certificate_pressure_lr(t, snapshot_norm_lq(traj, lr),
                                                   snapshot_p32_curves(traj), lr, u0_l2, grid.nu,
                                                   constants, delta_override));
        } else if (name == "s2_lq") {
            const double q = cfg.get_double("criteria.s2_lq.q", 4.0);
            const double delta = cfg.get_double("criteria.s2_lq.delta", 0.1);
            reps.push_back(certificate_s2_lq(t, snapshot_norm_lq(traj, q),
                                             r_policy_series(cfg, "criteria.s2_lq", traj), q,
                                             delta, u0_l2, grid.nu, constants));
        } else if (name == "region_lq") {
            const double q = cfg.get_double("criteria.region_lq.q", 4.0);
            const std::vector<double> u_t =
                policy_series(cfg.get_string("criteria.region_lq.u", "quantile:0.99"), traj, false);
            const std::vector<double> g_t =
                policy_series(cfg.get_string("criteria.region_lq.g", "quantile:0.99"), traj, true);
            reps.push_back(certificate_region_lq(t, snapshot_norm_lq(traj, q), u_t, g_t,
                                                 r_policy_series(cfg, "criteria.region_lq", traj),
                                                 q, u0_l2, grid.nu, constants));
        } else if (name == "s2cond") {
            RPolicy policy;
            const std::string kind = cfg.get_string("criteria.s2cond.r_policy", "kolmogorov");
            if (kind == "fixed") {
                policy.kind = RPolicy::Fixed;
                policy.fixed_r = cfg.get_double("criteria.s2cond.r", 0.1);
            } else if (kind == "kolmogorov") {
                policy.kind = RPolicy::Kolmogorov;
            } else {
                throw ConfigError("criteria.s2cond.r_policy must be fixed or kolmogorov");
            }
            const double delta = cfg.get_double("criteria.s2cond.delta", 0.1);
            reps.push_back(s2cond_monitor(traj, policy, delta, constants,
                                          static_cast<int>(cfg.get_int("criteria.s2cond.n_rad", 32))));
        } else if (name == "region_increment") {
            const Field& last = traj.snapshots.back();
            const std::vector<double> u_t =
                policy_series(cfg.get_string("criteria.region_increment.u", "quantile:0.99"), traj,
                              false);
            const std::vector<double> g_t =
                policy_series(cfg.get_string("criteria.region_increment.g", "quantile:0.99"), traj,
                              true);
            const double r = cfg.get_double("criteria.region_increment.r", 0.1);
            reps.push_back(region_increment_check(last, u_t.back(), g_t.back(), r, constants));
        } else if (name == "lps_velocity") {
            const double p = cfg.get_double("criteria.lps_velocity.p", 4.0);
            const double q = cfg.get_double("criteria.lps_velocity.q", 6.0);
            reps.push_back(lps_integral(t, snapshot_norm_lq(traj, q), p, q, "velocity"));
        } else if (name == "lps_pressure") {
            const double q = cfg.get_double("criteria.lps_pressure.q", 2.0);
            std::vector<double> pnorms(traj.snapshots.size());
            for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
                pnorms[i] = norm_lp(solve_pressure(traj.snapshots[i]), q);
            reps.push_back(lps_integral(t, pnorms, 0.0, q, "pressure"));
        } else {
            throw ConfigError("criteria: unknown criterion '" + name + "'");
        }
        for (const CriterionReport& rep : reps) {
            write_criterion_csv(rep, out);
            summary["criteria"].push_back(report_to_json(rep));
        }
    }

    std::ofstream js(out / "criteria_summary.json", std::ios::trunc);
    js << summary.dump(2) << "\n";
    write_resolved_config(cfg, out);
    warn_unused_keys(cfg, out);
    append_log(out, "criteria: " + std::to_string(list.size()) + " criteria evaluated");
    return 0;
}

int cmd_report(const fs::path& out) {
    // merge whatever runs left behind into plot-ready tables
    json summary;
    summary["criteria"] = json::array();
    CsvWriter sum((out / "report_summary.csv").string(), "criterion,pass,required_C,max_ratio");
    for (const auto& entry : fs::directory_iterator(out)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("criterion_", 0) != 0 || entry.path().extension() != ".csv") continue;
        std::ifstream in(entry.path());
        std::string line;
        std::getline(in, line);  // header
        bool pass = true;
        double required_c = 0.0, max_ratio = 0.0;
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (cells.size() < 6) continue;
            max_ratio = std::max(max_ratio, std::stod(cells[3]));
            required_c = std::stod(cells[4]);
            pass = pass && cells[5] == "1";
        }
        const std::string id = name.substr(10, name.size() - 14);
        sum.row({id, pass ? "1" : "0", format_full(required_c), format_full(max_ratio)});
    }
    if (fs::exists(out / "stats.csv")) {
        fs::copy_file(out / "stats.csv", out / "report_flow.csv",
                      fs::copy_options::overwrite_existing);
    }
    append_log(out, "report: merged");
    return 0;
}

} // namespace

int run(const RunOptions& options) {
    fs::path out;
    try {
        KeyValueConfig cfg = options.subcommand == "report"
                                 ? KeyValueConfig{}
                                 : KeyValueConfig::parse_file(options.config_path);
        out = options.out_dir.empty() ? fs::path(cfg.get_string("output.dir", "nsrl_out"))
                                      : fs::path(options.out_dir);
        fs::create_directories(out);

        if (options.subcommand == "simulate") return cmd_simulate(cfg, out, options.seed);
        if (options.subcommand == "verify-pressure")
            return cmd_verify_pressure(cfg, out, options.seed, options.refine);
        if (options.subcommand == "structure") return cmd_structure(cfg, out, options.seed);
        if (options.subcommand == "criteria") return cmd_criteria(cfg, out, options.seed);
        if (options.subcommand == "report") return cmd_report(out);
        throw ConfigError("unknown subcommand: " + options.subcommand);
    } catch (const std::exception& e) {
        int code = 3;
        const char* type = "numerical";
        if (dynamic_cast<const ConfigError*>(&e)) {
            code = 2;
            type = "config";
        } else if (dynamic_cast<const IoError*>(&e)) {
            code = 4;
            type = "io";
        }
        std::cerr << "nsrl: " << type << " error: " << e.what() << "\n";
        if (!out.empty()) {
            std::error_code ec;
            fs::create_directories(out, ec);
            if (!ec) {
                json err;
                err["error_type"] = type;
                err["message"] = e.what();
                std::ofstream js(out / "error.json", std::ios::trunc);
                js << err.dump(2) << "\n";
            }
        }
        return code;
    }
}

} // namespace nsrl
