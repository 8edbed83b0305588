#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsrl/config.hpp"
#include "nsrl/generators.hpp"
#include "nsrl/parallel.hpp"
#include "nsrl/run.hpp"
#include "nsrl/snapshot.hpp"

using namespace nsrl;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("nsrl_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

void write_config(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("snapshot: store/load round trip is bit identical") {
    const fs::path dir = temp_dir("snap");
    GridSpec g;
    g.n = 16;
    g.nu = 0.07;
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 3);
    const fs::path p1 = dir / "a.nsrl";
    const fs::path p2 = dir / "b.nsrl";
    store_snapshot(u, 1.25, p1.string());
    const Snapshot snap = load_snapshot(p1.string());
    CHECK(snap.time == 1.25);
    CHECK(snap.field.grid().n == 16);
    CHECK(snap.field.grid().nu == 0.07);
    store_snapshot(snap.field, snap.time, p2.string());
    CHECK(same_bytes(p1, p2));
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < g.point_count(); ++i)
            CHECK(snap.field.component(c).physical()[i] == u.component(c).physical()[i]);
}

TEST_CASE("snapshot: malformed files are rejected with precise errors") {
    const fs::path dir = temp_dir("snapbad");
    {
        std::ofstream out(dir / "magic.nsrl", std::ios::binary);
        out << "XXXXjunkjunkjunk";
    }
    CHECK_THROWS_WITH_AS((void)load_snapshot((dir / "magic.nsrl").string()),
                         doctest::Contains("magic"), IoError);

    {
        std::ofstream out(dir / "version.nsrl", std::ios::binary);
        out << "NSRL";
        const std::uint32_t v = 2, n = 16;
        out.write(reinterpret_cast<const char*>(&v), 4);
        out.write(reinterpret_cast<const char*>(&n), 4);
    }
    try {
        (void)load_snapshot((dir / "version.nsrl").string());
        CHECK(false);
    } catch (const IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2") != std::string::npos);
        CHECK(msg.find("1") != std::string::npos);
    }

    {
        GridSpec g;
        g.n = 16;
        const Field u = Field::zero(g);
        store_snapshot(u, 0.0, (dir / "full.nsrl").string());
        const std::string bytes = slurp(dir / "full.nsrl");
        std::ofstream out(dir / "trunc.nsrl", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS((void)load_snapshot((dir / "trunc.nsrl").string()), IoError);
}

TEST_CASE("config: grammar, types, defaults, provenance") {
    const std::string text =
        "# a comment\n"
        "grid.n = 16\n"
        "grid.nu = 0.25  # inline comment\n"
        "solver.dealias = false\n"
        "ic.kind = taylor_green_2d\n"
        "structure.p_list = 1, 2, 3\n";
    KeyValueConfig cfg = KeyValueConfig::parse_text(text);
    CHECK(cfg.get_int("grid.n", 32) == 16);
    CHECK(cfg.get_double("grid.nu", 0.1) == doctest::Approx(0.25));
    CHECK_FALSE(cfg.get_bool("solver.dealias", true));
    CHECK(cfg.get_string("ic.kind", "x") == "taylor_green_2d");
    CHECK(cfg.get_list("structure.p_list", {}).size() == 3);
    CHECK(cfg.get_double("grid.domain_length", 6.5) == doctest::Approx(6.5));  // default
    const std::string resolved = cfg.resolved_text();
    CHECK(resolved.find("grid.domain_length = 6.5") != std::string::npos);
    CHECK(resolved.find("grid.n = 16") != std::string::npos);

    CHECK_THROWS_AS((void)KeyValueConfig::parse_text("grid.n 16\n"), ConfigError);
    KeyValueConfig bad = KeyValueConfig::parse_text("grid.n = twelve\n");
    CHECK_THROWS_AS((void)bad.get_int("grid.n", 1), ConfigError);
}

TEST_CASE("run: unknown criterion and CFL violation map to exit codes") {
    const fs::path dir = temp_dir("codes");
    write_config(dir / "bad.nsrl",
                 "grid.n = 16\nic.kind = random_divfree\nsolver.t_end = 0.01\n"
                 "criteria.list = bogus\n");
    RunOptions opt;
    opt.subcommand = "criteria";
    opt.config_path = (dir / "bad.nsrl").string();
    opt.out_dir = (dir / "out1").string();
    CHECK(run(opt) == 2);
    CHECK(fs::exists(dir / "out1" / "error.json"));

    write_config(dir / "cfl.nsrl",
                 "grid.n = 16\ngrid.nu = 0.01\nic.kind = random_divfree\nic.u_rms = 10\n"
                 "solver.dt = 0.5\nsolver.t_end = 1.0\n");
    RunOptions opt2;
    opt2.subcommand = "simulate";
    opt2.config_path = (dir / "cfl.nsrl").string();
    opt2.out_dir = (dir / "out2").string();
    CHECK(run(opt2) == 3);

    RunOptions opt3;
    opt3.subcommand = "simulate";
    opt3.config_path = (dir / "missing.nsrl").string();
    opt3.out_dir = (dir / "out3").string();
    CHECK(run(opt3) == 2);
}

TEST_CASE("run: criteria with an empty list writes an empty summary and exits 0") {
    const fs::path dir = temp_dir("empty");
    write_config(dir / "cfg.nsrl",
                 "grid.n = 16\ngrid.nu = 0.1\nic.kind = random_divfree\nic.k_max = 4\n"
                 "solver.dt = 0.01\nsolver.t_end = 0.02\n");
    RunOptions opt;
    opt.subcommand = "criteria";
    opt.config_path = (dir / "cfg.nsrl").string();
    opt.out_dir = (dir / "out").string();
    CHECK(run(opt) == 0);
    const std::string summary = slurp(dir / "out" / "criteria_summary.json");
    CHECK(summary.find("\"criteria\": []") != std::string::npos);
}

TEST_CASE("run: verify-pressure refinement emits per-level tables and ratios") {
    const fs::path dir = temp_dir("vp");
    write_config(dir / "cfg.nsrl",
                 "grid.n = 32\ngrid.nu = 0.1\nic.kind = random_divfree\nic.k_max = 4\n"
                 "pressure.r = 0.3\npressure.n_theta = 8\npressure.n_phi = 16\n"
                 "pressure.n_rad = 16\nprobes.count = 2\nprobes.seed = 5\n");
    RunOptions opt;
    opt.subcommand = "verify-pressure";
    opt.config_path = (dir / "cfg.nsrl").string();
    opt.out_dir = (dir / "out").string();
    opt.refine = 1;
    CHECK(run(opt) == 0);
    CHECK(fs::exists(dir / "out" / "verify_pressure_L0.csv"));
    CHECK(fs::exists(dir / "out" / "verify_pressure_L1.csv"));
    const std::string summary = slurp(dir / "out" / "refinement_summary.csv");
    CHECK(summary.find("level,n_theta") != std::string::npos);
    std::istringstream ss(summary);
    std::string line, last;
    while (std::getline(ss, line))
        if (!line.empty()) last = line;
    // last row: level 1 with a positive improvement ratio
    const auto comma = last.rfind(',');
    CHECK(std::stod(last.substr(comma + 1)) > 1.0);
    const std::string l0 = slurp(dir / "out" / "verify_pressure_L0.csv");
    CHECK(l0.find("x1,x2,x3,r,p,beta,pi,K,residual,rel_residual") == 0);
}

TEST_CASE("run: repeated runs are byte identical across thread widths") {
    const fs::path dir = temp_dir("det");
    write_config(dir / "cfg.nsrl",
                 "grid.n = 16\ngrid.nu = 0.1\nic.kind = random_divfree\nic.k_max = 4\n"
                 "ic.seed = 9\nsolver.dt = 0.01\nsolver.t_end = 0.05\n"
                 "solver.snapshot_stride = 2\ncriteria.list = quantaV,vcond\n");
    RunOptions a;
    a.subcommand = "criteria";
    a.config_path = (dir / "cfg.nsrl").string();
    a.out_dir = (dir / "a").string();
    RunOptions b = a;
    b.out_dir = (dir / "b").string();

    set_thread_width(1);
    CHECK(run(a) == 0);
    set_thread_width(4);
    CHECK(run(b) == 0);
    set_thread_width(0);  // restore default resolution later

    for (const char* name : {"stats.csv", "criterion_quantaV.csv", "criterion_vcond.csv",
                             "criteria_summary.json", "config_resolved.nsrl"}) {
        INFO(name);
        CHECK(same_bytes(dir / "a" / name, dir / "b" / name));
    }
}

TEST_CASE("run: simulate writes stats and snapshots; structure writes tables") {
    const fs::path dir = temp_dir("simst");
    write_config(dir / "cfg.nsrl",
                 "grid.n = 16\ngrid.nu = 0.1\nic.kind = random_divfree\nic.k_max = 4\n"
                 "solver.dt = 0.01\nsolver.t_end = 0.03\nsolver.snapshot_stride = 1\n");
    RunOptions opt;
    opt.subcommand = "simulate";
    opt.config_path = (dir / "cfg.nsrl").string();
    opt.out_dir = (dir / "sim").string();
    CHECK(run(opt) == 0);
    CHECK(fs::exists(dir / "sim" / "stats.csv"));
    CHECK(fs::exists(dir / "sim" / "snapshot_000000.nsrl"));
    CHECK(fs::exists(dir / "sim" / "snapshot_000003.nsrl"));
    CHECK(fs::exists(dir / "sim" / "config_resolved.nsrl"));
    const std::string stats = slurp(dir / "sim" / "stats.csv");
    CHECK(stats.find("t,energy,enstrophy,dissipation,max_u,max_grad_u") == 0);

    write_config(dir / "scfg.nsrl",
                 "grid.n = 16\ngrid.nu = 0.1\nic.kind = random_divfree\nic.k_max = 4\n"
                 "structure.n_r = 4\nstructure.multiples = 1,2\nstructure.p_list = 2,3\n");
    RunOptions sopt;
    sopt.subcommand = "structure";
    sopt.config_path = (dir / "scfg.nsrl").string();
    sopt.out_dir = (dir / "st").string();
    CHECK(run(sopt) == 0);
    CHECK(slurp(dir / "st" / "structure_radial.csv").find("r,s2_mean,S2_mean,S2_L32_norm") == 0);
    CHECK(slurp(dir / "st" / "structure_moments.csv").find("p,ell,moment,four_fifths_ratio") == 0);

    // report merges whatever is present
    RunOptions ropt;
    ropt.subcommand = "report";
    ropt.out_dir = (dir / "sim").string();
    CHECK(run(ropt) == 0);
    CHECK(fs::exists(dir / "sim" / "report_flow.csv"));
}

TEST_CASE("run: snapshot initial condition round trips through simulate") {
    const fs::path dir = temp_dir("ic");
    GridSpec g;
    g.n = 16;
    g.nu = 0.2;
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 4, 0.5, 31);
    store_snapshot(u, 0.0, (dir / "ic.nsrl").string());
    write_config(dir / "cfg.nsrl", "ic.kind = snapshot\nic.snapshot = " + (dir / "ic.nsrl").string() +
                                       "\nsolver.dt = 0.01\nsolver.t_end = 0.02\n");
    RunOptions opt;
    opt.subcommand = "simulate";
    opt.config_path = (dir / "cfg.nsrl").string();
    opt.out_dir = (dir / "out").string();
    CHECK(run(opt) == 0);
    const Snapshot first = load_snapshot((dir / "out" / "snapshot_000000.nsrl").string());
    CHECK(first.field.grid().nu == 0.2);  // grid travels with the file
}

} // TEST_SUITE
