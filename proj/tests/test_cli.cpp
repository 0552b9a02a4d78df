#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "coadjoint_cli_test";

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::create_directories(kScratch);
    const fs::path out = kScratch / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path err = kScratch / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string("\"") + LPINT_PATH + "\" " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::create_directories(kScratch);
    const fs::path p = kScratch / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

const char* kQuickTop =
    "[run]\n"
    "model = heavy_top\n"
    "method = tmk\n"
    "dt = 0.01\n"
    "t_final = 1.0\n"
    "seed = 7\n"
    "[heavy_top]\n"
    "inertia = 4.0 2.0 1.0\n";

const char* kQuickSine =
    "[run]\n"
    "model = sine_euler\n"
    "method = tmk\n"
    "dt = 0.5\n"
    "t_final = 5.0\n"
    "seed = 3\n"
    "[sine_euler]\n"
    "n_trunc = 3\n"
    "noise_mode = 1 1 0.1\n"
    "noise_mode = 1 -1 0.1\n"
    "init_seed = 1\n";

}  // namespace

TEST_CASE("cli argument plumbing") {
    SECTION("no subcommand") {
        CliResult r = run_cli("");
        REQUIRE(r.exit_code == 2);
    }
    SECTION("unknown subcommand") {
        CliResult r = run_cli("frobnicate");
        REQUIRE(r.exit_code == 2);
    }
    SECTION("run without --config") {
        CliResult r = run_cli("run");
        REQUIRE(r.exit_code == 2);
    }
    SECTION("help exits cleanly") {
        CliResult r = run_cli("--help");
        REQUIRE(r.exit_code == 0);
        REQUIRE(contains(r.out, "run"));
        REQUIRE(contains(r.out, "selftest"));
    }
}

TEST_CASE("cli config errors exit with code 2") {
    SECTION("missing config file") {
        CliResult r = run_cli("run --config " + (kScratch / "no_such.cfg").string());
        REQUIRE(r.exit_code == 2);
        REQUIRE(contains(r.err, "config error:"));
    }
    SECTION("unknown key") {
        fs::path cfg = write_config("bad_key.cfg", std::string(kQuickTop) + "typo_key = 1\n");
        CliResult r = run_cli("run --config " + cfg.string());
        REQUIRE(r.exit_code == 2);
        REQUIRE(contains(r.err, "typo_key"));
    }
    SECTION("unknown method") {
        std::string text = kQuickTop;
        text.replace(text.find("method = tmk"), 12, "method = rk9");
        fs::path cfg = write_config("bad_method.cfg", text);
        CliResult r = run_cli("run --config " + cfg.string());
        REQUIRE(r.exit_code == 2);
        REQUIRE(contains(r.err, "rk9"));
    }
    SECTION("unknown model") {
        std::string text = kQuickTop;
        text.replace(text.find("model = heavy_top"), 17, "model = light_top");
        fs::path cfg = write_config("bad_model.cfg", text);
        REQUIRE(run_cli("run --config " + cfg.string()).exit_code == 2);
    }
    SECTION("t_final not a whole number of steps") {
        std::string text = kQuickTop;
        text.replace(text.find("t_final = 1.0"), 13, "t_final = 1.004");
        fs::path cfg = write_config("bad_tfinal.cfg", text);
        CliResult r = run_cli("run --config " + cfg.string());
        REQUIRE(r.exit_code == 2);
        REQUIRE(contains(r.err, "whole number"));
    }
}

TEST_CASE("cli run writes the advertised output set") {
    const fs::path dir = kScratch / "run_outputs";
    fs::remove_all(dir);
    const std::string cfg = std::string(CONFIG_DIR) + "/heavytop_gc.cfg";
    CliResult r = run_cli("run --config " + cfg + " --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "run: 10000 steps of tmk on heavy_top"));
    REQUIRE(contains(r.out, "max casimir drift"));

    for (const char* name : {"trajectory.csv", "meta.csv", "drift.csv", "wiener.csv", "manifest.cfg"})
        REQUIRE(fs::exists(dir / name));

    const std::string traj = read_file(dir / "trajectory.csv");
    REQUIRE(first_line(traj) ==
            "t,pi1,pi2,pi3,gamma1,gamma2,gamma3,pi_dot_gamma,gamma_norm2,hamiltonian");
    REQUIRE(count_lines(traj) == 10002);  // header + initial state + 10^4 steps

    REQUIRE(first_line(read_file(dir / "meta.csv")) == "step,t,chord_iters,residual");
    REQUIRE(first_line(read_file(dir / "drift.csv")) == "t,casimir_name,rel_error");
    REQUIRE(first_line(read_file(dir / "wiener.csv")) == "step,driver,dw");

    const std::string manifest = read_file(dir / "manifest.cfg");
    REQUIRE(contains(manifest, "[run]"));
    REQUIRE(contains(manifest, "model = heavy_top"));
    REQUIRE(contains(manifest, "seed = 42"));
    REQUIRE(contains(manifest, "inertia = 4 4 1"));
}

TEST_CASE("cli runs are reproducible and replayable") {
    fs::path cfg = write_config("quick_top.cfg", kQuickTop);
    const fs::path a = kScratch / "det_a";
    const fs::path b = kScratch / "det_b";
    const fs::path c = kScratch / "det_c";
    const fs::path d = kScratch / "det_d";
    for (const fs::path& p : {a, b, c, d}) fs::remove_all(p);

    REQUIRE(run_cli("run --config " + cfg.string() + " --out " + a.string()).exit_code == 0);
    REQUIRE(run_cli("run --config " + cfg.string() + " --out " + b.string()).exit_code == 0);

    SECTION("same seed, bitwise identical outputs") {
        REQUIRE(read_file(a / "trajectory.csv") == read_file(b / "trajectory.csv"));
        REQUIRE(read_file(a / "wiener.csv") == read_file(b / "wiener.csv"));
    }

    SECTION("replaying the exported increments reproduces the run") {
        CliResult r = run_cli("run --config " + cfg.string() + " --out " + c.string() +
                              " --replay " + (a / "wiener.csv").string());
        REQUIRE(r.exit_code == 0);
        REQUIRE(read_file(c / "trajectory.csv") == read_file(a / "trajectory.csv"));
        REQUIRE(contains(read_file(c / "manifest.cfg"), "replay = "));
    }

    SECTION("a different seed changes the trajectory and is recorded") {
        CliResult r =
            run_cli("run --config " + cfg.string() + " --out " + d.string() + " --seed 8");
        REQUIRE(r.exit_code == 0);
        REQUIRE(read_file(d / "trajectory.csv") != read_file(a / "trajectory.csv"));
        REQUIRE(contains(read_file(d / "manifest.cfg"), "seed = 8"));
        REQUIRE(contains(read_file(a / "manifest.cfg"), "seed = 7"));
    }
}

TEST_CASE("cli manifest reloads as a config") {
    SECTION("heavy top") {
        fs::path cfg = write_config("quick_top.cfg", kQuickTop);
        const fs::path a = kScratch / "reload_a";
        const fs::path b = kScratch / "reload_b";
        fs::remove_all(a);
        fs::remove_all(b);
        REQUIRE(run_cli("run --config " + cfg.string() + " --out " + a.string()).exit_code == 0);
        REQUIRE(run_cli("run --config " + (a / "manifest.cfg").string() + " --out " + b.string())
                    .exit_code == 0);
        REQUIRE(read_file(b / "trajectory.csv") == read_file(a / "trajectory.csv"));
    }

    SECTION("sine flow with a seeded init resolves to explicit modes") {
        fs::path cfg = write_config("quick_sine.cfg", kQuickSine);
        const fs::path a = kScratch / "reload_sine_a";
        const fs::path b = kScratch / "reload_sine_b";
        fs::remove_all(a);
        fs::remove_all(b);
        REQUIRE(run_cli("run --config " + cfg.string() + " --out " + a.string()).exit_code == 0);
        const std::string manifest = read_file(a / "manifest.cfg");
        REQUIRE(contains(manifest, "init_mode = "));          // resolved values, not the seed
        REQUIRE(!contains(manifest, "init_seed"));
        REQUIRE(run_cli("run --config " + (a / "manifest.cfg").string() + " --out " + b.string())
                    .exit_code == 0);
        REQUIRE(read_file(b / "trajectory.csv") == read_file(a / "trajectory.csv"));
    }
}

TEST_CASE("cli record_every thins the trajectory but keeps the final row") {
    std::string text = kQuickTop;
    text.replace(text.find("seed = 7\n"), 9, "seed = 7\nrecord_every = 7\n");
    fs::path cfg = write_config("thinned.cfg", text);
    const fs::path dir = kScratch / "thinned_out";
    fs::remove_all(dir);
    REQUIRE(run_cli("run --config " + cfg.string() + " --out " + dir.string()).exit_code == 0);
    const std::string traj = read_file(dir / "trajectory.csv");
    // records 0,7,...,98 plus the forced final record 100, plus the header
    REQUIRE(count_lines(traj) == 17);
    const std::string last = traj.substr(traj.rfind('\n', traj.size() - 2) + 1);
    REQUIRE(last.substr(0, 2) == "1,");
}

TEST_CASE("cli compare runs several methods on one path") {
    fs::path cfg = write_config("quick_top.cfg", kQuickTop);
    const fs::path dir = kScratch / "compare_out";
    fs::remove_all(dir);

    SECTION("default method pair") {
        CliResult r = run_cli("compare --config " + cfg.string() + " --out " + dir.string());
        REQUIRE(r.exit_code == 0);
        REQUIRE(contains(r.out, "compare: tmk max casimir drift"));
        REQUIRE(contains(r.out, "compare: direct_im max casimir drift"));
        const std::string csv = read_file(dir / "compare.csv");
        REQUIRE(first_line(csv) ==
                "t,tmk_pi_dot_gamma,tmk_gamma_norm2,direct_im_pi_dot_gamma,direct_im_gamma_norm2");
        REQUIRE(count_lines(csv) == 102);
        REQUIRE(fs::exists(dir / "wiener.csv"));
        REQUIRE(contains(read_file(dir / "manifest.cfg"), "methods: tmk,direct_im"));
    }

    SECTION("single method") {
        CliResult r = run_cli("compare --config " + cfg.string() + " --out " + dir.string() +
                              " --methods em_mk");
        REQUIRE(r.exit_code == 0);
        REQUIRE(first_line(read_file(dir / "compare.csv")) ==
                "t,em_mk_pi_dot_gamma,em_mk_gamma_norm2");
    }

    SECTION("rkmk on a driven system is rejected") {
        CliResult r = run_cli("compare --config " + cfg.string() + " --out " + dir.string() +
                              " --methods tmk,rkmk");
        REQUIRE(r.exit_code == 2);
        REQUIRE(contains(r.err, "deterministic"));
    }

    SECTION("unknown method name is rejected") {
        CliResult r = run_cli("compare --config " + cfg.string() + " --out " + dir.string() +
                              " --methods tmk,rk9");
        REQUIRE(r.exit_code == 2);
    }
}

TEST_CASE("cli converge fits a strong order") {
    std::string text = kQuickTop;
    text.replace(text.find("dt = 0.01"), 9, "dt = 0.05");
    fs::path cfg = write_config("converge.cfg", text);
    const fs::path dir = kScratch / "converge_out";
    fs::remove_all(dir);

    SECTION("writes the fit table") {
        CliResult r = run_cli("converge --config " + cfg.string() + " --out " + dir.string() +
                              " --levels 3 --seeds 2");
        REQUIRE(r.exit_code == 0);
        REQUIRE(contains(r.out, "converge: fitted slope"));
        REQUIRE(!contains(r.err, "degenerate"));
        const std::string csv = read_file(dir / "order_fit.csv");
        REQUIRE(first_line(csv) == "dt,mean_error,n");
        REQUIRE(count_lines(csv) == 4);
    }

    SECTION("warns about degenerate fits") {
        CliResult r = run_cli("converge --config " + cfg.string() + " --out " + dir.string() +
                              " --levels 2 --seeds 1");
        REQUIRE(r.exit_code == 0);
        REQUIRE(contains(r.err, "degenerate"));
    }

    SECTION("rejects replay") {
        std::string rtext = text;
        rtext.replace(rtext.find("seed = 7\n"), 9, "seed = 7\nreplay = somewhere.csv\n");
        fs::path rcfg = write_config("converge_replay.cfg", rtext);
        CliResult r = run_cli("converge --config " + rcfg.string() + " --out " + dir.string());
        REQUIRE(r.exit_code == 2);
        REQUIRE(contains(r.err, "replay"));
    }
}

TEST_CASE("cli probe sweeps step sizes") {
    std::string text = kQuickTop;
    text.replace(text.find("t_final = 1.0"), 13, "t_final = 50.0");
    fs::path cfg = write_config("probe.cfg", text);
    const fs::path dir = kScratch / "probe_out";
    fs::remove_all(dir);
    CliResult r =
        run_cli("probe --config " + cfg.string() + " --out " + dir.string() + " --dts 0.1,2.5");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "-> Stable"));
    REQUIRE(contains(r.out, "probe: largest stable dt 0.1"));
    const std::string csv = read_file(dir / "stability.csv");
    REQUIRE(first_line(csv) == "dt,verdict");
    REQUIRE(count_lines(csv) == 3);
    REQUIRE(contains(csv, "0.1,Stable"));
    REQUIRE(!contains(csv, "2.5,Stable"));
}

TEST_CASE("cli run reports step failures with exit code 1") {
    std::string text = kQuickSine;
    text.replace(text.find("dt = 0.5"), 8, "dt = 500");
    text.replace(text.find("t_final = 5.0"), 13, "t_final = 1000");
    fs::path cfg = write_config("blowup.cfg", text);
    CliResult r = run_cli("run --config " + cfg.string() + " --out " +
                          (kScratch / "blowup_out").string());
    REQUIRE(r.exit_code == 1);
    REQUIRE(contains(r.err, "step 0 failed"));
    REQUIRE(contains(r.err, "did not converge"));
}

TEST_CASE("cli selftest reports every structural check") {
    CliResult r = run_cli("selftest");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "selftest: all checks passed"));
    std::size_t passes = 0;
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line))
        if (line.rfind("pass", 0) == 0) ++passes;
    REQUIRE(passes == 10);
}
