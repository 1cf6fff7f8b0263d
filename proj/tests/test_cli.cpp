#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string out, err;
};

RunResult run(const std::string& args) {
    std::string out_path = "cli_out.tmp", err_path = "cli_err.tmp";
    std::string cmd = std::string(SKWIDTHS_BIN) + " " + args + " > " + out_path + " 2> " + err_path;
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = (rc >= 256) ? rc / 256 : rc;  // WEXITSTATUS without the macro
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

}  // namespace

TEST_CASE("widths: happy path and the frozen n=3 value") {
    auto r = run("widths --h 1 --beta 0 --n 3 --format json");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"value\":0.12636364711288") != std::string::npos);
    REQUIRE(r.out.find("\"theta\":0.5") != std::string::npos);
    REQUIRE(r.out.find("\"valid_E\":true") != std::string::npos);
    REQUIRE(r.out.find("\"valid_width\":false") != std::string::npos);
    REQUIRE(r.out.find("\"n_star\":3") != std::string::npos);
    REQUIRE(r.out.find("\"n_h\":81") != std::string::npos);
}

TEST_CASE("widths: odd beta hits the pure alternating-series value") {
    auto r = run("widths --h 1 --beta 1 --n 5 --format json");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"theta\":0,") != std::string::npos);
    // (4/pi) sum 1/((2nu+1) cosh(5 (2nu+1)))
    REQUIRE(r.out.find("\"value\":0.0171575218656") != std::string::npos);
}

TEST_CASE("widths: malformed h is a usage error") {
    auto r = run("widths --h -1 --beta 0 --n 3");
    REQUIRE(r.exit_code == 1);
    REQUIRE_FALSE(r.err.empty());
}

TEST_CASE("widths: range expansion and CSV shape") {
    auto r = run("widths --h 1 --beta 0 --n 3:5:1 --format csv");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.rfind("n,h,beta,value,theta,gamma_n,n_star,n_h,valid_E,valid_width\n", 0) == 0);
    int lines = 0;
    for (char c : r.out)
        if (c == '\n') ++lines;
    REQUIRE(lines == 4);  // header + three rows
}

TEST_CASE("byte-identical output on repeated runs") {
    auto a = run("widths --h 0.5:2:0.5 --beta 0:1:0.5 --n 3:6:1 --format json");
    auto b = run("widths --h 0.5:2:0.5 --beta 0:1:0.5 --n 3:6:1 --format json");
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    auto c = run("widths --h 0.5:2:0.5 --beta 0:1:0.5 --n 3:6:1 --format csv");
    auto d = run("widths --h 0.5:2:0.5 --beta 0:1:0.5 --n 3:6:1 --format csv");
    REQUIRE(c.out == d.out);
}

TEST_CASE("thresholds command") {
    auto r = run("thresholds --h 1 --format json");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"n_star\":3") != std::string::npos);
    REQUIRE(r.out.find("\"n_h\":81") != std::string::npos);
    auto r2 = run("thresholds --h 1.3 --format json");
    REQUIRE(r2.out.find("\"n_star\":1") != std::string::npos);
    auto r3 = run("thresholds --h 2 --format json");
    REQUIRE(r3.out.find("\"classical_range\":true") != std::string::npos);
}

TEST_CASE("verify: certified and non-certified exit codes") {
    auto ok = run("verify --h 1 --beta 0.5 --n 81 --format json");
    REQUIRE(ok.exit_code == 0);
    REQUIRE(ok.out.find("\"certified\":true") != std::string::npos);

    auto low = run("verify --h 1 --beta 0.5 --n 9 --format json");
    REQUIRE(low.exit_code == 2);
    REQUIRE(low.out.find("\"satisfied\":true") != std::string::npos);
    REQUIRE(low.out.find("\"certified\":false") != std::string::npos);

    auto classical = run("verify --h 2 --beta 0 --n 3");
    REQUIRE(classical.exit_code == 0);
}

TEST_CASE("spline command reports interpolation quality") {
    auto r = run("spline --h 1 --beta 0.3 --n 4 --y 0.1 --format json");
    REQUIRE(r.exit_code == 0);
    auto pos = r.out.find("\"interp_residual\":");
    REQUIRE(pos != std::string::npos);
    double res = std::strtod(r.out.c_str() + pos + 18, nullptr);
    REQUIRE(res < 1e-10);
}

TEST_CASE("sweep adds condition columns") {
    auto r = run("sweep --h 1 --beta 0 --n 9 --format csv");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("remainder_ok") != std::string::npos);
    REQUIRE(r.out.find("classical_range") != std::string::npos);
}

TEST_CASE("--out writes the same bytes to a file") {
    auto direct = run("thresholds --h 1 --format json");
    auto to_file = run("thresholds --h 1 --format json --out cli_file.tmp");
    REQUIRE(to_file.exit_code == 0);
    REQUIRE(to_file.out.empty());
    std::ifstream f("cli_file.tmp", std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    std::remove("cli_file.tmp");
    REQUIRE(ss.str() == direct.out);
}

TEST_CASE("selfcheck rejects an unreachable tolerance loudly") {
    auto r = run("selfcheck --tol 1e-20");
    REQUIRE(r.exit_code == 3);
    REQUIRE(r.err.find("unreachable") != std::string::npos);
}

TEST_CASE("unknown subcommand is a usage error") {
    auto r = run("frobnicate");
    REQUIRE(r.exit_code == 1);
}
