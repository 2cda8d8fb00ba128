#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spherekit/calculus.hpp"
#include "spherekit/sfun_io.hpp"

#ifndef SPHEREKIT_CLI_PATH
#error "SPHEREKIT_CLI_PATH must be defined by the build"
#endif

using namespace spherekit;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = "/tmp/spherekit_cli_out.txt";
    const std::string cmd = std::string(SPHEREKIT_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

}  // namespace

TEST_CASE("construct prints the summary block and writes a loadable file") {
    const RunResult r = run_cli(
        "construct --expr \"cos(1+2*pi*(x+y)+5*sin(pi*z))\" --out /tmp/spherekit_eq1.sfun");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("unit sphere") != std::string::npos);
    CHECK(r.out.find("rank") != std::string::npos);
    const LowRankSphereFun f = load_sfun("/tmp/spherekit_eq1.sfun");
    CHECK(f.rank() >= 21);
    CHECK(f.rank() <= 25);
}

TEST_CASE("eval and sum2 print 17-digit values") {
    run_cli("construct --expr \"z\" --out /tmp/spherekit_z.sfun");
    RunResult r = run_cli("eval /tmp/spherekit_z.sfun --point 0,0,1");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(std::stod(r.out) - 1.0) < 1e-13);

    r = run_cli("eval /tmp/spherekit_z.sfun --sph 0.4,1.1");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(std::stod(r.out) - std::cos(1.1)) < 1e-13);

    run_cli(
        "construct --expr \"1+x+y^2+x^2*y+x^4+y^5+(x*y*z)^2\" --out /tmp/spherekit_poly.sfun");
    r = run_cli("sum2 /tmp/spherekit_poly.sfun");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(std::stod(r.out) - 216 * kPi / 35) <= 5e-15);
}

TEST_CASE("diff writes the tangential derivative") {
    run_cli("construct --expr \"z\" --out /tmp/spherekit_z.sfun");
    const RunResult r = run_cli("diff /tmp/spherekit_z.sfun --dir x --out /tmp/spherekit_dz.sfun");
    REQUIRE(r.exit_code == 0);
    const LowRankSphereFun d = load_sfun("/tmp/spherekit_dz.sfun");
    const SphPoint p{0.7, 1.2};
    const CartPoint c = sph_to_cart(p);
    CHECK(std::abs(evaluate(d, p) - complex(-c.x * c.z, 0)) < 1e-12);
}

TEST_CASE("sampled csv values match evaluate") {
    run_cli("construct --expr \"cos(2*x)+y*z\" --out /tmp/spherekit_s.sfun");
    const RunResult r =
        run_cli("sample /tmp/spherekit_s.sfun --m 17 --n 24 --format csv --out /tmp/spherekit_s.csv");
    REQUIRE(r.exit_code == 0);
    const LowRankSphereFun f = load_sfun("/tmp/spherekit_s.sfun");

    std::ifstream in("/tmp/spherekit_s.csv");
    std::string line;
    std::getline(in, line);  // header comment
    REQUIRE(line.rfind("#", 0) == 0);
    int i = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        int k = 0;
        while (std::getline(ss, cell, ',')) {
            const double th = kPi * i / 16.0;
            const double lam = -kPi + kTwoPi * k / 24.0;
            CHECK(std::abs(std::stod(cell) - evaluate(f, SphPoint{lam, th}).real()) <
                  1e-13 * std::max(1.0, f.vscale));
            ++k;
        }
        CHECK(k == 24);
        ++i;
    }
    CHECK(i == 17);
}

TEST_CASE("raster formats have proper headers") {
    run_cli("construct --expr \"z\" --out /tmp/spherekit_z.sfun");
    run_cli("sample /tmp/spherekit_z.sfun --m 32 --n 64 --format pgm --out /tmp/spherekit_z.pgm");
    run_cli("sample /tmp/spherekit_z.sfun --m 32 --n 64 --format ppm --out /tmp/spherekit_z.ppm");
    std::ifstream pgm("/tmp/spherekit_z.pgm", std::ios::binary);
    std::string magic;
    pgm >> magic;
    CHECK(magic == "P5");
    std::ifstream ppm("/tmp/spherekit_z.ppm", std::ios::binary);
    ppm >> magic;
    CHECK(magic == "P6");
}

TEST_CASE("poisson and residual work end to end") {
    const RunResult r = run_cli(
        "poisson --expr \"sin(3*x*y*z)\" --m 64 --n 64 --out /tmp/spherekit_u.sfun");
    REQUIRE(r.exit_code == 0);
    run_cli("construct --expr \"sin(3*x*y*z)\" --out /tmp/spherekit_f.sfun");
    const RunResult rr =
        run_cli("residual --rhs /tmp/spherekit_f.sfun --sol /tmp/spherekit_u.sfun");
    REQUIRE(rr.exit_code == 0);
    // interior residual line, first number after the colon
    const size_t pos = rr.out.find("interior residual:");
    REQUIRE(pos != std::string::npos);
    const double resid = std::stod(rr.out.substr(pos + 19));
    CHECK(resid < 1e-10);
}

TEST_CASE("grad, div, curl and vort round trip through files") {
    run_cli("construct --expr \"z+0.3*x\" --out /tmp/spherekit_g.sfun");
    REQUIRE(run_cli("grad /tmp/spherekit_g.sfun --out /tmp/spherekit_gv").exit_code == 0);
    REQUIRE(run_cli("div --in-vec /tmp/spherekit_gv --out /tmp/spherekit_lap.sfun").exit_code == 0);
    REQUIRE(run_cli("curl --in /tmp/spherekit_g.sfun --out /tmp/spherekit_cv").exit_code == 0);
    REQUIRE(run_cli("vort --in-vec /tmp/spherekit_cv --out /tmp/spherekit_vort.sfun").exit_code == 0);
    // vort(curl_scalar(f)) = laplacian(f) = div(grad f)
    const LowRankSphereFun lap = load_sfun("/tmp/spherekit_lap.sfun");
    const LowRankSphereFun vz = load_sfun("/tmp/spherekit_vort.sfun");
    for (double th : {0.4, 1.3, 2.2}) {
        const SphPoint p{0.9, th};
        CHECK(std::abs(evaluate(vz, p) - evaluate(lap, p)) < 1e-10);
    }
}

TEST_CASE("spherical-coordinate expressions construct through --coords sph") {
    const RunResult r = run_cli(
        "construct --expr \"cos(th)+0.2*sin(th)*sin(lam)\" --coords sph --out /tmp/spherekit_sp.sfun");
    REQUIRE(r.exit_code == 0);
    const LowRankSphereFun f = load_sfun("/tmp/spherekit_sp.sfun");
    CHECK(std::abs(evaluate(f, SphPoint{0.5, 1.0}) -
                   complex(std::cos(1.0) + 0.2 * std::sin(1.0) * std::sin(0.5), 0)) < 1e-13);
    // Mismatched coordinate flag is a parse-level failure.
    CHECK(run_cli("construct --expr \"x+y\" --coords sph --out /tmp/never.sfun").exit_code == 2);
}

TEST_CASE("exit codes follow the documented contract") {
    CHECK(run_cli("construct --expr \"x+\" --out /tmp/never.sfun").exit_code == 2);
    CHECK(run_cli("construct --expr \"sin(lam)*x\" --out /tmp/never.sfun").exit_code == 2);
    CHECK(run_cli("construct --badflag").exit_code == 2);
    CHECK(run_cli("eval /tmp/no_such_file_here.sfun --point 1,0,0").exit_code == 4);
    run_cli("construct --expr \"z\" --out /tmp/spherekit_z.sfun");
    CHECK(run_cli("eval /tmp/spherekit_z.sfun --point 0,0,0").exit_code == 3);
    CHECK(run_cli("eval /tmp/spherekit_z.sfun --point 1,0,0").exit_code == 0);
}

TEST_CASE("bench prints a table") {
    const RunResult r = run_cli("bench poisson --sizes 64,128");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("sec/solve") != std::string::npos);
    CHECK(r.out.find("128") != std::string::npos);
}
