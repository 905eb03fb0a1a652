#include "doctest.h"

#include "qnnv/bv.hpp"
#include "qnnv/lp.hpp"
#include "qnnv/network.hpp"
#include "qnnv/reduction.hpp"
#include "qnnv/verifier.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace qnnv;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(QNNV_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("qnnv_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

const char* kNet = "format=1\nfnn k=2 dims=1,2,1\nlayer 1\n1\n-1\nbias 0 0\nlayer 2\n1 1\nbias 0\n";

}  // namespace

TEST_CASE("usage errors and bad input") {
    Scratch s;
    CHECK(run("").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("verify --problem reach-q-lp").code == 1);
    CHECK(run("verify --problem reach-q-lp --net " + s / "missing.fnn" + " --spec x").code == 1);
    spit(s / "bad.fnn", "fnn k=1 dims=1,1\nlayer 1\n1 2\nbias 0\n");
    spit(s / "empty.lp", "@in\n@out\n");
    CHECK(run("verify --problem reach-q-lp --net " + s / "bad.fnn" + " --spec " + s / "empty.lp").code == 1);
    spit(s / "n.fnn", kNet);
    CHECK(run("verify --problem reach-f-lp --net " + s / "n.fnn" + " --spec " + s / "empty.lp").code == 1);
    CHECK(run("verify --problem reach-q-lp --backend brute --net " + s / "n.fnn" + " --spec " + s / "empty.lp").code ==
          1);
    CHECK(run("--help").code == 0);
}

TEST_CASE("verify writes parseable, reproducible records") {
    Scratch s;
    spit(s / "n.fnn", kNet);
    // |x| = 3/2 is reachable at x = -3/2
    spit(s / "abs.lp", "@in\nx1 <= 0\n@out\nx1 = 3/2\n");
    const Run a = run("verify --problem reach-q-lp --net " + s / "n.fnn" + " --spec " + s / "abs.lp");
    REQUIRE(a.code == 0);
    const Verdict v = parse_verdict(a.out);
    CHECK(v.valid());
    CHECK(v.input == RationalVector{Rational(BigInt(-3), BigInt(2))});
    CHECK(write_verdict(v) == a.out);
    CHECK(run("verify --problem reach-q-lp --net " + s / "n.fnn" + " --spec " + s / "abs.lp").out == a.out);

    const Run f = run("verify --problem reach-lp --arith fix:b=4,f=1,round=nearest,ovf=sat --net " + s / "n.fnn" +
                      " --spec " + s / "abs.lp" + " --out " + s / "v.txt");
    REQUIRE(f.code == 0);
    const Verdict fv = parse_verdict(slurp(s / "v.txt"));
    CHECK(fv.valid());
    CHECK(fv.backend == Backend::Brute);

    spit(s / "abs.bv", "width 4\n@in\nx1 = 0b1101\n@out\nx1 != 0\n");
    const Run b1 = run("verify --problem reach-bv --backend automata --witness --arith fix:b=4,f=1,round=nearest,ovf=sat "
                       "--net " + s / "n.fnn" + " --spec " + s / "abs.bv");
    const Run b2 = run("verify --problem reach-bv --backend brute --arith fix:b=4,f=1,round=nearest,ovf=sat --net " +
                       s / "n.fnn" + " --spec " + s / "abs.bv");
    REQUIRE(b1.code == 0);
    REQUIRE(b2.code == 0);
    CHECK(b1.out.find("\n# ") != std::string::npos);
    CHECK(parse_verdict(b1.out).outcome == parse_verdict(b2.out).outcome);
    CHECK(parse_verdict(b1.out).input == parse_verdict(b2.out).input);
}

TEST_CASE("resource verdicts exit with 2") {
    Scratch s;
    spit(s / "n.fnn", kNet);
    spit(s / "none.lp", "@in\n@out\nx1 < 0\n");
    const Run r = run("verify --problem reach-lp --arith fix:b=6,f=2,round=nearest,ovf=sat --max-inputs 8 --net " +
                      s / "n.fnn" + " --spec " + s / "none.lp");
    CHECK(r.code == 2);
    const Verdict v = parse_verdict(r.out);
    CHECK(v.outcome == Outcome::Resource);
    CHECK(v.reason == "input_space_too_large");
}

TEST_CASE("reduce output feeds back into verify") {
    Scratch s;
    spit(s / "f.cnf", "p cnf 2 3\n1 2 0\n-1 0\n-2 0\n");
    REQUIRE(run("reduce --dimacs " + s / "f.cnf" + " --out-dir " + s / "r" + " --frac-bits 1").code == 0);
    const Network net = parse_network(slurp(s / "r/network.fnn"));
    CHECK(net == reduce(parse_dimacs(slurp(s / "f.cnf"))).network);
    const std::string arith = slurp(s / "r/format.arith");
    REQUIRE_FALSE(arith.empty());
    parse_format(arith.substr(0, arith.find('\n')));
    const Run q = run("verify --problem reach-q-lp --net " + s / "r/network.fnn" + " --spec " + s / "r/spec.lp");
    CHECK(parse_verdict(q.out).outcome == Outcome::Invalid);

    spit(s / "g.cnf", "p cnf 2 1\n1 -2 0\n");
    REQUIRE(run("reduce --dimacs " + s / "g.cnf" + " --out-dir " + s / "g").code == 0);
    const Run g = run("verify --problem reach-q-lp --net " + s / "g/network.fnn" + " --spec " + s / "g/spec.lp");
    CHECK(parse_verdict(g.out).valid());
}

TEST_CASE("eval, quantise and getbit") {
    Scratch s;
    spit(s / "n.fnn", kNet);
    CHECK(run("eval --net " + s / "n.fnn" + " --input -5/2").out.find("5/2") != std::string::npos);
    const Run q = run("quantise --net " + s / "n.fnn" + " --arith fix:b=3,f=0,round=floor,ovf=sat");
    REQUIRE(q.code == 0);
    CHECK(parse_network(q.out) == parse_network(kNet));
    CHECK(run("getbit --value 5/2 --t 1").out == "1\n");
    CHECK(run("getbit --value 5/2 --t 0").out == "0\n");
    CHECK(run("getbit --value 5/2 --t -1").out == "1\n");
}

TEST_CASE("selfcheck output does not depend on the worker count") {
    const Run one = run("selfcheck --bv 6 --cnf 6 --seed 9 --jobs 1");
    const Run four = run("selfcheck --bv 6 --cnf 6 --seed 9 --jobs 4");
    CHECK(one.code == 0);
    CHECK(one.out == four.out);
    CHECK(one.out.find("12/12 instances agree") != std::string::npos);
}
