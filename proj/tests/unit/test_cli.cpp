#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

// Runs the CLI with `input` on stdin and captures both streams.
Run cli(const std::string& args, const std::string& input = "") {
    spit("cli_stdin.txt", input);
    const std::string cmd = std::string("\"") + CENBAR_CLI_PATH + "\" " + args +
                            " < cli_stdin.txt > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp("cli_stdout.txt");
    r.err = slurp("cli_stderr.txt");
    return r;
}

bool one_error_line(const std::string& err) {
    return err.rfind("error: ", 0) == 0 && err.find('\n') == err.size() - 1;
}

const char* kScenario = R"({"n": 40, "p": 6, "reps": 2, "master_seed": 3})";

}  // namespace

TEST_CASE("transform appends the synthetic response") {
    const auto r = cli("transform", "time,event,x\n1,1,0\n2,0,1\n3,1,2\n");
    CHECK(r.code == 0);
    CHECK(r.out == "time,event,x,ystar\n1,1,0,1\n2,0,1,2\n3,1,2,4\n");
    CHECK(r.err.empty());
}

TEST_CASE("transform reads and writes files") {
    spit("cli_in.csv", "time,event,x\n1,1,0\n2,0,1\n3,1,2\n");
    const auto r = cli("transform -i cli_in.csv -o cli_out.csv");
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(slurp("cli_out.csv") == "time,event,x,ystar\n1,1,0,1\n2,0,1,2\n3,1,2,4\n");
}

TEST_CASE("bad event code exits 2 naming the row") {
    const auto r = cli("fit", "time,event,x\n1,1,0\n2,2,1\n3,1,2\n");
    CHECK(r.code == 2);
    CHECK(one_error_line(r.err));
    CHECK(r.err.find("data row 2") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("empty data exits 2") {
    CHECK(cli("fit", "time,event,x\n").code == 2);
    CHECK(cli("transform", "").code == 2);
}

TEST_CASE("missing input file exits 2") {
    const auto r = cli("fit -i /nonexistent/data.csv");
    CHECK(r.code == 2);
    CHECK(one_error_line(r.err));
}

TEST_CASE("constant column exits 3") {
    const auto r = cli("fit", "time,event,a,flat\n1,1,0,3\n2,1,1,3\n3,0,2,3\n4,1,5,3\n");
    CHECK(r.code == 3);
    CHECK(one_error_line(r.err));
    CHECK(r.err.find("'flat'") != std::string::npos);
}

TEST_CASE("singular unpenalized start exits 4") {
    const auto r = cli("fit --xi 0 --lambda 1", "time,event,a,b\n1,1,0,0\n2,1,1,1\n3,0,2,2\n4,1,5,5\n");
    CHECK(r.code == 4);
    CHECK(one_error_line(r.err));
}

TEST_CASE("fit prints a report") {
    std::string csv = "time,event,a,b\n";
    for (int i = 0; i < 30; ++i) {
        const double a = std::sin(i * 1.7);
        const double b = std::cos(i * 0.9);
        csv += std::to_string(1.0 + 2.0 * a) + ",1," + std::to_string(a) + "," + std::to_string(b) + "\n";
    }
    const auto r = cli("fit --seed 7 --folds 3", csv);
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["schema"] == "cenbar-fit/1");
    CHECK(doc["folds"] == 3);
    CHECK(doc["seed"] == 7);
    CHECK(doc["support"] == nlohmann::json::array({"a"}));
}

TEST_CASE("xi without lambda exits 2") {
    const auto r = cli("fit --xi 1", "time,event,x\n1,1,0\n2,0,1\n3,1,2\n");
    CHECK(r.code == 2);
    CHECK(one_error_line(r.err));
}

TEST_CASE("unknown flag and method exit 2") {
    CHECK(cli("fit --bogus", "").code == 2);
    const auto r = cli("benchmark --methods cbar,ridge", kScenario);
    CHECK(r.code == 2);
    CHECK(one_error_line(r.err));
    CHECK(r.err.find("cbar, lasso, alasso, scad, mcp") != std::string::npos);
}

TEST_CASE("schema violation prints the json pointer") {
    const auto r = cli("simulate", R"({"n": 40, "rho": 1.5})");
    CHECK(r.code == 2);
    CHECK(one_error_line(r.err));
    CHECK(r.err.find("/rho") != std::string::npos);
    CHECK(cli("simulate", R"({"nn": 40})").err.find("/nn") != std::string::npos);
}

TEST_CASE("one replication runs quickly") {
    const auto start = std::chrono::steady_clock::now();
    const auto r = cli("simulate --reps 1", kScenario);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(r.code == 0);
    CHECK(secs < 5.0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["schema"] == "cenbar-report/1");
    CHECK(doc["scenario"]["reps"] == 1);
    REQUIRE(doc["methods"].size() == 1);
    CHECK(doc["methods"][0]["name"] == "cbar");
}

TEST_CASE("benchmark output does not depend on threads") {
    const auto one = cli("benchmark --threads 1 --seed 5", kScenario);
    const auto two = cli("benchmark --threads 2 --seed 5", kScenario);
    REQUIRE(one.code == 0);
    REQUIRE(two.code == 0);
    CHECK(one.out == two.out);
    CHECK(nlohmann::json::parse(one.out)["methods"].size() == 5);
    const auto csv = cli("benchmark --threads 2 --seed 5 --format csv", kScenario);
    CHECK(csv.out.rfind("method,misc,fp,fn,tm,sm,mspe,mab,failures,reps\n", 0) == 0);
}

TEST_CASE("dump one replication") {
    const auto a = cli("simulate --dump-rep 1", kScenario);
    const auto b = cli("simulate --dump-rep 1", kScenario);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("time,event,x1,", 0) == 0);
    CHECK(cli("simulate --dump-rep 2", kScenario).code == 2);
}

TEST_CASE("bad format exits 2") {
    CHECK(cli("simulate --format xml", kScenario).code == 2);
    CHECK(cli("simulate --screen --no-screen", kScenario).code == 2);
}
