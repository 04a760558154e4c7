#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef RANGEBOUND_CLI_PATH
#error "RANGEBOUND_CLI_PATH must name the rangebound executable"
#endif

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(RANGEBOUND_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("rangebound_cli_test_" + name);
    std::ofstream(path) << text;
    return path.string();
}

}  // namespace

TEST_CASE("bound subcommand") {
    const std::string spec = write_temp("r31.json", R"({"mu":[-1,0,1],"sigma":[1,1.7320508,1.4142136]})");
    const Run r = run("bound --input " + spec);
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(std::abs(doc["rho"].get<double>() - 4.0) <= 1e-6);

    const Run again = run("bound --input " + spec);
    CHECK(again.out == r.out);

    const Run csv = run("bound --format csv --input " + spec);
    CHECK(csv.status == 0);
    CHECK(csv.out.find("rho,") != std::string::npos);

    const Run piped = run("bound --input - < " + spec);
    CHECK(piped.out == r.out);
}

TEST_CASE("compare subcommand") {
    const std::string spec = write_temp("ex2.json", R"({"mu":[0,0,0],"sigma":[1,1,3]})");
    const Run r = run("compare --input " + spec);
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["rho"].get<double>() == doctest::Approx(4.41421).epsilon(1e-5));
    CHECK(doc["ag"].get<double>() == doctest::Approx(4.69042).epsilon(1e-5));
}

TEST_CASE("extremal output verifies") {
    const std::string spec = write_temp("r62.json", R"({"mu":[-2,0,2],"sigma":[1,3,1]})");
    const Run e = run("extremal --input " + spec);
    REQUIRE(e.status == 0);
    const auto doc = nlohmann::json::parse(e.out);
    CHECK(doc.contains("joint"));
    CHECK(doc.contains("coupling"));
    CHECK(run("extremal --input " + spec).out == e.out);

    const std::string saved = write_temp("r62_extremal.json", e.out);
    const Run v = run("verify --samples 200000 --input " + saved);
    CHECK(v.status == 0);
    CHECK(run("verify --samples 200000 --input " + spec).status == 0);

    CHECK(run("extremal --format csv --input " + spec).status == 1);
}

TEST_CASE("verify rejects a tampered joint") {
    const std::string spec = write_temp("bad_joint.json",
                                        R"({"spec":{"mu":[0,0],"sigma":[1,1]},"joint":{"support":[[0,0]],"prob":[1]}})");
    CHECK(run("verify --samples 1000 --input " + spec).status == 1);
}

TEST_CASE("exit codes") {
    CHECK(run("bound --input " + write_temp("n1.json", R"({"mu":[0],"sigma":[1]})")).status == 1);
    CHECK(run("bound --input " + write_temp("neg.json", R"({"mu":[0,1],"sigma":[1,-1]})")).status == 1);
    CHECK(run("bound --input " + write_temp("trunc.json", R"({"mu":[0,1)")).status == 1);
    CHECK(run("bound --input /nonexistent/spec.json").status == 1);
    CHECK(run("bound --tol -1 --input " + write_temp("ok.json", R"({"mu":[0,1],"sigma":[1,1]})")).status != 0);
    const std::string hard = write_temp("hard.json", R"({"mu":[-2,0.3,2],"sigma":[1,3,1]})");
    CHECK(run("bound --tol 1e-300 --input " + hard).status == 2);
}

TEST_CASE("paper-examples subcommand") {
    const Run r = run("paper-examples");
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["examples"].size() > 20);
    CHECK(run("paper-examples").out == r.out);
    const Run csv = run("paper-examples --format csv");
    CHECK(csv.status == 0);
    CHECK(csv.out.rfind("example,quantity,value,target,tolerance,pass\n", 0) == 0);
}
