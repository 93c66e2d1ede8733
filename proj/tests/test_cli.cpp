#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "parlab/mesh_io.hpp"

using namespace parlab;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PARLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const auto d = fs::temp_directory_path() / ("parlab_cli_" + tag);
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("cli capacity pipeline") {
    const auto out = fresh_dir("cap");
    REQUIRE(run_cli("capacity --gen annulus:1,2,0.03 --out " + out.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(out / "capacity.json"));
    CHECK(std::abs(j["value"].get<double>() - 2 * kPi / std::log(2.0)) <
          0.01 * 2 * kPi / std::log(2.0));
    CHECK(fs::exists(out / "potential.csv"));
    CHECK(fs::exists(out / "config_effective.json"));

    // byte-identical outputs across runs
    const auto out2 = fresh_dir("cap2");
    REQUIRE(run_cli("capacity --gen annulus:1,2,0.03 --out " + out2.string()) == 0);
    CHECK(slurp(out / "capacity.json") == slurp(out2 / "capacity.json"));
    CHECK(slurp(out / "potential.csv") == slurp(out2 / "potential.csv"));
}

TEST_CASE("cli exit code contract") {
    const auto out = fresh_dir("err");
    // no mesh source
    CHECK(run_cli("capacity --out " + out.string()) == 3);
    // nonexistent mesh file
    CHECK(run_cli("capacity --mesh /nonexistent/mesh.json --out " + out.string()) == 3);
    // malformed generator spec
    CHECK(run_cli("capacity --gen annulus:1 --out " + out.string()) == 3);
    // condenser invariant violation: plate equals ground
    CHECK(run_cli("capacity --gen annulus:1,2,0.1 --plate inner --ground inner --out " +
                  out.string()) == 2);
    // stochastic method without a seed
    CHECK(run_cli("classify --method walk --out " + out.string()) == 3);
    // unknown theorem / method
    CHECK(run_cli("reproduce --theorem nope --out " + out.string()) == 3);
    CHECK(run_cli("classify --method nope --out " + out.string()) == 3);
}

TEST_CASE("cli classify pipelines") {
    const auto out = fresh_dir("cls1");
    REQUIRE(run_cli("classify --method volume --model euclidean --sector 0.5 --out " +
                    out.string()) == 0);
    auto j = nlohmann::json::parse(slurp(out / "classification.json"));
    CHECK(j["verdict"] == "Parabolic");
    CHECK(fs::exists(out / "evidence.csv"));

    const auto out2 = fresh_dir("cls2");
    REQUIRE(run_cli("classify --method capacity --model hyperbolic --out " + out2.string()) == 0);
    j = nlohmann::json::parse(slurp(out2 / "classification.json"));
    CHECK(j["verdict"] == "NonParabolic");

    const auto out3 = fresh_dir("cls3");
    REQUIRE(run_cli("classify --method walk --seed 42 --trials 2000 --out " + out3.string()) == 0);
    j = nlohmann::json::parse(slurp(out3 / "walk_estimate.json"));
    CHECK(j["trials"] == 2000);
    CHECK(j["seed"] == 42);
    const double p = j["p_hat"].get<double>();
    CHECK(p > 0.2);
    CHECK(p < 0.6);
}

TEST_CASE("cli mesh generation writes a valid mesh") {
    const auto out = fresh_dir("mesh");
    REQUIRE(run_cli("mesh --gen halfdisk:1,0.2 --out " + out.string()) == 0);
    const auto m = load_mesh((out / "mesh.json").string());
    CHECK(m.num_triangles() > 0);
    CHECK_FALSE(vertices_on_marker(m, "wall").empty());
}

TEST_CASE("cli config file with flag override") {
    const auto out = fresh_dir("cfg");
    fs::create_directories(out);
    const auto cfg_path = out / "run.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"gen": "annulus:1,2,0.2", "out": ")" << (out / "from_file").string()
            << R"("})";
    }
    // flag --out wins over the file's out
    REQUIRE(run_cli("capacity --config " + cfg_path.string() + " --out " +
                    (out / "from_flag").string()) == 0);
    CHECK(fs::exists(out / "from_flag" / "capacity.json"));
    CHECK_FALSE(fs::exists(out / "from_file" / "capacity.json"));
    const auto eff =
        nlohmann::json::parse(slurp(out / "from_flag" / "config_effective.json"));
    CHECK(eff["gen"] == "annulus:1,2,0.2"); // from the file
}
