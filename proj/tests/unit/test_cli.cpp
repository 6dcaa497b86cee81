#include "evacast/core/error.hpp"
#include "evacast/interfaces/cli.hpp"
#include "evacast/pipeline/config.hpp"

#include "fixtures.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace evacast;
using namespace evacast::interfaces;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Exit status of the real binary with output discarded.
int run_binary(const std::string& args) {
    const std::string cmd = std::string(EVACAST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quick_config(const testing::TempDir& dir) {
    pipeline::ExperimentConfig c;
    c.data.n_links = 30;
    c.data.hurricanes = {"ida", "zeta"};
    c.seeds = {1, 2};
    c.mlp_hidden = {8};
    c.mlp_adam.epochs = 2;
    c.horizons = {1};
    c.lstm_hidden = 4;
    c.lstm_layers = 1;
    c.rnn_hidden = 4;
    c.seq_adam.epochs = 1;
    c.max_train_sequences = 100;
    c.max_val_sequences = 50;
    const auto path = (dir / "config.json").string();
    std::ofstream(path) << pipeline::config_to_json(c).dump(2);
    return path;
}

} // namespace

TEST_CASE("exit codes by error category") {
    CHECK(exit_code_for(ParseError("x")) == kExitData);
    CHECK(exit_code_for(ValidationError("x")) == kExitData);
    CHECK(exit_code_for(IncompatibleVersionError("x")) == kExitData);
    CHECK(exit_code_for(TrainingError("x")) == kExitRuntime);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitRuntime);
}

TEST_CASE("usage errors exit 1 with usage text") {
    auto r = cli({"synth", "--bogus"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = cli({});
    CHECK(r.code == kExitUsage);
    r = cli({"train", "--task", "medium", "--out", "x.json"});
    CHECK(r.code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
    CHECK(run_binary("--bogus") == kExitUsage);
    CHECK(run_binary("synth --bogus") == kExitUsage);
    CHECK(run_binary("--help") == kExitOk);
}

TEST_CASE("synth is deterministic for a seed") {
    testing::TempDir dir("cli_synth");
    const auto a = cli({"synth", "--links", "30", "--seed", "1", "--out", (dir / "a").string()});
    const auto b = cli({"synth", "--links", "30", "--seed", "1", "--out", (dir / "b").string()});
    REQUIRE(a.code == kExitOk);
    REQUIRE(b.code == kExitOk);
    CHECK(slurp(dir / "a/manifest.json") == slurp(dir / "b/manifest.json"));
    CHECK(slurp(dir / "a/speeds_ida.csv") == slurp(dir / "b/speeds_ida.csv"));
    CHECK(slurp(dir / "a/network.geojson") == slurp(dir / "b/network.geojson"));
    CHECK(a.out.find("nearby") != std::string::npos);
    const auto m = json::parse(slurp(dir / "a/manifest.json"));
    CHECK(m["hurricanes"].size() == 5);

    const auto c = cli({"synth", "--links", "30", "--seed", "2", "--out", (dir / "c").string()});
    CHECK(slurp(dir / "a/speeds_ida.csv") != slurp(dir / "c/speeds_ida.csv"));
    CHECK(cli({"synth", "--hurricanes", "katrina", "--out", (dir / "d").string()}).code == kExitData);
}

TEST_CASE("data errors exit 2") {
    testing::TempDir dir("cli_err");
    CHECK(cli({"train", "--task", "long", "--data", (dir / "nope").string(), "--out", (dir / "m.json").string()})
              .code == kExitData);
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK(cli({"eval", "--task", "long", "--config", (dir / "bad.json").string()}).code == kExitData);
    CHECK(cli({"predict-grid", "--model", (dir / "missing.json").string(), "--hurricane", "ida", "--out",
               (dir / "g.geojson").string()})
              .code == kExitData);
}

TEST_CASE("train, evaluate and predict from the command line") {
    testing::TempDir dir("cli_flow");
    const auto data = (dir / "data").string();
    REQUIRE(cli({"synth", "--links", "30", "--hurricanes", "ida,zeta", "--out", data}).code == kExitOk);
    const auto mlp = (dir / "mlp.json").string();
    auto r = cli({"train", "--task", "long", "--data", data, "--epochs", "2", "--out", mlp});
    REQUIRE(r.code == kExitOk);

    r = cli({"eval", "--task", "long", "--data", data, "--model", mlp, "--seed", "1"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("Accuracy") != std::string::npos);

    const auto geo = (dir / "grid.geojson").string();
    r = cli({"predict-grid", "--model", mlp, "--hurricane", "ida", "--data", data, "--out", geo});
    REQUIRE(r.code == kExitOk);
    const auto g = json::parse(slurp(geo));
    REQUIRE(g["features"].size() == 30);
    for (const auto& f : g["features"]) CHECK(f["properties"]["labels"].size() == 28);

    const auto lstm = (dir / "lstm.json").string();
    r = cli({"train", "--task", "short", "--horizon", "3", "--data", data, "--epochs", "1", "--max-train", "100",
             "--out", lstm});
    REQUIRE(r.code == kExitOk);

    // the last day of history for one link
    const auto speeds = slurp(dir / "data/speeds_ida.csv");
    std::istringstream in(speeds);
    std::string line, link;
    std::vector<std::string> rows;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto id = line.substr(0, line.find(','));
        if (link.empty()) link = id;
        if (id == link) rows.push_back(line);
    }
    REQUIRE(rows.size() > 100);
    std::ofstream hist(dir / "hist.csv");
    hist << "link_id,timestamp,speed_mph\n";
    for (std::size_t i = 100; i < 124; ++i) hist << rows[i] << "\n";
    hist.close();

    r = cli({"predict-speed", "--model", lstm, "--link", link, "--history", (dir / "hist.csv").string(), "--horizon",
             "3", "--hurricane", "ida", "--data", data, "--seed", "4"});
    REQUIRE(r.code == kExitOk);
    const auto p = json::parse(r.out);
    CHECK(p["link_id"] == link);
    CHECK(p["horizon_h"] == 3);
    CHECK(p["ci95_low"].get<double>() <= p["mean"].get<double>());

    // horizon must match the model
    r = cli({"predict-speed", "--model", lstm, "--link", link, "--history", (dir / "hist.csv").string(), "--horizon",
             "1", "--data", data});
    CHECK(r.code == kExitData);
}

TEST_CASE("experiments re-run from their config snapshot are identical") {
    testing::TempDir dir("cli_exp");
    const auto cfg = quick_config(dir);
    const auto first = (dir / "r1.json").string();
    const auto second = (dir / "r2.json").string();
    REQUIRE(cli({"experiment", "--task", "all", "--config", cfg, "--out", first}).code == kExitOk);
    REQUIRE(cli({"experiment", "--task", "all", "--config", first, "--out", second}).code == kExitOk);
    CHECK(slurp(first) == slurp(second));
    const auto j = json::parse(slurp(first));
    CHECK(j.contains("long"));
    CHECK(j.contains("short"));
    CHECK(j.contains("ablation"));
}
