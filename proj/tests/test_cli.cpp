#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string binary_path() {
    const char* env = std::getenv("MCCEIV_BIN");
    REQUIRE_MESSAGE(env != nullptr, "MCCEIV_BIN must point at the mcceiv binary");
    return env;
}

RunResult run(const std::string& args) {
    const std::string command = binary_path() + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    while (std::size_t got = std::fread(buffer, 1, sizeof buffer, pipe))
        result.out.append(buffer, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("mcceiv-cli-test-" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

double cell_value(const std::vector<std::vector<std::string>>& rows, const std::string& row_key,
                  std::size_t key_col, const std::string& column) {
    std::size_t col = SIZE_MAX;
    for (std::size_t j = 0; j < rows[0].size(); ++j)
        if (rows[0][j] == column) col = j;
    REQUIRE(col != SIZE_MAX);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i][key_col] == row_key) return std::stod(rows[i][col]);
    FAIL("row not found: ", row_key);
    return 0.0;
}

}  // namespace

TEST_CASE("generate rejects n = 0 with exit code 2") {
    const RunResult result = run("generate --n 0 --output " + (work_dir() / "zero.csv").string());
    CHECK(result.exit_code == 2);
    CHECK(result.out.find("error") != std::string::npos);
}

TEST_CASE("generate is reproducible byte for byte") {
    const fs::path a = work_dir() / "gen-a.csv";
    const fs::path b = work_dir() / "gen-b.csv";
    const std::string flags =
        "generate --scenario scalar --w0 3.0 --n 400 --alpha 0.15 --beta 0.15 --mu-u 10 "
        "--mu-v 10 --var-u 0.001 --var-v 0.001 --seed 7 --output ";
    CHECK(run(flags + a.string()).exit_code == 0);
    CHECK(run(flags + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a.parent_path() / "gen-a.meta.json") ==
          slurp(b.parent_path() / "gen-b.meta.json"));
    const auto rows = parse_csv(slurp(a));
    CHECK(rows.size() == 401);  // header + samples
    CHECK(rows[0] == std::vector<std::string>{"i", "x", "u", "v", "x_obs", "d"});
}

TEST_CASE("estimate on generated data round-trips and solvers agree") {
    const fs::path data = work_dir() / "ds.csv";
    REQUIRE(run("generate --n 800 --seed 5 --output " + data.string()).exit_code == 0);

    const fs::path fp_out = work_dir() / "est-fp.csv";
    const fs::path grid_out = work_dir() / "est-grid.csv";
    CHECK(run("estimate --data " + data.string() + " --output " + fp_out.string()).exit_code == 0);
    CHECK(run("estimate --data " + data.string() + " --estimators mcc --solver grid --output " +
              grid_out.string())
              .exit_code == 0);

    const auto fp_rows = parse_csv(slurp(fp_out));
    REQUIRE(fp_rows.size() == 5);  // header + four estimators
    for (std::size_t i = 1; i < fp_rows.size(); ++i) CHECK(fp_rows[i][1] == "true");

    const double w_fp = cell_value(fp_rows, "mcc", 0, "w_hat");
    const auto grid_rows = parse_csv(slurp(grid_out));
    const double w_grid = cell_value(grid_rows, "mcc", 0, "w_hat");
    CHECK(std::abs(w_fp - w_grid) < 1e-3);

    // the MCC estimate stays within w0 +- xi from the bound command
    const RunResult bound = run("bound --data " + data.string());
    CHECK(bound.exit_code == 0);
    const auto bound_rows = parse_csv(bound.out);
    REQUIRE(bound_rows.size() == 2);
    std::size_t xi_col = SIZE_MAX, adm_col = SIZE_MAX;
    for (std::size_t j = 0; j < bound_rows[0].size(); ++j) {
        if (bound_rows[0][j] == "xi") xi_col = j;
        if (bound_rows[0][j] == "admissible") adm_col = j;
    }
    REQUIRE(xi_col != SIZE_MAX);
    CHECK(bound_rows[1][adm_col] == "true");
    const double xi = std::stod(bound_rows[1][xi_col]);
    CHECK(std::abs(w_grid - 3.0) <= xi);
}

TEST_CASE("estimate reports parse failures with exit code 2") {
    const fs::path bogus = work_dir() / "bogus.csv";
    std::ofstream(bogus) << "not,a,dataset\n1,2,3\n";
    CHECK(run("estimate --data " + bogus.string()).exit_code == 2);
    CHECK(run("estimate --data " + (work_dir() / "missing.csv").string()).exit_code == 2);
}

TEST_CASE("bound command reproduces the corollary examples") {
    const RunResult c1 =
        run("bound --n 10 --m 8 --eps-u 0.07 --eps-v 0.07 --w0-abs 3 --c 1 --lambda 1.2");
    CHECK(c1.exit_code == 0);
    const auto c1_rows = parse_csv(c1.out);
    CHECK(std::abs(cell_value(c1_rows, "10", 0, "xi") - 0.6861943) < 1e-6);

    const RunResult c2 = run("bound --eps-u 0 --eps-v 0 --sigma 0.1 --c 0.5 --n 10 --m 8");
    CHECK(c2.exit_code == 0);
    CHECK(std::abs(cell_value(parse_csv(c2.out), "10", 0, "xi") - 0.1517055) < 1e-6);

    const RunResult bad = run("bound --m 5 --n 10");
    CHECK(bad.exit_code == 0);  // informational, not an error
    CHECK(bad.out.find("false") != std::string::npos);
    CHECK(bad.out.find("Assumption 1") != std::string::npos);
}

TEST_CASE("sweep preset emits the expected table shape and manifest") {
    const fs::path out = work_dir() / "t1.csv";
    const RunResult result =
        run("sweep --preset table1 --runs 2 --n 150 --seed 1 --output " + out.string());
    CHECK(result.exit_code == 0);
    const auto rows = parse_csv(slurp(out));
    CHECK(rows.size() == 1 + 11 * 4);  // 11 sweep points x 4 estimators
    CHECK(fs::exists(work_dir() / "t1.manifest.json"));

    CHECK(run("sweep --preset nope").exit_code == 2);
}

TEST_CASE("sweep output is byte-identical for a fixed seed") {
    const fs::path a = work_dir() / "det-a.csv";
    const fs::path b = work_dir() / "det-b.csv";
    const std::string flags = "sweep --preset fig5-sigma --runs 2 --n 120 --seed 3 --output ";
    REQUIRE(run(flags + a.string()).exit_code == 0);
    REQUIRE(run(flags + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    const fs::path c = work_dir() / "det-c.csv";
    REQUIRE(run("sweep --preset fig5-sigma --runs 2 --n 120 --seed 4 --output " + c.string())
                .exit_code == 0);
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("verify prints a violation count and exits zero on success") {
    const RunResult result = run("verify --trials 3 --seed 3");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("violations: 0") != std::string::npos);
    CHECK(result.out.find("margin") != std::string::npos);

    CHECK(run("verify --trials 0").exit_code == 2);
}

TEST_CASE("config file values apply and flags override them") {
    const fs::path config = work_dir() / "gen.json";
    std::ofstream(config) << R"({"n": 120, "seed": 9, "mu_u": 5.0})" << "\n";

    const fs::path from_file = work_dir() / "cfg-a.csv";
    REQUIRE(run("generate --config " + config.string() + " --output " + from_file.string())
                .exit_code == 0);
    CHECK(parse_csv(slurp(from_file)).size() == 121);

    const fs::path overridden = work_dir() / "cfg-b.csv";
    REQUIRE(run("generate --config " + config.string() + " --n 60 --output " +
                overridden.string())
                .exit_code == 0);
    CHECK(parse_csv(slurp(overridden)).size() == 61);
}

TEST_CASE("seed flows from the environment unless a flag wins") {
    const fs::path by_flag = work_dir() / "env-a.csv";
    const fs::path by_env = work_dir() / "env-b.csv";
    const fs::path flag_wins = work_dir() / "env-c.csv";
    REQUIRE(run("generate --n 50 --seed 4 --output " + by_flag.string()).exit_code == 0);

    setenv("MCCEIV_SEED", "4", 1);
    REQUIRE(run("generate --n 50 --output " + by_env.string()).exit_code == 0);
    CHECK(slurp(by_flag) == slurp(by_env));
    REQUIRE(run("generate --n 50 --seed 6 --output " + flag_wins.string()).exit_code == 0);
    CHECK(slurp(by_flag) != slurp(flag_wins));
    unsetenv("MCCEIV_SEED");
}

TEST_CASE("fir dataset round-trips through generate and estimate") {
    const fs::path data = work_dir() / "fir.csv";
    REQUIRE(run("generate --scenario fir --n 600 --alpha 0.3 --beta 0.3 --var-u 0.01 "
                "--var-v 0.01 --mu-u 5 --mu-v 5 --seed 2 --output " +
                data.string())
                .exit_code == 0);
    const fs::path out = work_dir() / "fir-est.csv";
    REQUIRE(run("estimate --data " + data.string() + " --sigma 1.0 --output " + out.string())
                .exit_code == 0);
    const auto rows = parse_csv(slurp(out));
    REQUIRE(rows.size() == 5);
    // nine tap columns in the output
    CHECK(rows[0][2] == "w_hat_0");
    CHECK(rows[0][10] == "w_hat_8");
    const double mcc_tap4 = cell_value(rows, "mcc", 0, "w_hat_4");
    CHECK(std::abs(mcc_tap4 - 0.5) < 0.15);
}
