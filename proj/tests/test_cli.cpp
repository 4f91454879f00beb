#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "aggr/cli/commands.hpp"
#include "aggr/cli/config.hpp"
#include "aggr/replication/replication.hpp"

namespace fs = std::filesystem;
using namespace aggr;
using namespace aggr::cli;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("aggr_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
    std::string read(const std::string& name) const {
        std::ifstream in(path / name, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }
};

std::string chain_text(const OptionChain& c) {
    std::ostringstream os;
    os.precision(17);
    os << "# forward=" << c.forward() << " maturity=" << c.maturity() << "\nstrike,price\n";
    for (std::size_t i = 0; i < c.size(); ++i) os << c.strikes()[i] << ',' << c.prices()[i] << '\n';
    return os.str();
}

// Reads `key` column for the row whose first field is `row` from a small CSV.
double csv_value(const std::string& text, const std::string& row, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    const auto header = split_list(line);
    const auto col = std::find(header.begin(), header.end(), key) - header.begin();
    while (std::getline(in, line)) {
        const auto f = split_list(line);
        if (!f.empty() && f[0] == row) return std::stod(f.at(col));
    }
    FAIL("row not found: " << row);
    return 0;
}

} // namespace

TEST_CASE("config parsing reports the line") {
    std::istringstream dup("seed = 1\n[bias]\nn_paths = 10\n\n  n_paths = 20\n");
    try {
        Config::parse(dup, "x.ini");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x.ini:5") != std::string::npos);
    }
    std::istringstream junk("[model\n");
    CHECK_THROWS_AS(Config::parse(junk), ConfigError);
    std::istringstream nokey("[a]\njust words\n");
    CHECK_THROWS_AS(Config::parse(nokey), ConfigError);

    std::istringstream ok("# c\nseed = 5 ; trailing\n[bias]\npartitions = regular(1), times(0.5, 1)\n");
    const auto cfg = Config::parse(ok);
    CHECK(cfg.get_u64("", "seed") == 5);
    CHECK(cfg.get_list("bias", "partitions") == std::vector<std::string>{"regular(1)", "times(0.5, 1)"});
    CHECK(cfg.get_size("bias", "n_paths", 7) == 7);
}

TEST_CASE("unknown keys, sections and bad values exit 1") {
    TempDir d;
    auto r = run_cli({"bias", d.write("a.ini", "[bias]\nn_path = 10\n")});
    CHECK(r.code == kValidationFailure);
    CHECK(r.err.find("a.ini:2: [bias] n_path: unknown key") != std::string::npos);

    r = run_cli({"bias", d.write("b.ini", "[biass]\n")});
    CHECK(r.code == kValidationFailure);

    r = run_cli({"bias", d.write("c.ini", "[model]\nkind = gbm\nkappa = 2\n")});
    CHECK(r.code == kValidationFailure);
    CHECK(r.err.find("kappa") != std::string::npos);

    r = run_cli({"bias", d.write("e.ini", "[model]\nkind = gbm\nsigma = -1\n")});
    CHECK(r.code == kValidationFailure);

    r = run_cli({"bias", d.write("f.ini", "[bias]\npartitions = weekly(3)\n")});
    CHECK(r.code == kValidationFailure);

    r = run_cli({"bias", d.write("g.ini", "[model]\nkind = heston\nmode = nested_mc\n[bias]\ncharacteristics = RTM\n")});
    CHECK(r.code == kValidationFailure);
    CHECK(r.err.find("target.RTM") != std::string::npos);

    r = run_cli({"figures", d.write("h.ini", "[figures]\nfigures = fig1, fig9\n")});
    CHECK(r.code == kValidationFailure);
    CHECK(r.err.find("fig9") != std::string::npos);

    CHECK(run_cli({"bias", (d.path / "missing.ini").string()}).code == kValidationFailure);
    CHECK(run_cli({"nonsense"}).code == kValidationFailure);
    CHECK(run_cli({}).code == kValidationFailure);
    CHECK(run_cli({"--help"}).code == kSuccess);
}

TEST_CASE("partition parsing") {
    const SeedSpec seed{1, 0};
    CHECK(parse_partition("regular(4)", 1.0, seed).intervals() == 4);
    const auto r = parse_partition("random(5)", 1.0, seed, 2);
    CHECK(r.intervals() == 5);
    auto times = [](const Partition& p) { return std::vector<double>(p.times().begin(), p.times().end()); };
    CHECK(times(r) == times(parse_partition("random(5)", 1.0, seed, 2)));
    CHECK(times(r) != times(parse_partition("random(5)", 1.0, seed, 3)));
    CHECK(times(parse_partition("times(0.25, 0.5, 1)", 1.0, seed)) == std::vector<double>{0.0, 0.25, 0.5, 1.0});
    CHECK_THROWS_AS(parse_partition("times(0.25, 0.5)", 1.0, seed), ValidationError);
    CHECK_THROWS_AS(parse_partition("regular(0)", 1.0, seed), ValidationError);
    CHECK_THROWS_AS(parse_partition("regular", 1.0, seed), ValidationError);
}

TEST_CASE("ap-check defaults pass; one step zeroes every residual") {
    TempDir d;
    auto r = run_cli({"ap-check", "--out", d.path.string()});
    CHECK(r.code == kSuccess);
    const auto csv = d.read("ap_check.csv");
    for (const char* c : {"LV", "NTM", "RV", "RTM", "RFM"}) CHECK(csv_value(csv, c, "max_scaled") <= 1e-12);
    CHECK(csv_value(csv, "SLR", "max_scaled") > 1e-8);

    r = run_cli({"ap-check", d.write("one.ini", "[lattice]\nsteps = 1\n"), "--out", d.path.string()});
    const auto one = d.read("ap_check.csv");
    for (const char* c : {"LV", "NTM", "RV", "RTM", "RFM", "SLR"}) CHECK(csv_value(one, c, "max_abs") <= 1e-15);
    CHECK(r.code == kCheckFailure); // the control no longer exceeds the tolerance
}

TEST_CASE("bias output does not depend on the thread count") {
    TempDir d;
    const auto cfg = d.write("b.ini",
                             "seed = 9\n[model]\nkind = merton\nsigma = 0.2\njump_intensity = 1\njump_mean = -0.05\n"
                             "jump_stdev = 0.05\n[bias]\ncharacteristics = LV, RTM\npartitions = regular(12), random(12)\n"
                             "n_paths = 3000\nexport_paths = p.csv\nexport_partition = 1\n");
    const auto a = d.path / "t1", b = d.path / "t4";
    const auto r1 = run_cli({"bias", cfg, "--out", a.string(), "--threads", "1"});
    const auto r4 = run_cli({"bias", cfg, "--out", b.string(), "--threads", "4"});
    CHECK(r1.code == r4.code);
    CHECK(d.read("t1/bias.csv") == d.read("t4/bias.csv"));
    CHECK(d.read("t1/p.csv") == d.read("t4/p.csv"));
    CHECK(!d.read("t1/p.csv").empty());
}

TEST_CASE("simulate matches the first bias partition") {
    TempDir d;
    const std::string model = "seed = 4\n[model]\nkind = gbm\nsigma = 0.3\n";
    run_cli({"bias", d.write("b.ini", model + "[bias]\npartitions = regular(6)\nn_paths = 40\nexport_paths = b.csv\n"),
             "--out", d.path.string()});
    const auto r = run_cli({"simulate",
                            d.write("s.ini", model + "[simulate]\npartition = regular(6)\nn_paths = 40\n"
                                                     "components = F, y, Y, P2, P3\noutput = s.csv\n"),
                            "--out", d.path.string()});
    CHECK(r.code == kSuccess);
    CHECK(d.read("b.csv") == d.read("s.csv"));
}

TEST_CASE("bias export feeds premium with the same realised mean") {
    TempDir d;
    const auto bias = run_cli({"bias",
                               d.write("b.ini", "seed = 2\n[model]\nkind = gbm\nsigma = 0.2\n[bias]\ncharacteristics = RTM\n"
                                                "partitions = regular(50)\nn_paths = 4000\nexport_paths = paths.csv\n"),
                               "--out", d.path.string()});
    REQUIRE(bias.code != kValidationFailure);
    d.write("chain.csv", chain_text(synth_chain(100.0, 0.2, 1.0)));
    const auto prem = run_cli({"premium",
                               d.write("p.ini", "[premium]\npaths = paths.csv\nchain = chain.csv\ncharacteristic = RTM\n"),
                               "--out", d.path.string()});
    REQUIRE(prem.code == kSuccess);
    const double from_bias = csv_value(d.read("bias.csv"), "RTM regular(50)", "mean");
    const double from_premium = csv_value(d.read("premium.csv"), "RTM", "realised_mean");
    CHECK(std::abs(from_premium - from_bias) <= 1e-12 * std::max(1.0, std::abs(from_bias)));
    CHECK(std::abs(csv_value(d.read("premium.csv"), "RTM", "implied")) < 1e-6);

    const auto mismatch = run_cli({"premium",
                                   d.write("q.ini", "[premium]\npaths = paths.csv\nchain = chain.csv\n"
                                                    "characteristic = RTM\norder = 3\n"),
                                   "--out", d.path.string()});
    CHECK(mismatch.code == kValidationFailure);
}

TEST_CASE("replicate edge cases") {
    TempDir d;
    const auto dense = synth_chain(100.0, 0.2, 1.0, 91, 4.0);
    std::vector<double> k, q;
    for (std::size_t i = 0; i < dense.size(); i += 10) {
        k.push_back(dense.strikes()[i]);
        q.push_back(dense.prices()[i]);
    }
    d.write("sparse.csv", chain_text(OptionChain(100.0, 1.0, k, q)));
    auto r = run_cli({"replicate", d.write("s.ini", "[replicate]\nchain = sparse.csv\n"), "--out", d.path.string()});
    CHECK(r.code == kValidationFailure);

    std::string zero = "# forward=50 maturity=0.5\nstrike,price\n";
    for (int i = 0; i < 40; ++i) zero += std::to_string(30 + i) + ",0\n";
    d.write("zero.csv", zero);
    r = run_cli({"replicate", d.write("z.ini", "[replicate]\nchain = zero.csv\n"), "--out", d.path.string()});
    REQUIRE(r.code == kSuccess);
    const auto csv = d.read("replicate.csv");
    CHECK(csv_value(csv, "Y", "value") == std::log(50.0));
    CHECK(csv_value(csv, "variance", "value") == 0.0);

    d.write("bad.csv", "# forward=50 maturity=0.5\nstrike,price\n10,abc\n");
    r = run_cli({"replicate", d.write("b.ini", "[replicate]\nchain = bad.csv\n"), "--out", d.path.string()});
    CHECK(r.code == kValidationFailure);
    CHECK(r.err.find("bad.csv") != std::string::npos);

    r = run_cli({"replicate", d.write("g.ini", "[replicate]\nchain = zero.csv\nn_points = 100\n"), "--out", d.path.string()});
    CHECK(r.code == kValidationFailure);
}

TEST_CASE("figures write one CSV per figure") {
    TempDir d;
    const auto r = run_cli({"figures", d.write("f.ini", "[figures]\nfigures = fig1, fig3\ngrid_points = 61\n"), "--out",
                            d.path.string()});
    CHECK(r.code == kSuccess);
    CHECK(fs::exists(d.path / "fig1.csv"));
    CHECK(fs::exists(d.path / "fig3.csv"));
    CHECK(!fs::exists(d.path / "fig2.csv"));
}

TEST_CASE("efficiency from a polynomial") {
    TempDir d;
    const auto r = run_cli({"efficiency",
                            d.write("e.ini", "seed = 5\n[model]\nkind = gbm\n[efficiency]\na = Y^2\ncomponents = Y, P2\n"
                                             "variants = b_star, fixed_at_start\npartition = regular(50)\nn_paths = 4000\n"),
                            "--out", d.path.string()});
    CHECK(r.code == kSuccess);
    CHECK(d.read("efficiency.csv").find("Var[b_star] - Var[fixed_at_start] regular(50)") != std::string::npos);

    const auto bad = run_cli({"efficiency",
                              d.write("x.ini", "[efficiency]\na = Y^2\ncomponents = P2\n"), "--out", d.path.string()});
    CHECK(bad.code == kValidationFailure);
}
