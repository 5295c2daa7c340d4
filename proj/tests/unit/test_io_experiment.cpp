#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gibbstf/experiment.hpp"
#include "gibbstf/parallel.hpp"
#include "helpers.hpp"

using namespace gibbstf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gibbstf_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json small_config() {
    return Json::parse(R"({
        "model": {"type": "strauss", "R": 0.05},
        "beta": 100, "gamma": 0.5,
        "carrier": {"lower": [-0.05, -0.05], "upper": [1.05, 1.05]},
        "taus": [0.5, 1.0],
        "erosion": 0.05,
        "replicates": 4,
        "seed": 17,
        "sampler": {"burn_in": 2000, "steps_per_point": 50},
        "methods": ["explicit", "mple",
                    {"name": "tf", "h": [{"type": "strauss_indicator", "k": 1},
                                          {"type": "strauss_indicator", "k": 2}]}],
        "threads": 1
    })");
}

}  // namespace

TEST_CASE("pattern csv round trip") {
    const auto dir = scratch("csv");
    std::vector<MarkedPoint> pts{{{0.1, 0.2, 0}, 1.5}, {{1.0 / 3.0, 0.7, 0}, std::nullopt}, {{0.9, 1e-9, 0}, 2.0}};
    const Configuration cfg(Window::rect(0, 0, 1, 2), pts);
    const auto path = (dir / "p.csv").string();
    write_pattern(cfg, path);
    CHECK(fs::exists(dir / "p.window.json"));
    CHECK(sidecar_path(path) == (dir / "p.window.json").string());
    const auto back = read_pattern(path);
    CHECK(back.carrier() == cfg.carrier());
    CHECK(back.points() == cfg.points());

    const auto plain = testing::uniform_pattern(Window::square(-1, 1), 200, 3);
    write_pattern(plain, path);
    CHECK(read_pattern(path).points() == plain.points());
    CHECK(slurp(path).substr(0, 4) == "x,y\n");
}

TEST_CASE("pattern reading errors") {
    const auto dir = scratch("csv_err");
    CHECK_THROWS_AS(read_pattern((dir / "missing.csv").string()), ConfigError);
    {
        std::ofstream(dir / "bad.csv") << "x,y\n0.1,abc\n";
        std::ofstream(dir / "bad.window.json") << R"({"lower":[0,0],"upper":[1,1]})";
    }
    CHECK_THROWS_AS(read_pattern((dir / "bad.csv").string()), ConfigError);
    {
        std::ofstream(dir / "w.csv") << "x,y\n0.1,0.2\n";
        std::ofstream(dir / "w.window.json") << R"({"lower":[0,0]})";
    }
    CHECK_THROWS_AS(read_pattern((dir / "w.csv").string()), ConfigError);
    {
        std::ofstream(dir / "nohead.csv") << "a,b\n0.1,0.2\n";
        std::ofstream(dir / "nohead.window.json") << R"({"lower":[0,0],"upper":[1,1]})";
    }
    CHECK_THROWS_AS(read_pattern((dir / "nohead.csv").string()), ConfigError);
    {
        std::ofstream(dir / "ok.csv") << "x,y\r\n0.1,0.2\r\n\r\n0.3,0.4\r\n";
        std::ofstream(dir / "other.json") << R"({"lower":[0,0],"upper":[1,1]})";
    }
    CHECK(read_pattern((dir / "ok.csv").string(), (dir / "other.json").string()).size() == 2);
    CHECK_THROWS_AS(window_from_json(Json::parse(R"({"lower":[0],"upper":[1,1]})")), ConfigError);
}

TEST_CASE("json reports") {
    Vector v(2);
    v << 1.5, -2;
    CHECK(to_json(v) == Json::parse("[1.5,-2.0]"));
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    CHECK(to_json(m) == Json::parse("[[1.0,2.0],[3.0,4.0]]"));
    ContrastReport r;
    r.method = "explicit";
    r.theta_hat = v;
    r.residuals = v;
    const Json j = to_json(r);
    for (const char* key : {"theta_hat", "residuals", "U_value", "converged", "quadrature", "window"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["beta_hat"].get<double>() == doctest::Approx(std::exp(-1.5)));
}

TEST_CASE("config parsing") {
    const auto c = parse_experiment(small_config());
    CHECK(c.replicates == 4);
    CHECK(c.methods.size() == 3);
    CHECK(c.theta_star[0] == doctest::Approx(-std::log(100.0)));
    CHECK(c.estimation_window(0.5) == Window::square(0, 0.5));
    CHECK(c.quadrature.spacing == doctest::Approx(0.0125));
    CHECK(c.sampler.seed == 17);
}

TEST_CASE("config errors") {
    auto bad = [](auto edit) {
        Json j = small_config();
        edit(j);
        CHECK_THROWS_AS(parse_experiment(j), ConfigError);
    };
    bad([](Json& j) { j["unknown_key"] = 1; });
    bad([](Json& j) { j.erase("model"); });
    bad([](Json& j) { j["model"] = {{"type", "hardcore"}}; });
    bad([](Json& j) { j["model"] = {{"type", "strauss"}}; });
    bad([](Json& j) { j["replicates"] = 0; });
    bad([](Json& j) { j["replicates"] = "many"; });
    bad([](Json& j) { j["taus"] = Json::array({2.0}); });
    bad([](Json& j) { j["gamma"] = -1; });
    bad([](Json& j) { j["beta"] = 1e9; });
    bad([](Json& j) { j["methods"] = Json::array(); });
    bad([](Json& j) { j["methods"] = Json::array({"mle"}); });
    bad([](Json& j) { j["methods"] = Json::parse(R"([{"name":"tf","h":[{"type":"count","r":0.05}]}])"); });
    bad([](Json& j) { j["methods"] = Json::parse(R"([{"name":"tf","h":[{"type":"per"},{"type":"iso"}]}])"); });
    bad([](Json& j) { j["sampler"] = {{"steps_per_point", 0.1}}; });
    bad([](Json& j) { j["sampler"] = {{"sweeps", 10}}; });
    bad([](Json& j) { j["report"] = "odds"; });
    bad([](Json& j) { j["vk_resolution"] = 10; });
    bad([](Json& j) {
        j["model"] = {{"type", "area"}, {"R", 0.05}};
        j["methods"] = Json::array({"explicit"});
    });
}

TEST_CASE("thread count from the environment") {
    ::setenv("GIBBSTF_THREADS", "3", 1);
    CHECK(default_thread_count() == 3);
    CHECK(parse_experiment(small_config()).threads == 3);
    ::unsetenv("GIBBSTF_THREADS");
    CHECK(parse_experiment(small_config()).threads == 1);
    CHECK(default_thread_count() >= 1);
}

TEST_CASE("replication is deterministic and writes stable csv") {
    auto c = parse_experiment(small_config());
    const auto a = run_replication(c);
    c.threads = 2;
    const auto b = run_replication(c);
    REQUIRE(a.rows.size() == 4 * 2 * 3);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].ok == b.rows[i].ok);
        if (a.rows[i].ok) CHECK(a.rows[i].theta_hat == b.rows[i].theta_hat);
    }
    const auto d1 = scratch("rep1"), d2 = scratch("rep2");
    write_replication_csv(c, a, d1.string());
    write_replication_csv(c, b, d2.string());
    CHECK(slurp(d1 / "replicates.csv") == slurp(d2 / "replicates.csv"));
    CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
    CHECK(slurp(d1 / "summary.csv").find("mean_beta,sd_beta,mean_gamma,sd_gamma") != std::string::npos);
    CHECK(a.summary.size() == 2 * 3);
}

TEST_CASE("replicate independence") {
    const auto c = parse_experiment(small_config());
    const auto pats = simulate_experiment_patterns(c);
    const auto full = run_replication(c, pats);
    std::vector<Configuration> first(pats.begin(), pats.begin() + 3);
    auto c3 = c;
    c3.replicates = 3;
    const auto part = run_replication(c3, first);
    for (std::size_t i = 0; i < part.rows.size(); ++i) {
        CHECK(part.rows[i].replicate == full.rows[i].replicate);
        if (part.rows[i].ok) CHECK(part.rows[i].theta_hat == full.rows[i].theta_hat);
    }
}

TEST_CASE("a single replicate gives the estimate and no sd") {
    Json j = small_config();
    j["replicates"] = 1;
    j["taus"] = Json::array({1.0});
    j["methods"] = Json::array({"explicit"});
    const auto c = parse_experiment(j);
    const auto r = run_replication(c);
    REQUIRE(r.rows.size() == 1);
    REQUIRE(r.rows[0].ok);
    REQUIRE(r.summary.size() == 1);
    CHECK(r.summary[0].mean[0] == doctest::Approx(std::exp(-r.rows[0].theta_hat[0])).epsilon(1e-15));
    CHECK(std::isnan(r.summary[0].sd[0]));
    const auto d = scratch("single");
    write_replication_csv(c, r, d.string());
    const auto text = slurp(d / "summary.csv");
    CHECK(text.find(",,") != std::string::npos);
}

TEST_CASE("failures are counted, not fatal") {
    Json j = small_config();
    j["beta"] = 2;  // a handful of isolated points: N1 = 0
    j["methods"] = Json::array({"explicit"});
    const auto c = parse_experiment(j);
    const auto r = run_replication(c);
    CHECK(r.all_failed());
    for (const auto& row : r.rows) CHECK(!row.error.empty());
    CHECK(r.summary[0].failed == 4);
    CHECK(r.summary[0].ok == 0);
}

TEST_CASE("histogram") {
    const auto h = make_histogram({0.0, 0.1, 0.2, 0.9, 1.0}, 5);
    CHECK(h.edges.size() == 6);
    std::size_t total = 0;
    for (auto n : h.counts) total += n;
    CHECK(total == 5);
    CHECK(h.counts.front() == 2);
    CHECK(h.counts.back() == 2);
    CHECK(h.mean == doctest::Approx(0.44));
    CHECK(make_histogram({}, 5).counts.empty());
}

TEST_CASE("covariance study") {
    Json j = small_config();
    j["replicates"] = 6;
    j["taus"] = Json::array({1.0});
    j["methods"] = Json::array({"explicit"});
    j["covariance"] = {{"asymptotic_patterns", 3}, {"D_block", 0.1}, {"histogram_bins", 4}};
    const auto c = parse_experiment(j);
    const auto s = run_covariance_study(c);
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].empirical.rows() == 2);
    CHECK(s.entries[0].histograms.size() == 2);
    CHECK(s.asymptotic.rows() == 2);
    CHECK(s.asymptotic(0, 1) == doctest::Approx(s.asymptotic(1, 0)));
    CHECK(s.asymptotic(0, 0) > 0);
    CHECK(s.asymptotic_patterns == 3);
    const Json out = to_json(s);
    CHECK(out.contains("entries"));
}
