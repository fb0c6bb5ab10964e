#include "beamctl/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beamctl;

namespace {

const char* kSmall = R"(# four modes, zero nonlinearity
[simulation]
modes = 4
grid_points = 32
steps_per_unit = 200
history = random

[sweep]
target = random
alphas = 1e-4, 1e-2
deltas = 0.1, 0.2
seed = 99
)";

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const ExperimentSpec spec = parse_experiment(kSmall);
    CHECK(spec.sim.modes == 4);
    CHECK(spec.sim.grid_points == 32);
    CHECK(spec.sim.step == doctest::Approx(1.0 / 200.0));
    CHECK(spec.history == HistoryPreset::Random);
    CHECK(spec.target == TargetPreset::Random);
    CHECK(spec.seed == 99);
    // Lists are stored in descending order.
    CHECK(spec.alphas == std::vector<double>{1e-2, 1e-4});
    CHECK(spec.deltas == std::vector<double>{0.2, 0.1});

    const ExperimentSpec full = parse_experiment(R"(
[simulation]
beta = 2.5
tau = 1
delay = 0.3
step = 0.005
[catalog]
f = bounded_trig
a = 0.3
b = 0.1
g = rational
kernel = exponential
kappa = 0.5
gamma = 2
[impulses]
times = 0.25, 0.5
gains = 0.1, 0.2
[sweep]
deltas = 0.2
epsilon = 0.05
target = free_trajectory
)");
    CHECK(full.sim.beta == 2.5);
    CHECK(full.sim.catalog.f_kind == ForcingKind::BoundedTrig);
    CHECK(full.sim.catalog.g_kind == MemoryMapKind::Rational);
    CHECK(full.sim.catalog.gamma == 2.0);
    CHECK(full.sim.impulses.times == std::vector<double>{0.25, 0.5});
    CHECK(full.sim.impulses.gains == std::vector<double>{0.1, 0.2});
    CHECK(full.epsilon == 0.05);
    CHECK(full.target == TargetPreset::FreeTrajectory);
}

TEST_CASE("config rejection") {
    CHECK_THROWS_AS((void)parse_experiment("[simulation]\nmodse = 4\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[solver]\nmodes = 4\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[simulation]\nbeta = two\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[simulation]\nmodes = 4.5\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[simulation\nmodes = 4\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[catalog]\nf = cubic\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[sweep]\nalphas = 0.1, 2\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[sweep]\nepsilon = 0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment("[simulation]\nbeta = 1\n"), ConfigError);

    // delta must stay below the delay and below tau minus the last impulse time.
    try {
        (void)parse_experiment("[simulation]\ndelay = 0.3\n[sweep]\ndeltas = 0.3\n");
        FAIL("delta equal to the delay was accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("< r") != std::string::npos);
    }
    try {
        (void)parse_experiment("[impulses]\ntimes = 0.85\ngains = 0.1\n[sweep]\ndeltas = 0.2\n");
        FAIL("delta overlapping the last impulse was accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("t_p") != std::string::npos);
    }
    CHECK_THROWS_AS((void)load_experiment("/nonexistent/beamctl.ini"), ConfigError);
}

TEST_CASE("csv format") {
    const std::string empty = format_csv({}, 42);
    CHECK(empty == "# seed=42\nalpha,delta,error_total,error_nl,error_lin,runtime_s,steps\n");

    std::vector<ResultRow> rows;
    for (double d : {0.1, 0.2}) {
        for (double a : {1e-3, 1e-1, 1e-2}) rows.push_back({a, d, 1.0 / 3.0, 0.1, 0.2, 0.5, 600});
    }
    const auto ls = lines(format_csv(rows, 7));
    REQUIRE(ls.size() == 8);
    CHECK(ls[0] == "# seed=7");
    CHECK(ls[2] == "0.1,0.2,0.333333333333,0.1,0.2,0.5,600");
    CHECK(ls[3].rfind("0.01,0.2,", 0) == 0);
    CHECK(ls[4].rfind("0.001,0.2,", 0) == 0);
    CHECK(ls[5].rfind("0.1,0.1,", 0) == 0);
    CHECK(ls[7].rfind("0.001,0.1,", 0) == 0);

    const auto quiet = lines(format_csv(rows, 7, {.record_runtime = false}));
    CHECK(quiet[2] == "0.1,0.2,0.333333333333,0.1,0.2,0,600");

    try {
        emit_csv(rows, "/nonexistent-dir/out.csv", 1);
        FAIL("write to a missing directory succeeded");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
    }
}

TEST_CASE("zero nonlinearity pullback rows") {
    const ExperimentSpec spec = parse_experiment(kSmall);
    const auto rows = run_pullback_experiment(spec);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].delta == 0.2);
    CHECK(rows[0].alpha == 1e-2);
    CHECK(rows[1].alpha == 1e-4);
    CHECK(rows[2].delta == 0.1);
    for (const auto& r : rows) {
        CHECK(r.error_nl <= 1e-6);
        CHECK(r.error_total <= r.error_nl + r.error_lin + 1e-10);
        CHECK(r.steps == 200);
    }
    const auto a = assess_pullback(rows, spec.epsilon);
    CHECK(a.triangle_consistent);
    CHECK(a.lin_decreasing);
}

TEST_CASE("seeded reruns are byte identical") {
    const ExperimentSpec spec = parse_experiment(kSmall);
    const auto dir = std::filesystem::temp_directory_path();
    const auto p1 = dir / "beamctl_rerun_1.csv";
    const auto p2 = dir / "beamctl_rerun_2.csv";
    emit_csv(run_pullback_experiment(spec), p1, spec.seed, {.record_runtime = false});
    emit_csv(run_pullback_experiment(spec), p2, spec.seed, {.record_runtime = false});
    CHECK(slurp(p1) == slurp(p2));
    CHECK(slurp(p1).rfind("# seed=99\n", 0) == 0);

    ExperimentSpec other = spec;
    other.seed = 100;
    CHECK(format_csv(run_pullback_experiment(other), 100, {.record_runtime = false}) != slurp(p1));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("pullback assessment") {
    std::vector<ResultRow> rows{
        {1e-1, 0.2, 0.5, 0.04, 0.48, 0, 1}, {1e-2, 0.2, 0.05, 0.04, 0.02, 0, 1},
        {1e-1, 0.1, 0.5, 0.02, 0.49, 0, 1}, {1e-2, 0.1, 0.008, 0.002, 0.007, 0, 1},
    };
    auto a = assess_pullback(rows, 1e-2);
    CHECK(a.reached_epsilon);
    CHECK(a.best_alpha == 1e-2);
    CHECK(a.best_delta == 0.1);
    CHECK(a.min_nl_ratio == doctest::Approx(2.0));
    CHECK(a.nl_decreasing);
    CHECK(a.lin_decreasing);
    CHECK(a.triangle_consistent);
    CHECK(a.fitted_c == doctest::Approx(0.2));

    rows[1].error_total = 1.0;
    rows[3].error_nl = 0.03;
    a = assess_pullback(rows, 1e-3);
    CHECK_FALSE(a.reached_epsilon);
    CHECK_FALSE(a.triangle_consistent);
    CHECK_FALSE(a.nl_decreasing);
}

TEST_CASE("linear suite on the default experiment") {
    const auto checks = run_linear_suite(default_pullback_spec());
    bool probe_seen = false;
    for (const auto& c : checks) {
        INFO(c.name);
        CHECK(c.passed);
        probe_seen = probe_seen || c.expected_failure;
    }
    CHECK(probe_seen);

    for (const auto& c : run_gramian_check(default_pullback_spec())) {
        INFO(c.name);
        CHECK(c.passed);
    }
}

TEST_CASE("presets") {
    ExperimentSpec spec = default_pullback_spec();
    const ModeSet modes = spec.sim.mode_set();
    const StateZ1 target = make_target(spec, StateZ1::zero(8));
    CHECK(z1_norm(target, modes) == doctest::Approx(1.0));
    CHECK(target.w[0] != 0.0);

    spec.target = TargetPreset::FreeTrajectory;
    StateZ1 marker = StateZ1::zero(8);
    marker.v[3] = 2.0;
    CHECK(make_target(spec, marker) == marker);

    spec.history = HistoryPreset::Zero;
    CHECK(make_history(spec)(-0.1) == StateZ1::zero(8));
    spec.history = HistoryPreset::Random;
    CHECK(z1_norm(make_history(spec)(0.0), modes) == doctest::Approx(1.0));

    CHECK_FALSE(static_cast<bool>(make_base_control(spec)));
    spec.base_control = BaseControlPreset::Sine;
    spec.base_amplitude = 2.0;
    const ControlFn u = make_base_control(spec);
    REQUIRE(static_cast<bool>(u));
    CHECK(u(0.25)[0] == doctest::Approx(2.0));
}
