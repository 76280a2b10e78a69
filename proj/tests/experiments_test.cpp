#include "switchsync/experiments.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "switchsync/errors.hpp"

namespace switchsync {
namespace {

const GainCertificate& certificate() {
    static const GainCertificate c = solve_feasibility(LmiProblem::for_alpha_range(0.0, 1.0));
    return c;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

TEST(PresetTest, KnownNamesAndErrors) {
    for (const auto& name : preset_names()) EXPECT_NO_THROW(scenario_preset(name, 1).validate()) << name;
    EXPECT_THROW(scenario_preset("lorenz"), UsageError);
}

TEST(PresetTest, Shapes) {
    const Scenario step = scenario_preset("step");
    EXPECT_EQ(step.alpha(5.0), 0.0);
    EXPECT_EQ(step.alpha(10.0), 0.8);
    EXPECT_EQ(step.alpha(20.0), 1.0);
    EXPECT_EQ(step.master_ic, kDefaultMasterIc);
    EXPECT_EQ(step.slave_ic, kDefaultSlaveIc);

    const Scenario sine = scenario_preset("sine");
    EXPECT_EQ(sine.alpha(0.2), 0.5);
    EXPECT_NEAR(sine.alpha(0.3), 0.6237019796272615, 1e-15);

    const Scenario onoff = scenario_preset("onoff");
    EXPECT_EQ(onoff.gate(0.0), 0.0);
    EXPECT_EQ(onoff.alpha(0.0), 0.0);
    EXPECT_EQ(onoff.alpha.change_instants(30.0), (std::vector<double>{5.0, 15.0, 25.0}));
    EXPECT_EQ(onoff.gate.change_instants(30.0), (std::vector<double>{5.0, 10.0, 15.0, 20.0, 25.0, 30.0}));

    const Scenario rnd = scenario_preset("random", 3, 0.5);
    EXPECT_EQ(rnd.alpha(0.1), rnd.alpha(0.49));
}

TEST(PresetTest, RandomInitialConditions) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Scenario s = scenario_preset("random-ic", seed);
        for (double v : {s.master_ic.x, s.master_ic.y, s.master_ic.z, s.slave_ic.x, s.slave_ic.y, s.slave_ic.z}) {
            EXPECT_GE(v, -30.0);
            EXPECT_LT(v, 30.0);
        }
        EXPECT_FALSE(s.master_ic == kDefaultMasterIc);
    }
    EXPECT_FALSE(scenario_preset("random-ic", 1).master_ic == scenario_preset("random-ic", 2).master_ic);
    EXPECT_EQ(scenario_preset("random-ic", 2).slave_ic, scenario_preset("random-ic", 2).slave_ic);
}

TEST(ScenarioTest, Validation) {
    Scenario s;
    s.dt = 0.0;
    EXPECT_THROW(s.validate(), InvalidInput);
    s = Scenario{};
    s.gate = SwitchingSignal::constant(0.5);
    EXPECT_THROW(s.validate(), InvalidInput);
    s = Scenario{};
    s.alpha = SwitchingSignal::constant(2.0);
    EXPECT_THROW(s.validate(), InvalidInput);
    RunOptions o;
    o.stride = 0;
    EXPECT_THROW(run_scenario(Scenario{}, certificate(), o), InvalidInput);
}

TEST(RunTest, IdenticalStartIsSynchronizedAtOnce) {
    Scenario s = scenario_preset("none");
    s.slave_ic = s.master_ic;
    s.t_end = 5.0;
    const RunResult r = run_scenario(s, certificate());
    ASSERT_TRUE(r.metrics.time_to_sync.has_value());
    EXPECT_EQ(*r.metrics.time_to_sync, 0.0);
    EXPECT_EQ(r.metrics.final_error, 0.0);
    EXPECT_EQ(r.metrics.lyapunov_violations, 0);
}

TEST(RunTest, StepScenarioSynchronizes) {
    const RunResult r = run_scenario(scenario_preset("step"), certificate());
    EXPECT_FALSE(r.metrics.diverged);
    ASSERT_TRUE(r.metrics.time_to_sync.has_value());
    EXPECT_LE(*r.metrics.time_to_sync, 3.0);
    EXPECT_LT(*r.metrics.max_error_after_sync, 1e-2);
    EXPECT_EQ(r.metrics.lyapunov_violations, 0);
    ASSERT_EQ(r.records.size(), 3001u);
    EXPECT_EQ(r.records.front().t, 0.0);
    EXPECT_EQ(r.records.back().t, 30.0);
    for (const auto& rec : r.records)
        if (rec.t > 3.0) EXPECT_LT(rec.e_norm, 1e-2) << rec.t;
}

TEST(RunTest, GateOffNeverSynchronizes) {
    Scenario s = scenario_preset("step");
    s.gate = SwitchingSignal::constant(0.0);
    const RunResult r = run_scenario(s, certificate());
    EXPECT_FALSE(r.metrics.time_to_sync.has_value());
    for (const auto& rec : r.records) {
        EXPECT_FALSE(rec.gate);
        EXPECT_GE(rec.e_norm, 1e-2);
    }
}

TEST(RunTest, RecordsCarryLatchedSignals) {
    const RunResult r = run_scenario(scenario_preset("onoff"), certificate());
    for (const auto& rec : r.records) {
        const Scenario s = scenario_preset("onoff");
        EXPECT_EQ(rec.alpha, s.alpha(rec.t));
        EXPECT_EQ(rec.gate, s.gate(rec.t) > 0.5);
        EXPECT_EQ(rec.e, sync_error(rec.master, rec.slave));
    }
}

TEST(RunTest, RandomSweepSynchronizesQuickly) {
    std::vector<Scenario> batch;
    for (std::uint64_t seed = 0; seed < 10; ++seed) batch.push_back(scenario_preset("random", seed));
    for (const auto& r : run_batch(batch, certificate())) {
        ASSERT_TRUE(r.metrics.time_to_sync.has_value());
        EXPECT_LE(*r.metrics.time_to_sync, 5.0);
        EXPECT_EQ(r.metrics.lyapunov_violations, 0);
    }
}

TEST(RunTest, DivergenceIsReported) {
    // A destabilizing gain drives the error past the divergence bound.
    GainCertificate bad = certificate();
    bad.k = Matrix{{1000.0, 1000.0, 1000.0}};
    Scenario s = scenario_preset("none");
    s.t_end = 5.0;
    const RunResult r = run_scenario(s, bad);
    EXPECT_TRUE(r.metrics.diverged);
    ASSERT_TRUE(r.metrics.divergence_time.has_value());
    EXPECT_LT(*r.metrics.divergence_time, 5.0);
    EXPECT_FALSE(r.metrics.time_to_sync.has_value());
}

TEST(BatchTest, ParallelMatchesSerial) {
    std::vector<Scenario> batch;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Scenario s = scenario_preset(seed % 2 ? "random" : "random-ic", seed);
        s.t_end = 5.0;
        batch.push_back(std::move(s));
    }
    const auto par = run_batch(batch, certificate());
    const auto ser = run_batch_serial(batch, certificate());
    ASSERT_EQ(par.size(), ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        std::ostringstream a, b;
        write_trajectory_csv(a, par[i].records);
        write_trajectory_csv(b, ser[i].records);
        EXPECT_EQ(a.str(), b.str());
        EXPECT_EQ(metrics_to_json(par[i].metrics), metrics_to_json(ser[i].metrics));
    }
}

TEST(BatchTest, ErrorsPropagate) {
    std::vector<Scenario> batch(2);
    batch[1].dt = -1.0;
    EXPECT_THROW(run_batch(batch, certificate()), InvalidInput);
}

TEST(CsvTest, HeaderRowsAndDeterminism) {
    Scenario s = scenario_preset("random", 7);
    s.t_end = 2.0;
    RunOptions o;
    o.stride = 100;
    const RunResult a = run_scenario(s, certificate(), o);
    const RunResult b = run_scenario(s, certificate(), o);
    std::ostringstream sa, sb;
    write_trajectory_csv(sa, a.records);
    write_trajectory_csv(sb, b.records);
    EXPECT_EQ(sa.str(), sb.str());
    const std::string text = sa.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
    EXPECT_EQ(count_lines(text), 1u + 21u);
    const std::string first = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1);
    EXPECT_EQ(first.substr(0, 10), "0,15,20,10");
    EXPECT_EQ(first.back(), '1');
    std::size_t commas = 0;
    for (char ch : first) commas += ch == ',';
    EXPECT_EQ(commas, 12u);
}

TEST(MetricsTest, JsonFields) {
    RunMetrics m;
    m.final_error = 0.5;
    const nlohmann::json j = metrics_to_json(m);
    EXPECT_TRUE(j.at("time_to_sync").is_null());
    EXPECT_EQ(j.at("final_error").get<double>(), 0.5);
    EXPECT_EQ(j.at("diverged").get<bool>(), false);
    m.time_to_sync = 1.25;
    EXPECT_EQ(metrics_to_json(m).at("time_to_sync").get<double>(), 1.25);
}

TEST(LyapunovIncreaseTest, RelativeAndFloor) {
    EXPECT_FALSE(lyapunov_increase(1.0, 1.0, 1e-6, 1000.0));
    EXPECT_FALSE(lyapunov_increase(1.0, 1.0 + 5e-7, 1e-6, 1000.0));
    EXPECT_TRUE(lyapunov_increase(1.0, 1.0 + 2e-6, 1e-6, 1000.0));
    // Rounding-level values near zero are not counted.
    EXPECT_FALSE(lyapunov_increase(0.0, 1e-22, 1e-6, 1000.0));
    EXPECT_TRUE(lyapunov_increase(0.0, 1e-18, 1e-6, 1000.0));
}

}  // namespace
}  // namespace switchsync
