#include <gtest/gtest.h>

#include "r3val/backend.hpp"
#include "r3val/error.hpp"
#include "r3val/runner.hpp"
#include "r3val/schedule.hpp"

namespace r3v {
namespace {

std::vector<VariantId> letters(std::size_t n) {
  std::vector<VariantId> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(std::string(1, static_cast<char>('A' + i)));
  return out;
}

DeviceParams params_for(const std::vector<VariantId>& variants) {
  auto p = DeviceParams::defaults();
  p.variants.clear();
  for (const auto& v : variants) p.variants.push_back({v, 50.0, 17.0});
  return p;
}

Corpus grid_corpus(std::size_t blocks, std::size_t readings) {
  Corpus c{"grid", {}};
  for (std::size_t b = 0; b < blocks; ++b) {
    c.reboots.emplace_back();
    for (std::size_t p = 0; p < readings; ++p) c.reboots.back().push_back(100.0 * b + p);
  }
  return c;
}

class FailingBackend : public MeasurementBackend {
 public:
  void setup() override {}
  Reading run(const VariantId&) override { throw BackendError(BackendFailure::kExitStatus, "meter broke"); }
  std::string descriptor() const override { return "failing"; }
};

TEST(ExecuteCampaign, A3OnZeroNoiseSimulator) {
  const auto v = letters(4);
  SimulatorBackend backend(params_for(v).without_noise(), 1);
  const auto result = execute_campaign(generate_schedule({v, 4, 1}, Approach::kA3), backend);
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result.campaign.samples.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(result.campaign.samples[i].reboot_index, i / 4);
    EXPECT_EQ(result.campaign.samples[i].slot_index, i);
    EXPECT_EQ(result.campaign.samples[i].energy_j, 50.0);
    EXPECT_DOUBLE_EQ(result.campaign.samples[i].timestamp_s, 17.0 * static_cast<double>(i));
  }
  EXPECT_NO_THROW(check_campaign(result.campaign));
}

TEST(ExecuteCampaign, R3ExampleWithDefaults) {
  const auto v = letters(4);
  SimulatorBackend backend(params_for(v), 1);
  const auto result = execute_campaign(generate_schedule({v, 8, 2}, Approach::kR3), backend, 20.0, 1);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.campaign.samples.size(), 32u);
  for (const auto& x : v) EXPECT_EQ(samples_of(result.campaign, x).size(), 8u);
  EXPECT_EQ(result.campaign.seed, 1u);
  EXPECT_EQ(result.campaign.backend_descriptor, "simulator seed=1");
}

TEST(ExecuteCampaign, FailingBackendAbortsWithoutSamples) {
  FailingBackend backend;
  const auto result = execute_campaign(generate_schedule({letters(2), 2, 1}, Approach::kA1), backend);
  ASSERT_FALSE(result.ok());
  EXPECT_TRUE(result.campaign.samples.empty());
  EXPECT_EQ(result.failure->kind, FailureKind::kBackend);
  EXPECT_EQ(result.failure->backend_failure, BackendFailure::kExitStatus);
  EXPECT_EQ(result.failure->slot_index, 0u);
}

TEST(ExecuteCampaign, BatteryFloorBreachNamesSlot) {
  const auto v = letters(2);
  auto p = params_for(v).without_noise();
  p.battery_capacity_j = 1000;  // each run drains 5 %
  SimulatorBackend backend(p, 1);
  const auto result = execute_campaign(generate_schedule({v, 20, 1}, Approach::kA4), backend, 20.0);
  ASSERT_FALSE(result.ok());
  EXPECT_EQ(result.failure->kind, FailureKind::kBatteryFloor);
  EXPECT_EQ(result.failure->slot_index, 17u);
  EXPECT_EQ(result.campaign.samples.size(), 17u);
  EXPECT_NE(result.failure->message.find("slot 17"), std::string::npos);
}

TEST(ExecuteCampaign, PartialSamplesKeptOnReplayExhaustion) {
  ReplayBackend backend(grid_corpus(2, 3));
  const auto result = execute_campaign(generate_schedule({letters(2), 2, 1}, Approach::kA1), backend);
  ASSERT_FALSE(result.ok());
  EXPECT_EQ(result.failure->backend_failure, BackendFailure::kExhausted);
  EXPECT_EQ(result.campaign.samples.size(), 3u);
}

TEST(ReplayBackend, A3ConsumesWholeCorpus) {
  const auto corpus = grid_corpus(7, 7);
  ReplayBackend backend(corpus);
  const auto schedule = generate_schedule({letters(7), 7, 1}, Approach::kA3);
  EXPECT_NO_THROW(check_replay_compatible(corpus, schedule));
  const auto result = execute_campaign(schedule, backend);
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result.campaign.samples.size(), 49u);
  for (std::size_t i = 0; i < 49; ++i) EXPECT_EQ(result.campaign.samples[i].energy_j, 100.0 * (i / 7) + i % 7);
  EXPECT_THROW(backend.setup(), BackendError);
}

TEST(ReplayBackend, A2MapsOneBlockPerVariant) {
  ReplayBackend backend(grid_corpus(7, 7));
  const auto result = execute_campaign(generate_schedule({letters(7), 7, 1}, Approach::kA2), backend);
  ASSERT_TRUE(result.ok());
  for (std::size_t i = 0; i < 7; ++i) {
    for (const auto& s : samples_of(result.campaign, letters(7)[i])) EXPECT_EQ(std::floor(s.energy_j / 100), i);
  }
}

TEST(ReplayBackend, RunBeforeSetupAndMismatch) {
  ReplayBackend backend(grid_corpus(1, 1));
  try {
    backend.run(VariantId("A"));
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendFailure::kNotSetUp);
  }
  EXPECT_THROW(check_replay_compatible(grid_corpus(3, 7), generate_schedule({letters(4), 4, 1}, Approach::kA3)),
               StructureMismatch);
  EXPECT_THROW(check_replay_compatible(grid_corpus(7, 3), generate_schedule({letters(4), 4, 1}, Approach::kA3)),
               StructureMismatch);
  EXPECT_THROW(ReplayBackend(Corpus{"empty", {}}), ConfigError);
}

TEST(ReplayBackend, ReplayIsDeterministic) {
  const auto schedule = generate_schedule({letters(7), 7, 1}, Approach::kR3);
  ReplayBackend a(grid_corpus(7, 7));
  ReplayBackend b(grid_corpus(7, 7));
  auto ca = execute_campaign(schedule, a).campaign;
  auto cb = execute_campaign(schedule, b).campaign;
  cb.created_at = ca.created_at;
  EXPECT_EQ(ca, cb);
}

ExternalCommandConfig exec_config(std::string run) {
  ExternalCommandConfig c;
  c.setup_command = "true";
  c.run_command = std::move(run);
  c.timeout = std::chrono::milliseconds(2000);
  return c;
}

TEST(ExternalCommandBackend, ParsesEnergyAndSubstitutesVariant) {
  ExternalCommandBackend backend(exec_config("echo variant={variant} energy_j=42.5"));
  backend.setup();
  EXPECT_EQ(backend.run(VariantId("raw1")).energy_j, 42.5);

  auto config = exec_config("echo '{variant}: 1.5e1 J'");
  config.parse_pattern = "raw7: (float) J";
  ExternalCommandBackend custom(config);
  custom.setup();
  EXPECT_EQ(custom.run(VariantId("raw7")).energy_j, 15.0);
}

TEST(ExternalCommandBackend, DistinctFailures) {
  auto expect_kind = [](const std::string& run, BackendFailure kind, const std::string& fragment,
                        int timeout_ms = 2000) {
    auto config = exec_config(run);
    config.timeout = std::chrono::milliseconds(timeout_ms);
    ExternalCommandBackend backend(config);
    backend.setup();
    try {
      backend.run(VariantId("A"));
      ADD_FAILURE() << "expected failure for " << run;
    } catch (const BackendError& e) {
      EXPECT_EQ(e.kind(), kind) << run;
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_kind("echo boom; exit 4", BackendFailure::kExitStatus, "boom");
  expect_kind("echo no number here", BackendFailure::kParse, "energy_j=(float)");
  expect_kind("sleep 5", BackendFailure::kTimeout, "timed out", 100);
  expect_kind("/definitely/not/a/command", BackendFailure::kSpawn, "could not be started");
}

TEST(ExternalCommandBackend, RejectsBadConfig) {
  EXPECT_THROW(ExternalCommandBackend(exec_config("")), ConfigError);
  auto c = exec_config("echo 1");
  c.parse_pattern = "no group";
  EXPECT_THROW(ExternalCommandBackend{c}, ConfigError);
  c.parse_pattern = "([";
  EXPECT_THROW(ExternalCommandBackend{c}, ConfigError);
  ExternalCommandBackend backend(exec_config("echo energy_j=1"));
  EXPECT_THROW(backend.run(VariantId("A")), BackendError);
}

}  // namespace
}  // namespace r3v
