#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "r3val/backend.hpp"
#include "r3val/corpus.hpp"
#include "r3val/error.hpp"
#include "r3val/persistence.hpp"
#include "r3val/runner.hpp"
#include "r3val/schedule.hpp"

namespace fs = std::filesystem;

namespace r3v {
namespace {

Campaign r3_example() {
  std::vector<VariantId> v{VariantId("A"), VariantId("B"), VariantId("C"), VariantId("D")};
  auto p = DeviceParams::defaults();
  p.variants.clear();
  for (const auto& x : v) p.variants.push_back({x, 50.0, 17.0});
  SimulatorBackend backend(p, 1);
  return execute_campaign(generate_schedule({v, 8, 2}, Approach::kR3), backend, 20.0, 1).campaign;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("r3val-test-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

using CampaignFiles = TempDir;

TEST_F(CampaignFiles, R3ExampleRoundTrips) {
  const auto c = r3_example();
  save_campaign(dir_.string(), c);
  EXPECT_EQ(load_campaign(dir_.string()), c);
}

TEST_F(CampaignFiles, EmptyCampaignRoundTrips) {
  auto c = r3_example();
  c.samples.clear();
  c.seed.reset();
  save_campaign(dir_.string(), c);
  EXPECT_EQ(load_campaign(dir_.string()), c);
}

TEST(SamplesCsv, HeaderIsFixed) {
  std::ostringstream out;
  write_samples_csv(out, {});
  EXPECT_EQ(out.str(),
            "variant,reboot_index,round_index,slot_index,energy_j,runtime_s,battery_pct,voltage_mv,active_processes,"
            "memory_pct,cpu_pct,timestamp_s\n");
}

TEST(SamplesCsv, MissingMetadataIsEmptyField) {
  MeasurementSample s{VariantId("A"), 0.1, {}, 0, 0, 0, {}, {}, {}, {}, {}, 0.0};
  std::ostringstream out;
  write_samples_csv(out, {s});
  EXPECT_NE(out.str().find("A,0,0,0,0.1,,,,,,,0\n"), std::string::npos);
  std::istringstream in(out.str());
  EXPECT_EQ(read_samples_csv(in), std::vector<MeasurementSample>{s});
}

TEST(SamplesCsv, MissingColumnIsNamed) {
  std::istringstream in("variant,reboot_index,round_index,slot_index,runtime_s,battery_pct,voltage_mv,"
                        "active_processes,memory_pct,cpu_pct,timestamp_s\n");
  try {
    read_samples_csv(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("energy_j"), std::string::npos);
  }
}

TEST(SamplesCsv, MalformedRowCarriesLineNumber) {
  std::ostringstream out;
  write_samples_csv(out, r3_example().samples);
  std::string text = out.str();
  // corrupt the energy of the third data row (line 4)
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) pos = text.find('\n', pos) + 1;
  const auto comma = text.find(',', text.find(',', text.find(',', text.find(',', pos) + 1) + 1) + 1);
  text.insert(comma + 1, "x");
  std::istringstream in(text);
  try {
    read_samples_csv(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  std::istringstream short_row(out.str().substr(0, out.str().find('\n') + 1) + "A,0,0\n");
  EXPECT_THROW(read_samples_csv(short_row), ParseError);
}

TEST(Manifest, MalformedJsonCarriesLineNumber) {
  std::istringstream in("{\n  \"approach\": \"R3\",\n  \"samples\": ,\n}");
  try {
    read_manifest(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream missing("{\"approach\": \"R3\"}");
  EXPECT_THROW(read_manifest(missing), ParseError);
}

TEST_F(CampaignFiles, SamplesInconsistentWithScheduleAreRejected) {
  auto c = r3_example();
  std::swap(c.samples[0].variant, c.samples[1].variant);
  save_campaign(dir_.string(), c);
  EXPECT_THROW(load_campaign(dir_.string()), StructureMismatch);
}

TEST(CorpusCsv, MultiplePlatformsRoundTrip) {
  const std::vector<Corpus> corpora{{"Nexus6-A7", {{1.5, 2.25}, {3.0}}}, {"Moto-GA7", {{0.1 + 0.2}}}};
  std::stringstream io;
  write_corpora(io, corpora);
  EXPECT_EQ(read_corpora(io), corpora);
}

TEST(CorpusCsv, Errors) {
  std::istringstream gap("platform,reboot_index,position,energy_j\np,0,0,1\np,0,2,1\n");
  try {
    read_corpora(gap);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream no_col("platform,reboot_index,energy_j\n");
  try {
    read_corpora(no_col);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("position"), std::string::npos);
  }
  std::istringstream negative("platform,reboot_index,position,energy_j\np,0,0,-1\n");
  EXPECT_THROW(read_corpora(negative), ParseError);
  std::istringstream empty("platform,reboot_index,position,energy_j\n");
  EXPECT_THROW(read_corpora(empty), ParseError);
}

}  // namespace
}  // namespace r3v
