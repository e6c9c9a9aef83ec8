#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "helios/core/validate.hpp"
#include "helios/io/instance_io.hpp"

using namespace helios;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("helios_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& f, std::string* what = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::not_found;
}

const fs::path kExample = fs::path(HELIOS_DATA_DIR) / "example" / "instance.json";

}  // namespace

TEST(Csv, CapacityFactorsRoundTrip) {
  io::SyntheticSpec spec;
  spec.years = 1;
  spec.days_per_month = 3;
  auto data = io::generate_synthetic(spec);
  std::stringstream ss;
  io::write_capacity_factors(ss, data.dataset);
  auto back = io::read_capacity_factors(ss, "mem");
  EXPECT_EQ(json(back), json(data.dataset));
}

TEST(Csv, HourOutOfRangeIsParseErrorWithRow) {
  std::stringstream ss("date,hour,site,value\n2025-01-01,1,A,0.1\n2025-01-01,25,A,0.2\n");
  std::string what;
  EXPECT_EQ(code_of([&] { io::read_capacity_factors(ss, "cf.csv"); }, &what), ErrorCode::parse);
  EXPECT_NE(what.find("cf.csv:3"), std::string::npos) << what;
  EXPECT_NE(what.find("hour 25"), std::string::npos) << what;
}

TEST(Csv, MalformedRowsAreParseErrors) {
  for (const char* body : {"2025-01-01,1,A\n", "2025-13-01,1,A,0.1\n", "2025-01-01,x,A,0.1\n", "2025-01-01,1,A,abc\n",
                           "2025-01-01,0,A,0.1\n", "2025-01-01,1,A,0.1,9\n"}) {
    std::stringstream ss(std::string(io::kCsvHeader) + "\n" + body);
    EXPECT_EQ(code_of([&] { io::read_capacity_factors(ss, "cf.csv"); }), ErrorCode::parse) << body;
  }
  std::stringstream bad_header("day,hour,site,value\n");
  EXPECT_EQ(code_of([&] { io::read_capacity_factors(bad_header, "cf.csv"); }), ErrorCode::parse);
}

TEST(Csv, IncompleteDayIsSchemaError) {
  std::stringstream ss;
  ss << io::kCsvHeader << "\n";
  for (int h = 1; h <= 24; ++h) ss << "2025-01-01," << h << ",A,0.5\n";
  for (int h = 1; h <= 23; ++h) ss << "2025-01-01," << h << ",B,0.5\n";
  std::string what;
  EXPECT_EQ(code_of([&] { io::read_capacity_factors(ss, "cf.csv"); }, &what), ErrorCode::schema);
  EXPECT_NE(what.find("site B"), std::string::npos) << what;
}

TEST(Csv, CapacityFactorOutsideUnitIntervalRejected) {
  std::stringstream ss(std::string(io::kCsvHeader) + "\n2025-01-01,1,A,1.5\n");
  EXPECT_EQ(code_of([&] { io::read_capacity_factors(ss, "cf.csv"); }), ErrorCode::validation);
}

TEST(Csv, DemandMissingSiteNamesTheSite) {
  auto inst = fixtures::synthetic(1, 3).instance;
  std::stringstream full;
  io::write_demand(full, inst.demand, inst.network, 2025);
  std::stringstream filtered;
  std::string line;
  while (std::getline(full, line))
    if (line.find(",Safi,") == std::string::npos) filtered << line << "\n";
  std::string what;
  EXPECT_EQ(code_of([&] { io::read_demand(filtered, "demand.csv", inst.network, 1, 2025); }, &what),
            ErrorCode::schema);
  EXPECT_NE(what.find("Safi"), std::string::npos) << what;
}

TEST(Csv, DemandRoundTrip) {
  auto inst = fixtures::synthetic(2, 3).instance;
  std::stringstream ss;
  io::write_demand(ss, inst.demand, inst.network, 2030);
  auto back = io::read_demand(ss, "demand.csv", inst.network, 2, 2030);
  EXPECT_EQ(back.values, inst.demand.values);
}

TEST(Csv, FormatDoubleIsExact) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0})
    EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(Csv, ScenarioExportShape) {
  auto inst = fixtures::synthetic(1, 4).instance;
  std::stringstream prof, wts;
  io::write_scenario_profiles(prof, *inst.scenarios);
  io::write_scenario_weights(wts, *inst.scenarios);
  int rows = -1;
  std::string line;
  while (std::getline(prof, line)) ++rows;
  EXPECT_EQ(rows, 4 * 24 * 3);
  rows = -1;
  double total = 0.0;
  while (std::getline(wts, line)) {
    if (++rows == 0) continue;
    total += std::stod(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(rows, 12 * 4);
  EXPECT_NEAR(total, 12.0, 1e-9);
}

TEST(InstanceIo, BundledExampleLoadsAndValidates) {
  ASSERT_TRUE(fs::exists(kExample)) << kExample;
  auto li = io::load_instance(kExample);
  EXPECT_TRUE(validate_instance(li.instance).ok());
  ASSERT_TRUE(li.dataset.has_value());
  EXPECT_EQ(li.dataset->site_count(), 3);
  EXPECT_GE(li.dataset->day_count(), 12 * 20);
  EXPECT_EQ(li.instance.sites(), 5);
}

TEST(InstanceIo, BundledExampleRoundTrip) {
  auto li = io::load_instance(kExample);
  auto dir = scratch_dir("rt");
  io::save_instance(dir, li.instance, &*li.dataset, li.first_year);
  auto back = io::load_instance(dir / "instance.json");
  EXPECT_EQ(json(back.instance), json(li.instance));
  EXPECT_EQ(json(*back.dataset), json(*li.dataset));
  // Byte-identical on a second pass.
  auto dir2 = scratch_dir("rt2");
  io::save_instance(dir2, back.instance, &*back.dataset, back.first_year);
  for (const char* f : {"instance.json", "demand.csv", "capacity_factors.csv"})
    EXPECT_EQ(io::read_text(dir / f), io::read_text(dir2 / f)) << f;
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST(InstanceIo, RoundTripWithScenariosAndPlan) {
  auto inst = fixtures::synthetic(2, 3).instance;
  inst.robustness = {1.0, 0.5, 0.25};
  inst.delta = 0.01;
  inst.fixed_investment = InvestmentPlan::zero(inst.sites(), inst.years());
  auto dir = scratch_dir("sc");
  io::save_instance(dir, inst, nullptr, 2025);
  auto back = io::load_instance(dir / "instance.json");
  EXPECT_EQ(json(back.instance), json(inst));
  EXPECT_FALSE(back.dataset.has_value());
  fs::remove_all(dir);
}

TEST(InstanceIo, JsonSyntaxErrorGivesLine) {
  auto dir = scratch_dir("syn");
  io::write_text(dir / "bad.json", "{\n  \"name\": \"x\",\n  \"network\": [1, 2,\n}\n");
  std::string what;
  EXPECT_EQ(code_of([&] { io::load_instance(dir / "bad.json"); }, &what), ErrorCode::parse);
  EXPECT_NE(what.find("bad.json:4"), std::string::npos) << what;
  fs::remove_all(dir);
}

TEST(InstanceIo, MissingKeyIsSchemaError) {
  auto j = json(fixtures::synthetic(1, 3).instance);
  j["costs"].erase("budget");
  std::string what;
  EXPECT_EQ(code_of([&] { io::load_instance_document(j, ".", "inline"); }, &what), ErrorCode::schema);
  EXPECT_NE(what.find("budget"), std::string::npos) << what;
}

TEST(InstanceIo, InvalidValuesAreValidationErrors) {
  auto j = json(fixtures::synthetic(1, 3).instance);
  j["network"]["arcs"][0]["efficiency"] = 1.2;
  std::string what;
  EXPECT_EQ(code_of([&] { io::load_instance_document(j, ".", "inline"); }, &what), ErrorCode::validation);
  EXPECT_NE(what.find("network.arcs[0]"), std::string::npos) << what;
}

TEST(InstanceIo, DemandFileMissingSite) {
  auto li = io::load_instance(kExample);
  auto dir = scratch_dir("dm");
  io::save_instance(dir, li.instance, nullptr, li.first_year);
  std::string text = io::read_text(dir / "demand.csv"), kept;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.find(",Jorf,") == std::string::npos) kept += line + "\n";
  io::write_text(dir / "demand.csv", kept);
  std::string what;
  EXPECT_EQ(code_of([&] { io::load_instance(dir / "instance.json"); }, &what), ErrorCode::schema);
  EXPECT_NE(what.find("Jorf"), std::string::npos) << what;
  fs::remove_all(dir);
}

TEST(Synthetic, SeedDeterminesInstance) {
  io::SyntheticSpec spec;
  spec.years = 2;
  auto a = io::generate_synthetic(spec), b = io::generate_synthetic(spec);
  EXPECT_EQ(json(a.instance), json(b.instance));
  EXPECT_EQ(json(a.dataset), json(b.dataset));
  spec.seed = 8;
  EXPECT_NE(json(io::generate_synthetic(spec).dataset), json(a.dataset));
}

TEST(Synthetic, FactorsInUnitIntervalAndDarkAtNight) {
  auto data = io::generate_synthetic({});
  for (const auto& d : data.dataset.days)
    for (int s = 0; s < data.dataset.site_count(); ++s)
      for (int h = 0; h < 24; ++h) {
        double v = d.values[static_cast<size_t>(s) * 24 + h];
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        if (h < 3 || h >= 22) {
          EXPECT_EQ(v, 0.0) << d.date << " h" << h;
        }
      }
}

TEST(Synthetic, SummerBrighterThanWinter) {
  auto data = io::generate_synthetic({});
  double sum[12] = {}, cnt[12] = {};
  for (const auto& d : data.dataset.days)
    for (double v : d.values) sum[d.month] += v, cnt[d.month] += 1;
  EXPECT_GT(sum[5] / cnt[5], sum[11] / cnt[11]);
  EXPECT_GT(sum[6] / cnt[6], sum[0] / cnt[0]);
}

// Deviations from the month's scenario centroid: hour-to-hour changes are smaller than the deviations.
TEST(Synthetic, DeviationChangesSmallerThanDeviations) {
  auto data = fixtures::synthetic(1, 5);
  const auto& sc = *data.instance.scenarios;
  const auto& ds = data.dataset;
  double du = 0.0, u = 0.0;
  long n = 0;
  for (int i = 0; i < ds.day_count(); ++i) {
    int d = sc.assignment[i];
    for (int s = 0; s < ds.site_count(); ++s)
      for (int h = 0; h < 24; ++h) {
        double dev = ds.at(i, s, h) - sc.centroid(d, s, h);
        u += std::abs(dev);
        if (h > 0) du += std::abs(dev - (ds.at(i, s, h - 1) - sc.centroid(d, s, h - 1)));
        ++n;
      }
  }
  EXPECT_LT(du / n, u / n);
}

TEST(Synthetic, AlwaysValid) {
  for (int y : {1, 3, 5}) {
    io::SyntheticSpec spec;
    spec.years = y;
    spec.seed = 100 + y;
    auto rep = validate_instance(io::generate_synthetic(spec).instance);
    EXPECT_TRUE(rep.ok()) << rep.str();
  }
}
