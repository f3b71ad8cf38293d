#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tempofair/errors.hpp"
#include "tempofair/history_store.hpp"

using namespace tempofair;

namespace {

struct TempFile {
  std::string path;
  TempFile() {
    path = (std::filesystem::temp_directory_path() /
            ("tempofair_log_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++) + ".jsonl"))
               .string();
  }
  ~TempFile() { std::remove(path.c_str()); }
  static int counter;
};
int TempFile::counter = 0;

RunRecord make_record(long t, std::vector<double> utilities) {
  RunRecord r;
  r.timestep = t;
  r.domain = "cap";
  r.formulation = FormulationSpec(FormulationKind::HFOP, Metric::RelativeMaxMin, 2.0);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    names.push_back("l" + std::to_string(i + 1));
  }
  r.utilities = UtilityVector(std::move(names), std::move(utilities));
  r.quality = 0.875;
  r.fairness = 1.0 / 3.0;
  r.total = r.quality + 2.0 * r.fairness;
  r.node_count = 3;
  r.lp_count = 7;
  r.wall_seconds = 0.0125;
  return r;
}

} // namespace

TEST_CASE("record serialization round-trips exactly") {
  RunRecord r = make_record(0, {2.0, 1.0 / 3.0});
  r.wall_seconds = 0.1 + 0.2; // a value without a short decimal form
  const RunRecord back = parse_record(serialize_record(r));
  CHECK(back == r);
  CHECK_THROWS_AS(parse_record("{not json"), StructuralError);
  CHECK_THROWS_AS(parse_record("{\"t\":0}"), StructuralError);
}

TEST_CASE("append and load") {
  TempFile tmp;
  HistoryLog log(tmp.path);
  CHECK(log.read_all().empty());
  CHECK(log.load_history().empty());

  log.append(make_record(0, {2.0, 1.0}));
  log.append(make_record(1, {1.5, 1.5}));
  log.append(make_record(2, {3.0, 0.0}));

  const auto records = log.read_all();
  REQUIRE(records.size() == 3);
  CHECK(records[0] == make_record(0, {2.0, 1.0}));
  CHECK(records[2].utilities.values == std::vector<double>{3.0, 0.0});

  const History full = log.load_history();
  REQUIRE(full.size() == 3);
  CHECK(full.steps[0].values == std::vector<double>{2.0, 1.0});

  CHECK(log.load_history(0L).empty());
  CHECK(log.load_history(2L).size() == 2);
  CHECK(log.load_history(2L).steps[0].values == std::vector<double>{1.5, 1.5});
  CHECK(log.load_history(99L).size() == 3);

  // The header line is present and versioned.
  std::ifstream in(tmp.path);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("tempofair-log") != std::string::npos);
}

TEST_CASE("append rejections leave the log untouched") {
  TempFile tmp;
  HistoryLog log(tmp.path);
  log.append(make_record(0, {1.0, 2.0}));

  CHECK_THROWS_AS(log.append(make_record(2, {1.0, 2.0})), StructuralError);
  CHECK_THROWS_AS(log.append(make_record(0, {1.0, 2.0})), StructuralError);
  CHECK_THROWS_AS(log.append(make_record(1, {1.0, 2.0, 3.0})), StructuralError);
  CHECK(log.read_all().size() == 1);

  // load_history(append(log, r)) extends load_history(log) by r.
  const History before = log.load_history();
  log.append(make_record(1, {4.0, 5.0}));
  const History after = log.load_history();
  REQUIRE(after.size() == before.size() + 1);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(after.steps[i].values == before.steps[i].values);
  }
  CHECK(after.steps.back().values == std::vector<double>{4.0, 5.0});
}

TEST_CASE("cumulative sums are prefix-monotone") {
  TempFile tmp;
  HistoryLog log(tmp.path);
  log.append(make_record(0, {2.0, 1.0}));
  log.append(make_record(1, {1.5, 1.5}));

  const auto two = log.cumulative();
  REQUIRE(two.size() == 2);
  CHECK(two[0].values == std::vector<double>{2.0, 1.0});
  CHECK(two[1].values == std::vector<double>{3.5, 2.5});

  log.append(make_record(2, {3.0, 0.0}));
  log.append(make_record(3, {2.0, 1.0}));
  const auto four = log.cumulative();
  REQUIRE(four.size() == 4);
  for (std::size_t i = 0; i < two.size(); ++i) {
    CHECK(four[i].values == two[i].values); // earlier entries unchanged
  }
  CHECK(four[3].values == std::vector<double>{8.5, 3.5});

  CHECK(HistoryLog("/nonexistent/dir/x.jsonl").cumulative().empty());
}
