#include "tempofair/history_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tempofair/errors.hpp"

namespace tempofair {

namespace {

constexpr const char* kHeader = R"({"format":"tempofair-log","version":1})";

std::string real17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  return nlohmann::json(s).dump();
}

} // namespace

bool operator==(const RunRecord& a, const RunRecord& b) {
  return a.timestep == b.timestep && a.domain == b.domain &&
         a.formulation.kind == b.formulation.kind &&
         a.formulation.beta == b.formulation.beta &&
         a.formulation.disc.gamma == b.formulation.disc.gamma &&
         a.formulation.disc.tau == b.formulation.disc.tau &&
         a.formulation.horizon == b.formulation.horizon &&
         a.formulation.metric == b.formulation.metric &&
         a.utilities.entities == b.utilities.entities &&
         a.utilities.values == b.utilities.values && a.quality == b.quality &&
         a.fairness == b.fairness && a.total == b.total &&
         a.node_count == b.node_count && a.lp_count == b.lp_count &&
         a.wall_seconds == b.wall_seconds;
}

std::string serialize_record(const RunRecord& r) {
  std::ostringstream out;
  out << "{\"t\":" << r.timestep << ",\"domain\":" << quoted(r.domain)
      << ",\"formulation\":{\"kind\":\"" << formulation_name(r.formulation.kind)
      << "\",\"beta\":" << real17(r.formulation.beta)
      << ",\"gamma\":" << real17(r.formulation.disc.gamma)
      << ",\"tau\":" << real17(r.formulation.disc.tau)
      << ",\"horizon\":" << r.formulation.horizon << ",\"metric\":\""
      << metric_name(r.formulation.metric) << "\"},\"entities\":[";
  for (std::size_t e = 0; e < r.utilities.entities.size(); ++e) {
    out << (e ? "," : "") << quoted(r.utilities.entities[e]);
  }
  out << "],\"utilities\":[";
  for (std::size_t e = 0; e < r.utilities.values.size(); ++e) {
    out << (e ? "," : "") << real17(r.utilities.values[e]);
  }
  out << "],\"quality\":" << real17(r.quality)
      << ",\"fairness\":" << real17(r.fairness) << ",\"total\":" << real17(r.total)
      << ",\"nodes\":" << r.node_count << ",\"lps\":" << r.lp_count
      << ",\"wall_s\":" << real17(r.wall_seconds) << "}";
  return out.str();
}

RunRecord parse_record(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("history log: bad record: ") + e.what());
  }
  try {
    RunRecord r;
    r.timestep = j.at("t").get<long>();
    r.domain = j.at("domain").get<std::string>();
    const auto& f = j.at("formulation");
    r.formulation = FormulationSpec(
        formulation_from_name(f.at("kind").get<std::string>()),
        metric_from_name(f.at("metric").get<std::string>()), f.at("beta").get<double>(),
        f.at("gamma").get<double>(), f.at("tau").get<double>(),
        f.at("horizon").get<int>());
    r.utilities = UtilityVector(j.at("entities").get<std::vector<std::string>>(),
                                j.at("utilities").get<std::vector<double>>());
    r.quality = j.at("quality").get<double>();
    r.fairness = j.at("fairness").get<double>();
    r.total = j.at("total").get<double>();
    r.node_count = j.at("nodes").get<long>();
    r.lp_count = j.at("lps").get<long>();
    r.wall_seconds = j.at("wall_s").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("history log: missing field: ") + e.what());
  }
}

HistoryLog::HistoryLog(std::string path) : path_(std::move(path)) {}

std::vector<RunRecord> HistoryLog::read_all() const {
  std::ifstream in(path_);
  if (!in) return {};
  std::string line;
  if (!std::getline(in, line)) return {};
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw StructuralError("history log: missing header line: " + path_);
  }
  if (header.value("format", "") != "tempofair-log") {
    throw StructuralError("history log: unrecognized format: " + path_);
  }
  if (header.value("version", 0) != 1) {
    throw StructuralError("history log: unsupported version: " + path_);
  }
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_record(line));
  }
  return out;
}

void HistoryLog::append(const RunRecord& record) {
  const std::vector<RunRecord> existing = read_all();
  const long expected =
      existing.empty() ? 0 : existing.back().timestep + 1;
  if (record.timestep != expected) {
    throw StructuralError("history log: timestep " + std::to_string(record.timestep) +
                          " rejected; expected " + std::to_string(expected));
  }
  if (!existing.empty() &&
      existing.back().utilities.entities != record.utilities.entities) {
    throw StructuralError("history log: entity list changed; append rejected");
  }

  const bool fresh = existing.empty() && !std::ifstream(path_).good();
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) {
    throw IoError("history log: cannot open for append: " + path_ + ": " +
                  std::strerror(errno));
  }
  if (::flock(fd, LOCK_EX) != 0) {
    ::close(fd);
    throw IoError("history log: cannot lock: " + path_);
  }
  std::string payload;
  if (fresh) payload = std::string(kHeader) + "\n";
  payload += serialize_record(record) + "\n";
  const ssize_t written = ::write(fd, payload.data(), payload.size());
  const bool ok = written == static_cast<ssize_t>(payload.size()) && ::fsync(fd) == 0;
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (!ok) throw IoError("history log: short write on " + path_);
}

History HistoryLog::load_history(std::optional<long> window) const {
  const std::vector<RunRecord> records = read_all();
  std::size_t from = 0;
  if (window.has_value()) {
    if (*window < 0) throw ArgumentError("history log: window must be >= 0");
    const std::size_t w = static_cast<std::size_t>(*window);
    from = records.size() > w ? records.size() - w : 0;
  }
  std::vector<UtilityVector> steps;
  for (std::size_t i = from; i < records.size(); ++i) {
    steps.push_back(records[i].utilities);
  }
  return History(std::move(steps));
}

std::vector<UtilityVector> HistoryLog::cumulative() const {
  const std::vector<RunRecord> records = read_all();
  std::vector<UtilityVector> out;
  std::vector<double> sums;
  for (const RunRecord& r : records) {
    if (sums.empty()) sums.assign(r.utilities.values.size(), 0.0);
    for (std::size_t e = 0; e < sums.size(); ++e) sums[e] += r.utilities.values[e];
    out.push_back(UtilityVector(r.utilities.entities, sums));
  }
  return out;
}

} // namespace tempofair
