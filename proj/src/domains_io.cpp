#include "tempofair/domains/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tempofair/errors.hpp"

namespace tempofair {

// --- DomainInstance base defaults -------------------------------------------

void DomainInstance::enumerate(int, const CandidateFn&) const {
  throw ArgumentError("backend mismatch: domain '" + domain_name() +
                      "' has no enumeration backend");
}

MilpPlan DomainInstance::build_milp(const MilpBuildSpec&) const {
  throw ArgumentError("backend mismatch: domain '" + domain_name() +
                      "' has no MILP backend");
}

std::string DomainInstance::describe(const StepSolution& sol) const {
  std::ostringstream out;
  const auto& names = entities();
  for (std::size_t e = 0; e < names.size(); ++e) {
    if (e) out << ", ";
    out << names[e] << "=" << sol.utilities[e];
  }
  return out.str();
}

Backend backend_from_name(const std::string& name) {
  if (name == "auto") return Backend::Auto;
  if (name == "enumeration") return Backend::Enumeration;
  if (name == "milp") return Backend::Milp;
  throw ArgumentError("unknown backend: " + name);
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Enumeration: return "enumeration";
    case Backend::Milp: return "milp";
  }
  return "unknown";
}

// --- Parsing helpers ---------------------------------------------------------

namespace {

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) {
    throw StructuralError(std::string("instance file: expected ") + what);
  }
  return tok;
}

void expect_keyword(std::istream& in, const std::string& kw) {
  const std::string tok = next_token(in, kw.c_str());
  if (tok != kw) {
    throw StructuralError("instance file: expected '" + kw + "', found '" + tok + "'");
  }
}

long read_int(std::istream& in, const char* what) {
  const std::string tok = next_token(in, what);
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw StructuralError(std::string("instance file: bad integer for ") + what +
                          ": '" + tok + "'");
  }
}

double read_real(std::istream& in, const char* what) {
  const std::string tok = next_token(in, what);
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw StructuralError(std::string("instance file: bad number for ") + what +
                          ": '" + tok + "'");
  }
}

} // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    // Prefer the shortest representation that still round-trips.
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[64];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      std::sscanf(shorter, "%lf", &back);
      if (back == v) return shorter;
    }
  }
  return buf;
}

// --- CAP ---------------------------------------------------------------------

CapInstance parse_cap(std::istream& in) {
  expect_keyword(in, "cap");
  expect_keyword(in, "lecturers");
  const long nl = read_int(in, "lecturer count");
  std::vector<std::string> lecturers;
  for (long i = 0; i < nl; ++i) lecturers.push_back(next_token(in, "lecturer name"));
  expect_keyword(in, "courses");
  const long nc = read_int(in, "course count");
  std::vector<std::string> courses;
  for (long i = 0; i < nc; ++i) courses.push_back(next_token(in, "course name"));
  expect_keyword(in, "qmax");
  const double qmax = read_real(in, "qmax");
  expect_keyword(in, "skill");
  std::vector<std::vector<double>> skill(static_cast<std::size_t>(nl));
  for (auto& row : skill) {
    for (long c = 0; c < nc; ++c) row.push_back(read_real(in, "skill"));
  }
  std::vector<std::vector<int>> unavailable;
  std::string tok;
  if (in >> tok) {
    if (tok != "steps") {
      throw StructuralError("cap file: unexpected trailing token '" + tok + "'");
    }
    const long steps = read_int(in, "step count");
    for (long s = 0; s < steps; ++s) {
      expect_keyword(in, "unavailable");
      const long k = read_int(in, "unavailable count");
      std::vector<int> out;
      for (long i = 0; i < k; ++i) {
        const std::string name = next_token(in, "lecturer name");
        const auto it = std::find(lecturers.begin(), lecturers.end(), name);
        if (it == lecturers.end()) {
          throw StructuralError("cap file: unknown lecturer '" + name + "'");
        }
        out.push_back(static_cast<int>(it - lecturers.begin()));
      }
      unavailable.push_back(std::move(out));
    }
  }
  return CapInstance(std::move(lecturers), std::move(courses), std::move(skill), qmax,
                     std::move(unavailable));
}

void write_cap(const CapInstance& instance, std::ostream& out) {
  out << "cap\nlecturers " << instance.entities().size();
  for (const auto& l : instance.entities()) out << " " << l;
  out << "\ncourses " << instance.courses().size();
  for (const auto& c : instance.courses()) out << " " << c;
  out << "\nqmax " << format_real(instance.q_max()) << "\nskill\n";
  for (const auto& row : instance.skill()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? " " : "") << format_real(row[c]);
    }
    out << "\n";
  }
  if (!instance.unavailable().empty()) {
    out << "steps " << instance.unavailable().size() << "\n";
    for (const auto& step : instance.unavailable()) {
      out << "unavailable " << step.size();
      for (int l : step) out << " " << instance.entities()[static_cast<std::size_t>(l)];
      out << "\n";
    }
  }
}

// --- VRP ---------------------------------------------------------------------

VrpInstance parse_vrp(std::istream& in, int n_vehicles_default) {
  expect_keyword(in, "vrp");
  expect_keyword(in, "grid");
  const long grid = read_int(in, "grid size");
  expect_keyword(in, "vehicles");
  const long vehicles = read_int(in, "vehicle count");
  expect_keyword(in, "depot");
  const long dx = read_int(in, "depot x");
  const long dy = read_int(in, "depot y");
  expect_keyword(in, "points");
  const long n = read_int(in, "point count");
  std::vector<std::pair<int, int>> pts;
  for (long i = 0; i < n; ++i) {
    const long x = read_int(in, "point x");
    const long y = read_int(in, "point y");
    pts.push_back({static_cast<int>(x), static_cast<int>(y)});
  }
  const int nv = vehicles > 0 ? static_cast<int>(vehicles) : n_vehicles_default;
  return VrpInstance(static_cast<int>(grid),
                     {static_cast<int>(dx), static_cast<int>(dy)}, std::move(pts), nv);
}

void write_vrp(const VrpInstance& instance, std::ostream& out) {
  out << "vrp\ngrid " << instance.grid_size() << "\nvehicles "
      << instance.n_vehicles() << "\ndepot " << instance.points()[0].first << " "
      << instance.points()[0].second << "\npoints " << (instance.n_points() - 1)
      << "\n";
  for (std::size_t p = 1; p < instance.n_points(); ++p) {
    out << instance.points()[p].first << " " << instance.points()[p].second << "\n";
  }
}

// --- TAP ---------------------------------------------------------------------

TapInstance parse_tap(std::istream& in) {
  expect_keyword(in, "tap");
  expect_keyword(in, "agents");
  const long na = read_int(in, "agent count");
  expect_keyword(in, "tasks");
  const long nt = read_int(in, "task count");
  expect_keyword(in, "costs");
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(na));
  for (auto& row : cost) {
    for (long t = 0; t < nt; ++t) row.push_back(read_real(in, "cost"));
  }
  std::vector<std::string> agents, tasks;
  for (long a = 0; a < na; ++a) agents.push_back("a" + std::to_string(a + 1));
  for (long t = 0; t < nt; ++t) tasks.push_back("t" + std::to_string(t + 1));
  return TapInstance(std::move(agents), std::move(tasks), std::move(cost));
}

void write_tap(const TapInstance& instance, std::ostream& out) {
  out << "tap\nagents " << instance.agents.size() << "\ntasks "
      << instance.tasks.size() << "\ncosts\n";
  for (const auto& row : instance.cost) {
    for (std::size_t t = 0; t < row.size(); ++t) {
      out << (t ? " " : "") << format_real(row[t]);
    }
    out << "\n";
  }
}

// --- NSP ---------------------------------------------------------------------

NspInstance parse_nsp(std::istream& in) {
  expect_keyword(in, "nsp");
  expect_keyword(in, "nurses");
  const long n = read_int(in, "nurse count");
  std::vector<std::string> nurses;
  for (long i = 0; i < n; ++i) nurses.push_back(next_token(in, "nurse name"));
  expect_keyword(in, "days");
  const long days = read_int(in, "day count");
  expect_keyword(in, "qmax");
  const double qmax = read_real(in, "qmax");
  expect_keyword(in, "seniority");
  std::vector<double> seniority;
  for (long i = 0; i < n; ++i) seniority.push_back(read_real(in, "seniority"));
  expect_keyword(in, "preferences");
  std::vector<std::vector<int>> pref(static_cast<std::size_t>(n));
  for (auto& row : pref) {
    for (long s = 0; s < days * 2; ++s) {
      row.push_back(static_cast<int>(read_int(in, "preference")));
    }
  }
  return NspInstance(std::move(nurses), static_cast<int>(days), std::move(seniority),
                     std::move(pref), qmax);
}

void write_nsp(const NspInstance& instance, std::ostream& out) {
  out << "nsp\nnurses " << instance.entities().size();
  for (const auto& nm : instance.entities()) out << " " << nm;
  out << "\ndays " << instance.days() << "\nqmax " << format_real(instance.q_max())
      << "\nseniority";
  for (double s : instance.seniority()) out << " " << format_real(s);
  out << "\npreferences\n";
  for (const auto& row : instance.preference()) {
    for (std::size_t s = 0; s < row.size(); ++s) out << (s ? " " : "") << row[s];
    out << "\n";
  }
}

// --- Generic loader ----------------------------------------------------------

std::unique_ptr<DomainInstance> load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file: " + path);
  std::string kw;
  if (!(in >> kw)) throw StructuralError("empty instance file: " + path);
  in.seekg(0);
  if (kw == "cap") return std::make_unique<CapInstance>(parse_cap(in));
  if (kw == "vrp") return std::make_unique<VrpInstance>(parse_vrp(in));
  if (kw == "tap") {
    return std::make_unique<TapSequenceInstance>(
        std::vector<TapInstance>{parse_tap(in)});
  }
  if (kw == "nsp") return std::make_unique<NspInstance>(parse_nsp(in));
  throw StructuralError("unknown instance keyword '" + kw + "' in " + path);
}

} // namespace tempofair
