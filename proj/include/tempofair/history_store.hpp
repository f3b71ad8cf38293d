/**
 * @file history_store.hpp
 * @brief Append-only log of per-period solutions and their utilities.
 *
 * One self-describing JSON object per line, preceded by a format-version
 * header line. Reals are written with 17 significant digits so parsing reads
 * back the exact double. Writers take an advisory exclusive lock; readers
 * see a consistent prefix.
 */

#ifndef TEMPOFAIR_HISTORY_STORE_HPP
#define TEMPOFAIR_HISTORY_STORE_HPP

#include <optional>
#include <string>
#include <vector>

#include "tempofair/fairness.hpp"
#include "tempofair/objective.hpp"

namespace tempofair {

/// One committed period: what was decided, under which formulation, with
/// which realized utilities, plus solver diagnostics.
struct RunRecord {
  long timestep = 0;
  std::string domain;
  FormulationSpec formulation;
  UtilityVector utilities;
  double quality = 0.0;
  double fairness = 0.0;
  double total = 0.0;
  long node_count = 0;
  long lp_count = 0;
  double wall_seconds = 0.0;
};

bool operator==(const RunRecord& a, const RunRecord& b);

std::string serialize_record(const RunRecord& record);
RunRecord parse_record(const std::string& line);

class HistoryLog {
public:
  explicit HistoryLog(std::string path);

  /// Appends one record durably. Rejects (without writing) records whose
  /// timestep is not exactly last + 1 (0 for an empty log) or whose entity
  /// list differs from the log's.
  void append(const RunRecord& record);

  std::vector<RunRecord> read_all() const;

  /// The last `window` records' utilities, oldest first; the whole log when
  /// window is absent.
  History load_history(std::optional<long> window = std::nullopt) const;

  /// Running per-entity sums, one entry per record.
  std::vector<UtilityVector> cumulative() const;

  const std::string& path() const { return path_; }

private:
  std::string path_;
};

} // namespace tempofair

#endif // TEMPOFAIR_HISTORY_STORE_HPP
