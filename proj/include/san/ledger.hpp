#pragma once

#include <filesystem>
#include <vector>

namespace san {

/// One request's charges: the cost of serving it on the current configuration
/// and the cost of the reconfiguration performed right after.
struct CostRecord {
  double service = 0;
  double adjust = 0;
};

/// Per-request accounting for a served sequence. Totals are running sums, so
/// average() is total / m.
class CostLedger {
 public:
  void charge(double service, double adjust);
  void append(const CostLedger& other);

  int size() const { return static_cast<int>(records_.size()); }
  const std::vector<CostRecord>& records() const { return records_; }

  double total_service() const { return service_sum_; }
  double total_adjust() const { return adjust_sum_; }
  double total() const { return service_sum_ + adjust_sum_; }
  // Throws std::logic_error when no request has been charged yet.
  double average() const;

 private:
  std::vector<CostRecord> records_;
  double service_sum_ = 0;
  double adjust_sum_ = 0;
};

/// CSV with columns request_index, service, adjust, cumulative.
void write_ledger_csv(const std::filesystem::path& path, const CostLedger& ledger,
                      const std::vector<std::pair<std::string, std::string>>& metadata);

}  // namespace san
