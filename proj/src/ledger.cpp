#include "san/ledger.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace san {

void CostLedger::charge(double service, double adjust) {
  if (service < 0 || adjust < 0) throw std::invalid_argument("negative charge");
  records_.push_back({service, adjust});
  service_sum_ += service;
  adjust_sum_ += adjust;
}

void CostLedger::append(const CostLedger& other) {
  records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  service_sum_ += other.service_sum_;
  adjust_sum_ += other.adjust_sum_;
}

double CostLedger::average() const {
  if (records_.empty()) throw std::logic_error("ledger is empty");
  return total() / static_cast<double>(records_.size());
}

void write_ledger_csv(const std::filesystem::path& path, const CostLedger& ledger,
                      const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const auto& [key, value] : metadata) out << "# " << key << "=" << value << "\n";
  out << "request_index,service,adjust,cumulative\n";
  char buf[96];
  double cumulative = 0;
  const auto& recs = ledger.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    cumulative += recs[i].service + recs[i].adjust;
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g", i, recs[i].service,
                  recs[i].adjust, cumulative);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace san
