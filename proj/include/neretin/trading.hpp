#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "neretin/error.hpp"
#include "neretin/group_json.hpp"

namespace neretin {

/// Equivariant cell counts keyed by (dimension, isotropy label).
class CellInventory {
public:
  using Key = std::pair<int, std::string>;

  void add(int d, const std::string& label, std::uint64_t count = 1) {
    if (d < 0) throw InvalidArgument("cell dimension must be >= 0");
    if (count) counts_[{d, label}] += count;
  }
  std::uint64_t count(int d, const std::string& label) const {
    auto it = counts_.find({d, label});
    return it == counts_.end() ? 0 : it->second;
  }
  std::uint64_t count(int d) const {
    std::uint64_t s = 0;
    for (const auto& [k, v] : counts_)
      if (k.first == d) s += v;
    return s;
  }
  void remove(int d, const std::string& label, std::uint64_t count = 1) {
    auto it = counts_.find({d, label});
    if (it == counts_.end() || it->second < count)
      throw InvalidArgument("no equivariant " + std::to_string(d) + "-cell with isotropy " + label);
    if ((it->second -= count) == 0) counts_.erase(it);
  }

  const std::map<Key, std::uint64_t>& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }
  int max_dimension() const { return counts_.empty() ? -1 : std::prev(counts_.end())->first.first; }
  std::set<std::string> labels() const {
    std::set<std::string> out;
    for (const auto& [k, v] : counts_) out.insert(k.second);
    return out;
  }

  CellInventory& operator+=(const CellInventory& o) {
    for (const auto& [k, v] : o.counts_) counts_[k] += v;
    return *this;
  }
  friend bool operator==(const CellInventory&, const CellInventory&) = default;

private:
  std::map<Key, std::uint64_t> counts_;
};

/// Replace one d-cell by a (d+2)-cell of the same isotropy.
inline CellInventory trade_cell(CellInventory inv, int d, const std::string& label) {
  inv.remove(d, label);
  inv.add(d + 2, label);
  return inv;
}

struct EulerCharacteristic {
  std::map<std::string, long long> per_label;
  long long total = 0;
  friend bool operator==(const EulerCharacteristic&, const EulerCharacteristic&) = default;
};

inline EulerCharacteristic euler_characteristic(const CellInventory& inv) {
  EulerCharacteristic e;
  for (const auto& [k, v] : inv.counts()) {
    long long s = (k.first % 2 == 0 ? 1 : -1) * static_cast<long long>(v);
    e.per_label[k.second] += s;
    e.total += s;
  }
  return e;
}

/// Stage 0 holds X_0; stage i > 0 holds the cells of X_i not in X_{i-1}
/// and the declared connectivity of the pair (X_i, X_{i-1}).
struct FiltrationSchedule {
  std::vector<std::string> labels;
  std::vector<CellInventory> stages;
  std::vector<int> connectivity;  // entry 0 is unused

  std::size_t size() const { return stages.size(); }

  CellInventory total(std::size_t upto) const {
    CellInventory out;
    for (std::size_t i = 0; i < upto && i < stages.size(); ++i) out += stages[i];
    return out;
  }
  CellInventory total() const { return total(stages.size()); }

  void validate() const {
    if (stages.empty()) throw InvalidArgument("schedule has no stages");
    if (connectivity.size() != stages.size()) throw InvalidArgument("schedule needs one connectivity per stage");
    std::set<std::string> declared(labels.begin(), labels.end());
    for (const auto& s : stages)
      for (const auto& l : s.labels())
        if (!declared.count(l)) throw InvalidArgument("undeclared isotropy label '" + l + "'");
  }
  /// Stage k > 0 is (k-1)-connected over its predecessor.
  bool sparsified() const {
    for (std::size_t k = 1; k < stages.size(); ++k)
      if (connectivity[k] < static_cast<int>(k) - 1) return false;
    return true;
  }
};

struct SparsifyResult {
  FiltrationSchedule schedule;
  std::vector<std::size_t> indices;  // n_0 < n_1 < ... into the input
};

/// Passes to X_{n_0} c X_{n_1} c ... with n_k the first index after which
/// every pair is k-connected, so that new stage k+1 is k-connected.
inline SparsifyResult sparsify(const FiltrationSchedule& s) {
  s.validate();
  const std::size_t last = s.size() - 1;
  int top = -1;
  for (std::size_t i = 1; i <= last; ++i) top = std::max(top, s.connectivity[i]);
  const int reach = last == 0 ? top : s.connectivity[last];
  if (last > 0 && reach < top) throw ScheduleError("k=" + std::to_string(reach + 1) + " unreachable");

  auto first_achiever = [&](int k) {
    std::size_t m = last;
    while (m > 0 && s.connectivity[m] >= k) --m;
    return m;
  };
  SparsifyResult r;
  for (int k = 0; k <= reach; ++k) {
    std::size_t n = first_achiever(k);
    if (!r.indices.empty()) n = std::max(n, r.indices.back() + 1);
    if (n > last) break;
    r.indices.push_back(n);
  }
  if (r.indices.empty() || r.indices.back() != last) r.indices.push_back(last);

  r.schedule.labels = s.labels;
  std::size_t from = 0;
  for (auto n : r.indices) {
    CellInventory merged;
    int conn = std::numeric_limits<int>::max();
    for (std::size_t i = from; i <= n; ++i) {
      merged += s.stages[i];
      if (i > 0) conn = std::min(conn, s.connectivity[i]);
    }
    r.schedule.stages.push_back(std::move(merged));
    r.schedule.connectivity.push_back(from == 0 ? -1 : conn);
    from = n + 1;
  }
  if (!r.schedule.sparsified()) throw CheckFailed("sparsify produced a schedule that is not sparse");
  return r;
}

struct TradeEvent {
  std::size_t stage = 0;
  int dim = 0;
  std::string label;
  friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

using TradeLog = std::vector<TradeEvent>;

struct StaircaseResult {
  CellInventory final;
  TradeLog log;
  std::vector<CellInventory> stages;     // per-stage inventories after the last row
  std::vector<CellInventory> diagonal;   // diagonal[l] = X_{l-1} after row l, l >= 1
};

/// Simulates the staircase over the first prefix_len stages: row l trades
/// every (l-1)-cell added at a stage i >= l for an (l+1)-cell.
inline StaircaseResult run_staircase(const FiltrationSchedule& s, std::size_t prefix_len) {
  s.validate();
  if (!s.sparsified()) throw InvalidArgument("run_staircase: schedule is not sparsified");
  if (prefix_len == 0 || prefix_len > s.size()) throw InvalidArgument("run_staircase: bad prefix length");
  const std::size_t L = prefix_len;
  StaircaseResult r;
  r.stages.assign(s.stages.begin(), s.stages.begin() + static_cast<std::ptrdiff_t>(L));
  r.diagonal.resize(L + 1);
  for (std::size_t l = 1; l <= L; ++l) {
    const int d = static_cast<int>(l) - 1;
    for (std::size_t i = l; i < L; ++i) {
      auto cells = r.stages[i].counts();  // copy: trading mutates
      for (const auto& [key, n] : cells) {
        if (key.first != d) continue;
        for (std::uint64_t c = 0; c < n; ++c) {
          r.stages[i] = trade_cell(std::move(r.stages[i]), d, key.second);
          r.log.push_back({i, d, key.second});
        }
      }
    }
    CellInventory diag;
    for (std::size_t i = 0; i < l; ++i) diag += r.stages[i];
    r.diagonal[l] = std::move(diag);
  }
  for (const auto& st : r.stages) r.final += st;

  // skeleta stabilize: the d-cells are those present at row d+1
  for (std::size_t d = 0; d < L; ++d)
    if (r.final.count(static_cast<int>(d)) != r.diagonal[d + 1].count(static_cast<int>(d)))
      throw CheckFailed("run_staircase: dimension " + std::to_string(d) + " count did not stabilize");
  if (!(euler_characteristic(r.final) == euler_characteristic(s.total(L))))
    throw CheckFailed("run_staircase: Euler characteristic changed");
  return r;
}

/// Applies the log to the per-stage input inventories.
inline CellInventory replay(const FiltrationSchedule& s, std::size_t prefix_len, const TradeLog& log) {
  std::vector<CellInventory> stages(s.stages.begin(), s.stages.begin() + static_cast<std::ptrdiff_t>(prefix_len));
  for (const auto& e : log) {
    if (e.stage >= stages.size()) throw InvalidArgument("trade event refers to a stage outside the prefix");
    stages[e.stage] = trade_cell(std::move(stages[e.stage]), e.dim, e.label);
  }
  CellInventory out;
  for (const auto& st : stages) out += st;
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const CellInventory& inv) {
  Json cells = Json::array();
  for (const auto& [k, v] : inv.counts()) cells.push_back({k.first, k.second, v});
  return cells;
}

inline CellInventory inventory_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("cells must be an array of [d, label, count]");
  CellInventory inv;
  for (const auto& c : j) {
    if (!c.is_array() || c.size() != 3 || !c[0].is_number_integer() || !c[1].is_string() || !c[2].is_number_integer())
      throw InvalidArgument("cell entry must be [d, label, count]");
    if (c[2].get<long long>() < 0) throw InvalidArgument("cell count must be >= 0");
    inv.add(c[0].get<int>(), c[1].get<std::string>(), c[2].get<std::uint64_t>());
  }
  return inv;
}

inline Json to_json(const FiltrationSchedule& s) {
  Json j;
  j["labels"] = s.labels;
  Json stages = Json::array();
  for (std::size_t i = 0; i < s.size(); ++i) stages.push_back({{"cells", to_json(s.stages[i])}, {"connectivity", s.connectivity[i]}});
  j["stages"] = stages;
  return j;
}

inline FiltrationSchedule schedule_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("labels") || !j.contains("stages") || !j["stages"].is_array())
    throw InvalidArgument("schedule JSON needs 'labels' and 'stages'");
  FiltrationSchedule s;
  try {
    s.labels = j["labels"].get<std::vector<std::string>>();
    for (const auto& st : j["stages"]) {
      if (!st.is_object() || !st.contains("cells")) throw InvalidArgument("stage needs 'cells'");
      s.stages.push_back(inventory_from_json(st["cells"]));
      s.connectivity.push_back(st.value("connectivity", -1));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("schedule JSON: ") + e.what());
  }
  s.validate();
  return s;
}

inline Json to_json(const TradeLog& log) {
  Json j = Json::array();
  for (const auto& e : log) j.push_back({{"stage", e.stage}, {"dim", e.dim}, {"label", e.label}});
  return j;
}

inline TradeLog trade_log_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("trade log must be an array");
  TradeLog log;
  try {
    for (const auto& e : j) log.push_back({e.at("stage").get<std::size_t>(), e.at("dim").get<int>(), e.at("label").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("trade log JSON: ") + e.what());
  }
  return log;
}

}  // namespace neretin
