#include "actsearch/starsearch.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace actsearch {

namespace {

constexpr int kMaxDomain = 64;

std::uint64_t bit(int z) { return std::uint64_t{1} << z; }

// One concept viewed by the star search: support = points with positive
// value, eligible = points where the concept can play the distinguished
// role (value 1 for binary classes, value >= eta for probabilistic ones).
struct WitnessRow {
  std::uint64_t support = 0;
  std::uint64_t eligible = 0;
};

class StarSearch {
 public:
  StarSearch(std::vector<WitnessRow> rows, int domain_size, std::int64_t budget)
      : rows_(std::move(rows)), n_(domain_size), budget_(budget) {}

  int run() {
    // Points no concept can single out never join a star.
    usable_.reserve(static_cast<std::size_t>(n_));
    for (int z = 0; z < n_; ++z) {
      for (const WitnessRow& row : rows_) {
        if ((row.eligible >> z) & 1u) {
          usable_.push_back(z);
          break;
        }
      }
    }
    dfs(0, 0, 0);
    return best_;
  }

 private:
  bool has_witness(std::uint64_t chosen, int z) const {
    for (const WitnessRow& row : rows_) {
      if ((row.support & chosen) == bit(z) && ((row.eligible >> z) & 1u)) return true;
    }
    return false;
  }

  bool is_star(std::uint64_t chosen) const {
    std::uint64_t rest = chosen;
    while (rest) {
      int z = std::countr_zero(rest);
      rest &= rest - 1;
      if (!has_witness(chosen, z)) return false;
    }
    return true;
  }

  void dfs(std::uint64_t chosen, int count, std::size_t next) {
    best_ = std::max(best_, count);
    for (std::size_t i = next; i < usable_.size(); ++i) {
      if (count + static_cast<int>(usable_.size() - i) <= best_) break;
      if (++nodes_ > budget_) {
        throw SearchBudgetExceeded("star search exceeded node budget", best_);
      }
      std::uint64_t with = chosen | bit(usable_[i]);
      if (is_star(with)) dfs(with, count + 1, i + 1);
    }
  }

  std::vector<WitnessRow> rows_;
  int n_;
  std::int64_t budget_;
  std::int64_t nodes_ = 0;
  int best_ = 0;
  std::vector<int> usable_;
};

}  // namespace

FiniteConceptClass::FiniteConceptClass(int domain_size, std::vector<std::uint64_t> concept_rows)
    : domain_size_(domain_size), rows_(std::move(concept_rows)) {
  if (domain_size < 1 || domain_size > kMaxDomain) {
    throw std::invalid_argument("FiniteConceptClass: domain size must be in [1, 64]");
  }
  if (rows_.empty()) {
    throw std::invalid_argument("FiniteConceptClass: need at least one concept");
  }
  std::uint64_t domain_mask =
      domain_size == kMaxDomain ? ~std::uint64_t{0} : (bit(domain_size) - 1);
  bool has_zero = false;
  for (std::uint64_t row : rows_) {
    if (row & ~domain_mask) {
      throw std::invalid_argument("FiniteConceptClass: concept exceeds domain");
    }
    if (row == 0) has_zero = true;
  }
  if (!has_zero) {
    throw std::invalid_argument("FiniteConceptClass: the all-zero concept must be present");
  }
}

FiniteConceptClass FiniteConceptClass::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open concept class file " + path, 0);

  std::vector<std::uint64_t> rows;
  int width = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string bits;
    for (char c : line) {
      if (c == '0' || c == '1') {
        bits.push_back(c);
      } else if (c == '#') {
        break;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        throw ParseError("concept matrix rows must contain only 0/1", line_no);
      }
    }
    if (bits.empty()) continue;
    if (width < 0) {
      width = static_cast<int>(bits.size());
      if (width > kMaxDomain) throw ParseError("domain wider than 64 points", line_no);
    } else if (static_cast<int>(bits.size()) != width) {
      throw ParseError("ragged concept matrix row", line_no);
    }
    std::uint64_t row = 0;
    for (int z = 0; z < width; ++z) {
      if (bits[static_cast<std::size_t>(z)] == '1') row |= bit(z);
    }
    if (rows.empty() && row != 0) {
      throw ParseError("first concept row must be all zeros", line_no);
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ParseError("empty concept class file " + path, line_no);
  return FiniteConceptClass(width, std::move(rows));
}

FiniteConceptClass FiniteConceptClass::singletons(int m) {
  if (m < 1 || m > kMaxDomain) {
    throw std::invalid_argument("singletons: m must be in [1, 64]");
  }
  std::vector<std::uint64_t> rows;
  rows.reserve(static_cast<std::size_t>(m) + 1);
  rows.push_back(0);
  for (int i = 0; i < m; ++i) rows.push_back(bit(i));
  return FiniteConceptClass(m, std::move(rows));
}

ProbabilisticConceptClass::ProbabilisticConceptClass(int domain_size,
                                                     std::vector<std::vector<double>> concepts)
    : domain_size_(domain_size), values_(std::move(concepts)) {
  if (domain_size < 1 || domain_size > kMaxDomain) {
    throw std::invalid_argument("ProbabilisticConceptClass: domain size must be in [1, 64]");
  }
  bool has_zero = false;
  for (const auto& row : values_) {
    if (static_cast<int>(row.size()) != domain_size) {
      throw std::invalid_argument("ProbabilisticConceptClass: ragged concept row");
    }
    bool zero = true;
    for (double v : row) {
      if (v < 0.0 || v > 1.0) {
        throw std::invalid_argument("ProbabilisticConceptClass: values must lie in [0,1]");
      }
      if (v != 0.0) zero = false;
    }
    if (zero) has_zero = true;
  }
  if (values_.empty() || !has_zero) {
    throw std::invalid_argument("ProbabilisticConceptClass: the all-zero concept must be present");
  }
}

int centered_star_number(const FiniteConceptClass& concepts, std::int64_t search_budget) {
  std::vector<WitnessRow> rows;
  rows.reserve(static_cast<std::size_t>(concepts.concept_count()));
  for (std::uint64_t row : concepts.rows()) {
    rows.push_back(WitnessRow{row, row});
  }
  return StarSearch(std::move(rows), concepts.domain_size(), search_budget).run();
}

int eta_centered_star_number(const ProbabilisticConceptClass& concepts, double eta,
                             std::int64_t search_budget) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::invalid_argument("eta_centered_star_number: eta must lie in (0, 1]");
  }
  std::vector<WitnessRow> rows;
  rows.reserve(static_cast<std::size_t>(concepts.concept_count()));
  for (int c = 0; c < concepts.concept_count(); ++c) {
    WitnessRow row;
    for (int z = 0; z < concepts.domain_size(); ++z) {
      double v = concepts.value(c, z);
      if (v != 0.0) row.support |= bit(z);
      if (v >= eta) row.eligible |= bit(z);
    }
    rows.push_back(row);
  }
  return StarSearch(std::move(rows), concepts.domain_size(), search_budget).run();
}

TraceFamily build_trace_family(const FiniteConceptClass& concepts, const std::vector<int>& batch) {
  TraceFamily family;
  family.batch = batch;
  std::set<std::vector<int>> seen;
  for (int c = 0; c < concepts.concept_count(); ++c) {
    std::vector<int> trace;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (concepts.value(c, batch[i])) trace.push_back(static_cast<int>(i));
    }
    if (!trace.empty() && seen.insert(trace).second) {
      family.traces.push_back(std::move(trace));
    }
  }
  return family;
}

namespace {

std::vector<int> greedy_hitting_set(const std::vector<std::vector<int>>& traces) {
  std::vector<int> chosen;
  std::vector<char> hit(traces.size(), 0);
  std::size_t unhit = traces.size();
  while (unhit > 0) {
    std::map<int, int> gain;
    for (std::size_t t = 0; t < traces.size(); ++t) {
      if (hit[t]) continue;
      for (int e : traces[t]) ++gain[e];
    }
    int best_elem = gain.begin()->first;
    int best_gain = 0;
    for (const auto& [elem, g] : gain) {
      if (g > best_gain) {
        best_gain = g;
        best_elem = elem;
      }
    }
    chosen.push_back(best_elem);
    for (std::size_t t = 0; t < traces.size(); ++t) {
      if (!hit[t] &&
          std::binary_search(traces[t].begin(), traces[t].end(), best_elem)) {
        hit[t] = 1;
        --unhit;
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

class HittingSetSearch {
 public:
  HittingSetSearch(std::vector<std::vector<int>> traces, std::int64_t budget)
      : traces_(std::move(traces)), budget_(budget) {
    for (std::size_t t = 0; t < traces_.size(); ++t) {
      for (int e : traces_[t]) incidence_[e].push_back(t);
    }
  }

  std::vector<int> run(std::vector<int> upper_bound) {
    best_ = std::move(upper_bound);
    std::vector<char> hit(traces_.size(), 0);
    std::vector<int> chosen;
    dfs(chosen, hit, traces_.size());
    return best_;
  }

 private:
  // Disjoint unhit traces each need their own element.
  int packing_lower_bound(const std::vector<char>& hit) const {
    std::set<int> used;
    int packed = 0;
    for (std::size_t t = 0; t < traces_.size(); ++t) {
      if (hit[t]) continue;
      bool disjoint = true;
      for (int e : traces_[t]) {
        if (used.count(e)) {
          disjoint = false;
          break;
        }
      }
      if (disjoint) {
        ++packed;
        used.insert(traces_[t].begin(), traces_[t].end());
      }
    }
    return packed;
  }

  void dfs(std::vector<int>& chosen, std::vector<char>& hit, std::size_t unhit) {
    if (++nodes_ > budget_) {
      throw SearchBudgetExceeded("hitting-set search exceeded node budget",
                                 static_cast<std::int64_t>(best_.size()));
    }
    if (unhit == 0) {
      if (chosen.size() < best_.size()) {
        best_ = chosen;
        std::sort(best_.begin(), best_.end());
      }
      return;
    }
    if (chosen.size() + static_cast<std::size_t>(packing_lower_bound(hit)) >= best_.size()) {
      return;
    }
    // Branch on the smallest unhit trace.
    std::size_t pick = traces_.size();
    for (std::size_t t = 0; t < traces_.size(); ++t) {
      if (!hit[t] && (pick == traces_.size() || traces_[t].size() < traces_[pick].size())) {
        pick = t;
      }
    }
    for (int e : traces_[pick]) {
      std::vector<std::size_t> newly;
      for (std::size_t t : incidence_.at(e)) {
        if (!hit[t]) {
          hit[t] = 1;
          newly.push_back(t);
        }
      }
      chosen.push_back(e);
      dfs(chosen, hit, unhit - newly.size());
      chosen.pop_back();
      for (std::size_t t : newly) hit[t] = 0;
    }
  }

  std::vector<std::vector<int>> traces_;
  std::map<int, std::vector<std::size_t>> incidence_;
  std::int64_t budget_;
  std::int64_t nodes_ = 0;
  std::vector<int> best_;
};

}  // namespace

HittingSet min_hitting_set(const TraceFamily& family, std::int64_t search_budget) {
  HittingSet result;
  if (family.traces.empty()) return result;

  // Supersets of another trace are hit automatically.
  std::vector<std::vector<int>> traces = family.traces;
  std::sort(traces.begin(), traces.end(),
            [](const auto& x, const auto& y) { return x.size() < y.size(); });
  std::vector<std::vector<int>> minimal;
  for (const auto& t : traces) {
    bool redundant = false;
    for (const auto& kept : minimal) {
      if (std::includes(t.begin(), t.end(), kept.begin(), kept.end())) {
        redundant = true;
        break;
      }
    }
    if (!redundant) minimal.push_back(t);
  }

  std::vector<int> greedy = greedy_hitting_set(minimal);
  try {
    result.indices = HittingSetSearch(minimal, search_budget).run(greedy);
    result.minimal = true;
  } catch (const SearchBudgetExceeded&) {
    result.indices = greedy;
    result.minimal = false;
  }
  return result;
}

void AcsPolicy::run(Trial& trial) {
  const auto* point_instance = dynamic_cast<const PointInstance*>(&trial.instance());
  if (point_instance == nullptr) {
    throw std::invalid_argument("AcsPolicy: instance does not expose domain points");
  }
  if (trial.costs().c_ver() < trial.costs().c_rew()) {
    throw std::invalid_argument("AcsPolicy: requires c_ver >= c_rew");
  }
  const FiniteConceptClass& concepts = point_instance->concepts();
  const int s0 = centered_star_number(concepts);
  const double ratio = trial.costs().ratio();

  if (static_cast<double>(s0) > ratio) {
    // Verification is cheap relative to the star number: verify every draw.
    while (trial.active()) {
      auto candidate = trial.draw();
      if (!candidate) return;
      auto label = trial.verify(*candidate);
      if (!label || *label == 1) return;
    }
    return;
  }

  const auto batch_size = static_cast<std::int64_t>(std::ceil(ratio * s0));
  while (trial.active()) {
    std::vector<ScoredCandidate> batch;
    std::vector<int> points;
    for (std::int64_t i = 0; i < batch_size && trial.active(); ++i) {
      auto candidate = trial.draw();
      if (!candidate) return;
      points.push_back(point_instance->point_of(candidate->draw_index));
      batch.push_back(*candidate);
    }
    if (!trial.active()) return;

    TraceFamily family = build_trace_family(concepts, points);
    HittingSet hs = min_hitting_set(family);
    if (stats_) {
      stats_->hitting_set_sizes.push_back(static_cast<int>(hs.indices.size()));
      stats_->all_minimal = stats_->all_minimal && hs.minimal;
    }
    for (int idx : hs.indices) {
      if (!trial.active()) return;
      auto label = trial.verify(batch[static_cast<std::size_t>(idx)]);
      if (!label) return;
      if (*label == 1) return;
    }
    // All hitting-set labels were 0: the batch holds no positive point.
  }
}

TrialRecord run_acs(const Instance& instance, const CostModel& costs, std::uint64_t seed,
                    double safety_cap, AcsStats* stats) {
  AcsPolicy policy(stats);
  return run_trial(policy, instance, costs, seed, safety_cap);
}

void RandomGuesserPolicy::run(Trial& trial) {
  const auto* point_instance = dynamic_cast<const PointInstance*>(&trial.instance());
  if (point_instance == nullptr) {
    throw std::invalid_argument("RandomGuesserPolicy: instance does not expose domain points");
  }
  const int m = point_instance->concepts().domain_size();
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  fisher_yates(order, trial.policy_rng());

  for (int guess : order) {
    if (!trial.active()) return;
    // Draw until the guessed point shows up, then spend one verifier call.
    while (trial.active()) {
      auto candidate = trial.draw();
      if (!candidate) return;
      if (point_instance->point_of(candidate->draw_index) == guess) {
        auto label = trial.verify(*candidate);
        if (!label || *label == 1) return;
        break;
      }
    }
  }
}

}  // namespace actsearch
