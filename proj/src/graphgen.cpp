#include "ldnoma/graphgen.hpp"

#include "ldnoma/rng.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace ldnoma {

std::string_view to_string(EntryMode mode) {
  return mode == EntryMode::Ones ? "ONES" : "RADEMACHER";
}

EntryMode parse_entry_mode(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "ONES") return EntryMode::Ones;
  if (upper == "RADEMACHER") return EntryMode::Rademacher;
  throw EnsembleError("unknown entry mode '" + std::string(text) + "'");
}

namespace {

void validate_common(const EnsembleSpec& s) {
  if (s.n_resources == 0 || s.n_users == 0) {
    throw EnsembleError("N and K must be positive");
  }
  if (s.n_users < s.n_resources) {
    throw EnsembleError("K must be >= N (load beta >= 1)");
  }
  if (s.col_degree < 2) {
    throw EnsembleError("column degree d must be >= 2");
  }
  if (s.n_users > UINT32_MAX || s.n_resources > UINT32_MAX) {
    throw EnsembleError("matrix dimensions exceed 32-bit indices");
  }
}

std::uint64_t pair_key(std::uint64_t row, std::uint64_t col, std::uint64_t n_cols) {
  return row * n_cols + col;
}

std::string describe(const EnsembleSpec& s) {
  std::ostringstream os;
  os << "(N=" << s.n_resources << ", K=" << s.n_users << ", d=" << s.col_degree
     << ", seed=" << s.seed << ")";
  return os.str();
}

} // namespace

void EnsembleSpec::validate_regular() const {
  validate_common(*this);
  if ((n_users * col_degree) % n_resources != 0) {
    throw EnsembleError("K*d must be divisible by N so that beta*d is an integer");
  }
  if (row_degree() < 2) {
    throw EnsembleError("row degree beta*d must be >= 2");
  }
  if (col_degree > n_resources || row_degree() > n_users) {
    throw EnsembleError("degrees exceed matrix dimensions");
  }
}

void EnsembleSpec::validate_irregular() const {
  validate_common(*this);
  if (col_degree >= n_resources) {
    throw EnsembleError("edge probability d/N must be < 1");
  }
}

SparseSignatureMatrix SparseSignatureMatrix::from_entries(const EnsembleSpec& spec,
                                                          std::vector<Entry> entries,
                                                          bool irregular) {
  for (const auto& e : entries) {
    if (e.row >= spec.n_resources || e.col >= spec.n_users) {
      throw EnsembleError("entry index out of range");
    }
    if (e.value != 1.0 && e.value != -1.0) {
      throw EnsembleError("entry values must be +1 or -1");
    }
    if (spec.entry_mode == EntryMode::Ones && e.value != 1.0) {
      throw EnsembleError("ONES mode requires all values +1");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      throw EnsembleError("duplicate (row, col) entry");
    }
  }

  SparseSignatureMatrix a;
  a.spec_ = spec;
  a.entries_ = std::move(entries);
  a.irregular_ = irregular;
  if (!irregular && !a.is_biregular()) {
    throw EnsembleError("entries violate the (d, beta*d) degree constraints");
  }
  return a;
}

std::vector<std::size_t> SparseSignatureMatrix::column_degrees() const {
  std::vector<std::size_t> deg(cols(), 0);
  for (const auto& e : entries_) ++deg[e.col];
  return deg;
}

std::vector<std::size_t> SparseSignatureMatrix::row_degrees() const {
  std::vector<std::size_t> deg(rows(), 0);
  for (const auto& e : entries_) ++deg[e.row];
  return deg;
}

bool SparseSignatureMatrix::is_biregular() const {
  if ((spec_.n_users * spec_.col_degree) % spec_.n_resources != 0) return false;
  const auto cd = column_degrees();
  const auto rd = row_degrees();
  const auto d = spec_.col_degree;
  const auto r = spec_.row_degree();
  return std::all_of(cd.begin(), cd.end(), [d](auto v) { return v == d; }) &&
         std::all_of(rd.begin(), rd.end(), [r](auto v) { return v == r; });
}

SparseSignatureMatrix generate_regular(const EnsembleSpec& spec, std::uint64_t realization) {
  spec.validate_regular();
  auto rng = Rng::for_stream(spec.seed, realization);

  const std::size_t n_cols = spec.n_users;
  const std::size_t d = spec.col_degree;
  const std::size_t r = spec.row_degree();
  const std::size_t m = n_cols * d;

  // Column stubs stay in order; row stubs are permuted.
  std::vector<std::uint32_t> col_of(m), row_of(m);
  for (std::size_t e = 0; e < m; ++e) col_of[e] = static_cast<std::uint32_t>(e / d);
  for (std::size_t e = 0; e < m; ++e) row_of[e] = static_cast<std::uint32_t>(e / r);
  shuffle(row_of.begin(), row_of.end(), rng);

  std::unordered_map<std::uint64_t, std::uint32_t> multiplicity;
  multiplicity.reserve(2 * m);
  std::vector<std::size_t> parallel;
  for (std::size_t e = 0; e < m; ++e) {
    if (++multiplicity[pair_key(row_of[e], col_of[e], n_cols)] > 1) parallel.push_back(e);
  }

  const std::uint64_t cap = 100ULL * m;
  std::uint64_t attempts = 0;
  while (!parallel.empty()) {
    const std::size_t e = parallel.back();
    const auto key_e = pair_key(row_of[e], col_of[e], n_cols);
    if (multiplicity[key_e] <= 1) {
      parallel.pop_back();
      continue;
    }
    if (attempts++ >= cap) {
      throw GenerationError("multi-edge repair did not converge for " + describe(spec) +
                            " realization " + std::to_string(realization));
    }
    const auto f = static_cast<std::size_t>(rng.below(m));
    const auto r1 = row_of[e], c1 = col_of[e];
    const auto r2 = row_of[f], c2 = col_of[f];
    if (r1 == r2 || c1 == c2) continue;
    const auto key_a = pair_key(r1, c2, n_cols);
    const auto key_b = pair_key(r2, c1, n_cols);
    auto it_a = multiplicity.find(key_a);
    auto it_b = multiplicity.find(key_b);
    if ((it_a != multiplicity.end() && it_a->second > 0) ||
        (it_b != multiplicity.end() && it_b->second > 0)) {
      continue;
    }
    --multiplicity[key_e];
    --multiplicity[pair_key(r2, c2, n_cols)];
    ++multiplicity[key_a];
    ++multiplicity[key_b];
    // Swap row endpoints: e becomes (r2, c1), f becomes (r1, c2).
    row_of[e] = r2;
    row_of[f] = r1;
    parallel.pop_back();
  }

  std::vector<Entry> entries(m);
  for (std::size_t e = 0; e < m; ++e) entries[e] = Entry{row_of[e], col_of[e], 1.0};
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  if (spec.entry_mode == EntryMode::Rademacher) {
    for (auto& entry : entries) entry.value = rng.coin() ? 1.0 : -1.0;
  }
  return SparseSignatureMatrix::from_entries(spec, std::move(entries), false);
}

SparseSignatureMatrix generate_irregular(const EnsembleSpec& spec, std::uint64_t realization) {
  spec.validate_irregular();
  auto rng = Rng::for_stream(spec.seed, realization);
  const double p = static_cast<double>(spec.col_degree) / static_cast<double>(spec.n_resources);
  const bool signs = spec.entry_mode == EntryMode::Rademacher;

  std::vector<Entry> entries;
  entries.reserve(spec.n_users * spec.col_degree * 11 / 10 + 16);
  for (std::uint32_t row = 0; row < spec.n_resources; ++row) {
    for (std::uint32_t col = 0; col < spec.n_users; ++col) {
      if (rng.uniform() < p) {
        const double value = signs ? (rng.coin() ? 1.0 : -1.0) : 1.0;
        entries.push_back(Entry{row, col, value});
      }
    }
  }
  return SparseSignatureMatrix::from_entries(spec, std::move(entries), true);
}

namespace {

class CycleCounter {
public:
  CycleCounter(const SparseSignatureMatrix& a, int max_len)
      : max_len_(max_len), adj_(a.rows() + a.cols()), on_path_(adj_.size(), 0) {
    const auto n = static_cast<std::uint32_t>(a.rows());
    for (const auto& e : a.entries()) {
      adj_[e.row].push_back(n + e.col);
      adj_[n + e.col].push_back(e.row);
    }
  }

  // Each cycle is found twice (once per orientation) from its smallest node.
  CycleCounts run() {
    std::uint64_t found[9] = {};
    for (std::uint32_t s = 0; s < adj_.size(); ++s) {
      start_ = s;
      on_path_[s] = 1;
      extend(s, 0, found);
      on_path_[s] = 0;
    }
    return CycleCounts{found[4] / 2, found[6] / 2, found[8] / 2};
  }

private:
  void extend(std::uint32_t v, int length, std::uint64_t* found) {
    for (const auto u : adj_[v]) {
      const int next = length + 1;
      if (u == start_) {
        if (next >= 4) ++found[next];
      } else if (u > start_ && !on_path_[u] && next < max_len_) {
        on_path_[u] = 1;
        extend(u, next, found);
        on_path_[u] = 0;
      }
    }
  }

  int max_len_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<char> on_path_;
  std::uint32_t start_ = 0;
};

} // namespace

CycleCounts cycle_diagnostics(const SparseSignatureMatrix& a, int max_len) {
  if (max_len > 8) throw std::invalid_argument("cycle_diagnostics: max_len > 8");
  if (max_len < 4 || max_len % 2 != 0) {
    throw std::invalid_argument("cycle_diagnostics: max_len must be an even number >= 4");
  }
  return CycleCounter(a, max_len).run();
}

void write_matrix(std::ostream& os, const SparseSignatureMatrix& a) {
  const auto& s = a.spec();
  os << s.n_resources << ' ' << s.n_users << ' ' << s.col_degree << ' '
     << to_string(s.entry_mode) << ' ' << s.seed << '\n';
  for (const auto& e : a.entries()) {
    os << e.row << ' ' << e.col << ' ' << (e.value > 0 ? "1" : "-1") << '\n';
  }
}

SparseSignatureMatrix read_matrix(std::istream& is) {
  EnsembleSpec spec;
  std::string mode;
  if (!(is >> spec.n_resources >> spec.n_users >> spec.col_degree >> mode >> spec.seed)) {
    throw EnsembleError("matrix file: malformed header");
  }
  spec.entry_mode = parse_entry_mode(mode);
  std::vector<Entry> entries;
  long long row = 0, col = 0, value = 0;
  while (is >> row >> col >> value) {
    if (row < 0 || col < 0) throw EnsembleError("matrix file: negative index");
    entries.push_back(Entry{static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col),
                            static_cast<double>(value)});
  }
  if (!is.eof()) throw EnsembleError("matrix file: malformed entry line");

  auto a = SparseSignatureMatrix::from_entries(spec, std::move(entries), true);
  if (a.is_biregular()) {
    return SparseSignatureMatrix::from_entries(spec, a.entries(), false);
  }
  return a;
}

} // namespace ldnoma
