#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ldnoma {

enum class EntryMode { Ones, Rademacher };

std::string_view to_string(EntryMode mode);
EntryMode parse_entry_mode(std::string_view text);

// Spec (or parameter) violations. Distinct from GenerationError so callers
// can tell bad input from a sampler that failed on valid input.
class EnsembleError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class GenerationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Random matrix ensemble: N resources, K users, d nonzeros per column.
struct EnsembleSpec {
  std::size_t n_resources = 0;
  std::size_t n_users = 0;
  std::size_t col_degree = 0;
  EntryMode entry_mode = EntryMode::Rademacher;
  std::uint64_t seed = 0;

  double beta() const {
    return static_cast<double>(n_users) / static_cast<double>(n_resources);
  }
  // beta * d; exact only after validate_regular() succeeds.
  std::size_t row_degree() const { return n_users * col_degree / n_resources; }

  // Throws EnsembleError unless K >= N, N | K*d, d >= 2 and beta*d >= 2.
  void validate_regular() const;
  // Throws EnsembleError unless K >= N, d >= 2 and d/N < 1.
  void validate_irregular() const;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

struct Entry {
  std::uint32_t row;
  std::uint32_t col;
  double value; // +1 or -1

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Sparse N x K signature matrix stored as an entry list sorted by (row, col).
class SparseSignatureMatrix {
public:
  SparseSignatureMatrix() = default;

  // Validates ranges, values in {+1,-1} and absence of duplicates; sorts.
  // When `irregular` is false the degree invariants are checked too.
  static SparseSignatureMatrix from_entries(const EnsembleSpec& spec,
                                            std::vector<Entry> entries,
                                            bool irregular);

  const EnsembleSpec& spec() const { return spec_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t rows() const { return spec_.n_resources; }
  std::size_t cols() const { return spec_.n_users; }
  std::size_t nonzeros() const { return entries_.size(); }
  bool irregular() const { return irregular_; }

  std::vector<std::size_t> column_degrees() const;
  std::vector<std::size_t> row_degrees() const;

  // True when every column has degree d and every row beta*d.
  bool is_biregular() const;

  friend bool operator==(const SparseSignatureMatrix&,
                         const SparseSignatureMatrix&) = default;

private:
  EnsembleSpec spec_{};
  std::vector<Entry> entries_;
  bool irregular_ = false;
};

// Configuration-model sampler with double-edge-switch repair of multi-edges.
// The stream used is Rng::for_stream(spec.seed, realization).
SparseSignatureMatrix generate_regular(const EnsembleSpec& spec,
                                       std::uint64_t realization = 0);

// Each (row, col) independently nonzero with probability d/N.
SparseSignatureMatrix generate_irregular(const EnsembleSpec& spec,
                                         std::uint64_t realization = 0);

struct CycleCounts {
  std::uint64_t len4 = 0;
  std::uint64_t len6 = 0;
  std::uint64_t len8 = 0;

  std::uint64_t total() const { return len4 + len6 + len8; }
};

// Exact number of simple cycles of each even length <= max_len in the
// bipartite graph of A. max_len must be even, between 4 and 8.
CycleCounts cycle_diagnostics(const SparseSignatureMatrix& a, int max_len);

// Text format: header "N K d mode seed", then "row col value" per entry.
void write_matrix(std::ostream& os, const SparseSignatureMatrix& a);
SparseSignatureMatrix read_matrix(std::istream& is);

} // namespace ldnoma
