#pragma once

#include <set>
#include <string>
#include <vector>

#include "pk/region.hpp"

namespace pk {

inline constexpr long kMaxEnumerationDepth = 6;

// Cells of P^1(Z/p^n) that meet the region (a Q_p region). n <= kMaxEnumerationDepth.
std::set<Cell> enumerate_region(const Region& r, prime_t p, long n);

// Compares the cells met by a region with the cells hit by sample points.
struct OracleReport {
  prime_t p = 3;
  long depth = 0;
  unsigned long residues_checked = 0;
  std::vector<std::string> mismatches;  // "+cell" hit but not in region, "-cell" in region but never hit
  unsigned long visited = 0;
  unsigned long unvisited = 0;
  bool pass() const { return mismatches.empty(); }
};
OracleReport residue_oracle(const Region& r, const std::vector<Point>& samples, prime_t p, long n);

struct CliResult {
  int status = 0;  // 0 ok, 2 hypotheses not met, 1 error
  std::string out;
  std::string err;
};

// Runs one command line (without the program name).
CliResult run_cli(const std::vector<std::string>& args);

// Precision cap: the KEPLER_MAX_PREC environment variable when set, else the library default.
long default_precision_cap();

}  // namespace pk
