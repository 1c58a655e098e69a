#pragma once

#include <cstdint>
#include <string>

#include "gibbs/charts.hpp"

namespace gibbs {

inline constexpr int kSchemaVersion = 1;

struct Tolerances {
  double series_tol = 1e-9;
  double livshitz_tol = 1e-9;
  double eigen_tol = 1e-3;
  double boundary_threshold = 0.2;
  double variational_tol = 0.05;
};

/// Declarative potential description from a config file: materialized
/// against a partition coding once the working depth is known.
struct PotentialSpec {
  enum class Kind { Zero, Constant, Table, Trig };
  Kind kind = Kind::Zero;
  double constant = 0.0;
  int table_depth = 1;
  // word string "0,1,2" -> value
  std::vector<std::pair<std::string, double>> table_values;
  TrigPolynomial trig;
  // optional Holder metadata; estimated from the data when absent
  std::optional<HolderData> holder;

  PotentialInput materialize(const SubshiftSpec& spec) const;
};

struct RunConfig {
  IntMat2 matrix{{{2, 1}, {1, 1}}};
  PotentialSpec potential_u, potential_s;
  int depth = 12;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  Tolerances tol;
  std::string partition_file;  // optional explicit partition

  std::string echo_json() const;  // canonical echo for output headers
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_json(const std::string& text);

/// Partition from an explicit JSON description (vertices in eigenbasis
/// coordinates plus the transition matrix).
MarkovPartition partition_from_file(const ToralAutomorphism& aut,
                                    const std::string& path);

MarkovPartition partition_for(const RunConfig& cfg);

/// Atomic file write: temp file then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace gibbs
