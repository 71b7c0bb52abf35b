#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracherm/corpus.hpp"
#include "fracherm/field.hpp"
#include "fracherm/frac.hpp"
#include "fracherm/quad.hpp"
#include "json.hpp"

namespace fracherm::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20240611;

enum ExitCode : int { kOk = 0, kInconclusive = 1, kDiverged = 2, kUsage = 64 };

/// Config problem located in the source document (1-based line and column).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, int column)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }
  std::string diagnostic(const std::string& source) const;

 private:
  int line_;
  int column_;
};

struct BoundsOptions {
  std::vector<std::string> checks{"size", "smoothness", "gaussian_tail", "elementary"};
  int samples = 10000;
};

struct RunConfig {
  OperatorSpec op = OperatorSpec::hermite(1, 0.0);
  double sigma = 0.5;
  std::vector<Point> points;
  /// Corpus name or inline expression.
  std::string function;
  bool function_is_corpus = false;
  CorpusParams corpus;
  /// Smoothness order; defaults to 2 sigma.
  double alpha = 1.0;
  double delta = 1.0;
  QuadratureSpec quadrature;
  FracRequest frac;
  double agreement_tol = 1e-5;
  BoundsOptions bounds;
  std::vector<std::string> outputs;
  /// Sorted-key dump of the parsed document; input of the config hash.
  std::string canonical;

  static RunConfig parse(std::string_view text);
  ScalarField field() const;
  std::uint64_t hash() const;
};

std::uint64_t fnv1a64(std::string_view bytes);

struct Record {
  std::vector<int> key;  // output order
  nlohmann::json body;
};

struct CommandResult {
  std::vector<Record> records;
  int exit_code = kOk;
};

/// Runs one subcommand over every point with `threads` workers. Records come
/// back sorted by key.
CommandResult run_command(const std::string& command, const RunConfig& config, std::uint64_t seed,
                          int threads);

/// NDJSON, one record per line.
void write_json(const std::vector<Record>& records, std::ostream& out);
/// Flattened records; columns are the union of JSON pointer paths.
void write_csv(const std::vector<Record>& records, std::ostream& out);

/// FRACHERM_THREADS when set to a positive integer, else the hardware count.
int worker_count();

/// Full command line: args[0] is the subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracherm::cli
