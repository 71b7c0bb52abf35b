#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracherm/field.hpp"

namespace fracherm {

/// C^infinity plateau: 1 on [0,1], 0 on [2,inf), built from e^{-1/t} bumps.
double plateau_cutoff(double r);

struct CorpusParams {
  int d = 1;
  double alpha = 1.0;  // exponent of the power families
  double gamma = 0.5;  // exponent of the sign/|x|^gamma family
  std::optional<Point> x0;  // centre of the translated families (default 0)
};

/// Fields by name: gaussian, psi, one, x2_gauss, h<k> (d=1), fx, gx,
/// abs_alpha_cutoff, sign_abs_alpha_cutoff, gx_cutoff. Throws
/// std::invalid_argument for unknown names or unsupported dimensions.
ScalarField make_corpus_field(const std::string& name, const CorpusParams& params = {});

/// Classification asserted for a corpus member at its point.
struct CorpusTags {
  std::optional<bool> in_D_alpha;
  std::optional<bool> in_D_alpha_strict;
  std::optional<double> lip_beta;
  bool smooth = false;
  bool discontinuous = false;
  bool unbounded = false;
  /// Expected admissibility for the Hermite operator (m = 0) with sigma = alpha/2.
  std::optional<bool> admissible;
};

struct CorpusEntry {
  std::string id;
  std::string name;
  CorpusParams params;
  Point x0;
  double alpha;
  CorpusTags expected;

  ScalarField field() const { return make_corpus_field(name, params); }
};

std::vector<CorpusEntry> example_corpus();

}  // namespace fracherm
