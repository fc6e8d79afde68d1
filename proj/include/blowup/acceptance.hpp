#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blowup/numerics.hpp"

namespace blowup {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Reduced resolutions with the looser tolerances of tolerance_table().
  bool quick = false;
  /// Run only these ids (empty: all).
  std::vector<int> only;
};

/// e^{i theta} kappa(d, .) sampled on a grid; replaceable to check that the
/// stationary criterion rejects a wrong family.
using FamilyFn = std::function<ComplexField(const CylinderGrid&, double d, double theta)>;

CriterionResult criterion_stationary(const FamilyFn& family, bool quick);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "criterion  N  PASS  title  (detail)  [seconds]".
std::string format_result(const CriterionResult& r);

struct ToleranceRow {
  int id;
  std::string quantity;
  std::string full;
  std::string quick;
};

/// Resolutions and tolerances of both modes, as pinned in the code.
std::vector<ToleranceRow> tolerance_table();

}  // namespace blowup
