#pragma once

#include <optional>

#include "ict/store.hpp"

namespace ict {

struct ContainerVerifyOptions {
  int samples = 20;
  bool with_oracle = false;
  std::optional<double> tol_override;  // replaces every residual tolerance
  Eigen::Index oracle_cap = 10000;
  std::uint64_t seed = 7;
  int threads = -1;
};

struct CheckResult {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool pass = true;
  std::string note;
};

struct ContainerVerifyResult {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Re-derives the container's claims and measures the residuals: column
/// orthonormality, cross-path orthogonality and completeness for path
/// matrices; partition/annihilation/idempotence/trace/equivariance for
/// projector sets; Frobenius orthonormality, counts and equivariance for
/// basis containers. With `with_oracle`, in-cap spans are compared against
/// the commutant nullspace by principal angles.
ContainerVerifyResult verify_container(const Container& c, const ContainerVerifyOptions& opts = {});

}  // namespace ict
