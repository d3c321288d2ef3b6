#pragma once

#include <Eigen/Dense>
#include <compare>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ict {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatD = Mat<double>;
using MatC = Mat<std::complex<double>>;
using VecD = Vec<double>;
using VecC = Vec<std::complex<double>>;

enum class Group { O3, SO3, SU2 };

inline const char* group_name(Group g) {
  switch (g) {
    case Group::O3: return "O3";
    case Group::SO3: return "SO3";
    case Group::SU2: return "SU2";
  }
  return "?";
}

/// Irrep weight l, stored as the doubled integer 2l so half-integers are exact.
class Weight {
 public:
  Weight() : doubled_(0) {}
  static Weight from_doubled(int d) {
    if (d < 0) throw std::invalid_argument("Weight: doubled value must be >= 0");
    return Weight(d);
  }
  static Weight integer(int l) { return from_doubled(2 * l); }

  int doubled() const { return doubled_; }
  bool is_integer() const { return doubled_ % 2 == 0; }
  /// Requires an integer weight.
  int as_int() const {
    if (!is_integer()) throw std::domain_error("Weight: half-integer has no integer value");
    return doubled_ / 2;
  }
  /// Dimension 2l+1 of the weight-l irrep space.
  int dim() const { return doubled_ + 1; }
  double value() const { return 0.5 * doubled_; }

  /// Canonical text: "2" for integers, "3/2" for half-integers.
  std::string str() const {
    if (is_integer()) return std::to_string(doubled_ / 2);
    return std::to_string(doubled_) + "/2";
  }

  auto operator<=>(const Weight&) const = default;

 private:
  explicit Weight(int d) : doubled_(d) {}
  int doubled_;
};

/// (weight, parity) label. Parity is +1/-1 and ignored under SO3/SU2.
struct Irrep {
  Weight l;
  int parity = -1;
};

/// One tensor-product term of a direct sum; parity is a property of the
/// whole term, not derived from the factors.
struct Term {
  std::vector<Irrep> factors;
  int parity = -1;

  Eigen::Index dim() const {
    Eigen::Index d = 1;
    for (const auto& f : factors) d *= f.l.dim();
    return d;
  }
};

/// Ordered direct sum of tensor-product terms over one group.
struct SpaceSpec {
  Group group = Group::O3;
  std::vector<Term> terms;

  Eigen::Index dim() const {
    Eigen::Index d = 0;
    for (const auto& t : terms) d += t.dim();
    return d;
  }
  /// Row offset of term t in the stacked direct-sum vector.
  Eigen::Index term_offset(std::size_t t) const {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < t; ++i) off += terms[i].dim();
    return off;
  }
  void validate() const {
    if (terms.empty()) throw std::invalid_argument("SpaceSpec: at least one term required");
    for (const auto& t : terms) {
      if (t.factors.empty()) throw std::invalid_argument("SpaceSpec: empty term");
      if (t.parity != 1 && t.parity != -1) throw std::invalid_argument("SpaceSpec: parity must be +1/-1");
      for (const auto& f : t.factors)
        if (group != Group::SU2 && !f.l.is_integer())
          throw std::domain_error("SpaceSpec: half-integer weight requires SU2");
    }
  }
};

/// Cartesian rank-n tensor product space (R^3)^{x n}; term parity (-1)^n.
inline SpaceSpec cartesian_space(int rank, Group group = Group::O3) {
  if (rank < 1) throw std::invalid_argument("cartesian_space: rank must be >= 1");
  Term t;
  t.factors.assign(static_cast<std::size_t>(rank), Irrep{Weight::integer(1), -1});
  t.parity = (rank % 2 == 0) ? 1 : -1;
  return SpaceSpec{group, {t}};
}

struct PathStep {
  Weight bridge;  // weight of the factor coupled at this step
  Weight result;  // weight after coupling
};

/// A decomposition walk through the (general) parentage scheme.
struct Path {
  int term_index = 0;
  Weight start;
  std::vector<PathStep> steps;
  int terminal_parity = -1;

  Weight terminal() const { return steps.empty() ? start : steps.back().result; }

  /// General chains print with bridge labels, e.g. "(2-2>4-2>6)" where "-b>"
  /// is a step with bridge b. All-weight-1 classic chains print in the
  /// traditional form "(0>1>2>...)" with the implicit 0 seed and the unit
  /// bridges omitted.
  std::string str() const {
    bool classic = start.doubled() == 2;
    for (const auto& st : steps) classic = classic && st.bridge.doubled() == 2;
    std::string s;
    if (classic) {
      s = "(0>1";
      for (const auto& st : steps) s += ">" + st.result.str();
    } else {
      s = "(" + start.str();
      for (const auto& st : steps) s += "-" + st.bridge.str() + ">" + st.result.str();
    }
    return s + ")";
  }

  bool operator==(const Path& o) const {
    if (term_index != o.term_index || start != o.start ||
        terminal_parity != o.terminal_parity || steps.size() != o.steps.size())
      return false;
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (steps[i].bridge != o.steps[i].bridge || steps[i].result != o.steps[i].result) return false;
    return true;
  }
};

/// Triangle rule |a-b| <= c <= a+b, with matching integer/half-integer class.
inline bool triangle_ok(Weight a, Weight b, Weight c) {
  const int s = a.doubled() + b.doubled();
  const int d = std::abs(a.doubled() - b.doubled());
  if (c.doubled() < d || c.doubled() > s) return false;
  return (s - c.doubled()) % 2 == 0;
}

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class store_error : public std::runtime_error {
 public:
  explicit store_error(const std::string& msg, std::string object = {})
      : std::runtime_error(msg), object_(std::move(object)) {}
  const std::string& object() const { return object_; }

 private:
  std::string object_;
};

}  // namespace ict
