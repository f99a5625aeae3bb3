#pragma once

// Parameter spaces: mass partitions, bivariate mass partitions, and the full
// set of fragmentation parameters (three erosion coefficients plus finite
// atomic outer and inner dislocation measures).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"
#include "nestfrag/error.hpp"

namespace nestfrag {

/// Slack for every "<=" constraint on user-supplied frequencies.
inline constexpr double kMassTolerance = 1e-9;

namespace detail {

inline void require_nonnegative(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0) {
    throw Error(ErrorCode::Negative, std::string(what) + " must be a finite nonnegative number");
  }
}

inline double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

/// Sorted descending with exact zeros dropped.
inline std::vector<double> canonical_frequencies(std::vector<double> v, const char* what) {
  for (double x : v) require_nonnegative(x, what);
  std::erase_if(v, [](double x) { return x == 0.0; });
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace detail

/// Nonincreasing frequencies s_1 >= s_2 >= ... with sum <= 1; the rest is dust.
struct MassPartition {
  std::vector<double> s;

  double dust() const { return std::max(0.0, 1.0 - detail::sum(s)); }
  bool is_identity() const { return !s.empty() && s.front() >= 1.0 - kMassTolerance; }

  friend bool operator==(const MassPartition&, const MassPartition&) = default;
};

inline MassPartition validate_mass(std::vector<double> raw) {
  auto s = detail::canonical_frequencies(std::move(raw), "mass");
  if (detail::sum(s) > 1.0 + kMassTolerance) throw Error(ErrorCode::SumExceedsOne, "frequencies sum above 1");
  return {std::move(s)};
}

/// Frequencies describing how a fragmenting inner block spreads over the
/// mother outer block (u, u_bar) and new outer blocks (s_rows, s_bar).
struct BivariateMassPartition {
  std::vector<double> u;                    // inner blocks kept in the mother outer block
  std::vector<std::vector<double>> s_rows;  // row k: inner blocks of new outer block k
  double u_bar = 0.0;                       // mother outer block
  std::vector<double> s_bar;                // new outer blocks

  double mother_dust() const { return std::max(0.0, u_bar - detail::sum(u)); }
  double new_dust(std::size_t k) const { return std::max(0.0, s_bar[k] - detail::sum(s_rows[k])); }
  double isolated() const { return std::max(0.0, 1.0 - u_bar - detail::sum(s_bar)); }

  /// The element with u_bar = u_1 = 1: every element stays put.
  bool is_identity() const { return !u.empty() && u.front() >= 1.0 - kMassTolerance; }

  friend bool operator==(const BivariateMassPartition&, const BivariateMassPartition&) = default;
};

namespace detail {

/// Lexicographic comparison with implicit trailing zeros.
inline bool row_greater(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t len = std::max(a.size(), b.size());
  for (std::size_t l = 0; l < len; ++l) {
    const double x = l < a.size() ? a[l] : 0.0;
    const double y = l < b.size() ? b[l] : 0.0;
    if (x != y) return x > y;
  }
  return false;
}

}  // namespace detail

inline BivariateMassPartition canonicalize_bivariate(std::vector<double> u, std::vector<std::vector<double>> s_rows,
                                                     double u_bar, std::vector<double> s_bar) {
  detail::require_nonnegative(u_bar, "u_bar");
  u = detail::canonical_frequencies(std::move(u), "u");
  if (s_rows.size() > s_bar.size()) {
    throw Error(ErrorCode::RowSumExceedsBar, "more s rows than s_bar entries");
  }
  s_rows.resize(s_bar.size());
  if (detail::sum(u) > u_bar + kMassTolerance) throw Error(ErrorCode::RowSumExceedsBar, "sum of u exceeds u_bar");

  struct Outer {
    double bar;
    std::vector<double> row;
  };
  std::vector<Outer> outers;
  for (std::size_t k = 0; k < s_bar.size(); ++k) {
    detail::require_nonnegative(s_bar[k], "s_bar");
    auto row = detail::canonical_frequencies(std::move(s_rows[k]), "s_rows");
    if (detail::sum(row) > s_bar[k] + kMassTolerance) {
      throw Error(ErrorCode::RowSumExceedsBar, "row " + std::to_string(k) + " exceeds its s_bar");
    }
    if (s_bar[k] > 0.0) outers.push_back({s_bar[k], std::move(row)});
  }
  std::stable_sort(outers.begin(), outers.end(), [](const Outer& a, const Outer& b) {
    if (a.bar != b.bar) return a.bar > b.bar;
    return detail::row_greater(a.row, b.row);
  });

  BivariateMassPartition p;
  p.u = std::move(u);
  p.u_bar = u_bar;
  for (auto& o : outers) {
    p.s_bar.push_back(o.bar);
    p.s_rows.push_back(std::move(o.row));
  }
  if (p.u_bar + detail::sum(p.s_bar) > 1.0 + kMassTolerance) {
    throw Error(ErrorCode::TotalExceedsOne, "u_bar plus s_bar exceeds 1");
  }
  return p;
}

inline BivariateMassPartition canonicalize_bivariate(const BivariateMassPartition& p) {
  return canonicalize_bivariate(p.u, p.s_rows, p.u_bar, p.s_bar);
}

// ---------------------------------------------------------------------------
// Full parameter set

struct OuterAtom {
  double rate = 0.0;
  MassPartition s;
};

struct InnerAtom {
  double rate = 0.0;
  BivariateMassPartition p;
};

struct FragmentationParams {
  double c_out = 0.0;
  double c_in1 = 0.0;
  double c_in2 = 0.0;
  std::vector<OuterAtom> nu_out;
  std::vector<InnerAtom> nu_in;

  bool is_zero() const { return c_out == 0.0 && c_in1 == 0.0 && c_in2 == 0.0 && nu_out.empty() && nu_in.empty(); }
};

/// Checks coefficients and atoms; atoms must already be canonical.
inline void validate_params(const FragmentationParams& params) {
  for (double c : {params.c_out, params.c_in1, params.c_in2}) {
    if (!std::isfinite(c) || c < 0.0) throw Error(ErrorCode::BadParams, "erosion coefficients must be finite and >= 0");
  }
  for (std::size_t a = 0; a < params.nu_out.size(); ++a) {
    const auto& atom = params.nu_out[a];
    if (!std::isfinite(atom.rate) || atom.rate <= 0.0) {
      throw Error(ErrorCode::BadParams, "nu_out atom " + std::to_string(a) + " needs a positive finite rate");
    }
    if (atom.s.is_identity()) {
      throw Error(ErrorCode::BadParams, "nu_out atom " + std::to_string(a) + " is the trivial mass partition (1)");
    }
  }
  for (std::size_t a = 0; a < params.nu_in.size(); ++a) {
    const auto& atom = params.nu_in[a];
    if (!std::isfinite(atom.rate) || atom.rate <= 0.0) {
      throw Error(ErrorCode::BadParams, "nu_in atom " + std::to_string(a) + " needs a positive finite rate");
    }
    if (atom.p.is_identity()) {
      throw Error(ErrorCode::BadParams, "nu_in atom " + std::to_string(a) + " is the identity element (u_1 = 1)");
    }
  }
}

// JSON: {"c_out":r,"c_in1":r,"c_in2":r,"nu_out":[{"rate":r,"s":[...]}],
//        "nu_in":[{"rate":r,"u":[...],"u_bar":r,"s_bar":[...],"s_rows":[[...],...]}]}

inline FragmentationParams params_from_json(const nlohmann::json& j) {
  try {
    FragmentationParams params;
    params.c_out = j.value("c_out", 0.0);
    params.c_in1 = j.value("c_in1", 0.0);
    params.c_in2 = j.value("c_in2", 0.0);
    if (j.contains("nu_out")) {
      for (const auto& a : j.at("nu_out")) {
        params.nu_out.push_back({a.at("rate").get<double>(), validate_mass(a.at("s").get<std::vector<double>>())});
      }
    }
    if (j.contains("nu_in")) {
      for (const auto& a : j.at("nu_in")) {
        auto p = canonicalize_bivariate(a.value("u", std::vector<double>{}),
                                        a.value("s_rows", std::vector<std::vector<double>>{}),
                                        a.value("u_bar", 0.0), a.value("s_bar", std::vector<double>{}));
        params.nu_in.push_back({a.at("rate").get<double>(), std::move(p)});
      }
    }
    validate_params(params);
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadParams, e.what());
  }
}

inline nlohmann::ordered_json params_to_json(const FragmentationParams& params) {
  nlohmann::ordered_json j;
  j["c_out"] = params.c_out;
  j["c_in1"] = params.c_in1;
  j["c_in2"] = params.c_in2;
  j["nu_out"] = nlohmann::ordered_json::array();
  for (const auto& a : params.nu_out) j["nu_out"].push_back({{"rate", a.rate}, {"s", a.s.s}});
  j["nu_in"] = nlohmann::ordered_json::array();
  for (const auto& a : params.nu_in) {
    j["nu_in"].push_back(
        {{"rate", a.rate}, {"u", a.p.u}, {"u_bar", a.p.u_bar}, {"s_bar", a.p.s_bar}, {"s_rows", a.p.s_rows}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Binary branching projection

/// A finite measure on [0, 1] as weighted points.
struct WeightedPoint {
  double rate;
  double x;
};
using PointMeasure = std::vector<WeightedPoint>;

struct BinaryMeasures {
  PointMeasure out;  // symmetrized s_1
  PointMeasure in1;  // u = (x, 1 - x), everything stays in the mother outer block
  PointMeasure in2;  // one new outer block holding two inner blocks (x, 1 - x)
  PointMeasure in3;  // x stays in the mother outer block, 1 - x leaves as a new one
};

enum class BinaryShape { None, Inner1, Inner2, Inner3 };

namespace detail {

inline bool near(double a, double b) { return std::abs(a - b) <= kMassTolerance; }

inline bool two_parts_no_dust(const std::vector<double>& v) {
  return v.size() == 2 && v[1] > 0.0 && near(v[0] + v[1], 1.0);
}

}  // namespace detail

inline BinaryShape classify_binary(const BivariateMassPartition& p) {
  using detail::near;
  if (near(p.u_bar, 1.0) && detail::two_parts_no_dust(p.u) && p.s_bar.empty()) return BinaryShape::Inner1;
  if (near(p.u_bar, 0.0) && p.u.empty() && p.s_bar.size() == 1 && near(p.s_bar[0], 1.0) &&
      detail::two_parts_no_dust(p.s_rows[0])) {
    return BinaryShape::Inner2;
  }
  if (p.u.size() == 1 && p.u[0] > 0.0 && near(p.u_bar, p.u[0]) && p.s_bar.size() == 1 &&
      p.s_rows[0].size() == 1 && near(p.s_rows[0][0], p.s_bar[0]) && near(p.u[0] + p.s_bar[0], 1.0)) {
    return BinaryShape::Inner3;
  }
  return BinaryShape::None;
}

inline BinaryMeasures binary_project(const FragmentationParams& params) {
  BinaryMeasures m;
  for (std::size_t a = 0; a < params.nu_out.size(); ++a) {
    const auto& atom = params.nu_out[a];
    if (!detail::two_parts_no_dust(atom.s.s)) {
      throw Error(ErrorCode::NotBinary, "nu_out atom " + std::to_string(a) + " is not a binary split");
    }
    m.out.push_back({atom.rate, atom.s.s[0]});
    m.out.push_back({atom.rate, 1.0 - atom.s.s[0]});
  }
  for (std::size_t a = 0; a < params.nu_in.size(); ++a) {
    const auto& atom = params.nu_in[a];
    switch (classify_binary(atom.p)) {
      case BinaryShape::Inner1:
        m.in1.push_back({atom.rate, atom.p.u[0]});
        m.in1.push_back({atom.rate, 1.0 - atom.p.u[0]});
        break;
      case BinaryShape::Inner2:
        m.in2.push_back({atom.rate, atom.p.s_rows[0][0]});
        m.in2.push_back({atom.rate, 1.0 - atom.p.s_rows[0][0]});
        break;
      case BinaryShape::Inner3:
        m.in3.push_back({atom.rate, atom.p.u[0]});
        break;
      case BinaryShape::None:
        throw Error(ErrorCode::NotBinary, "nu_in atom " + std::to_string(a) + " matches no binary shape");
    }
  }
  return m;
}

}  // namespace nestfrag
