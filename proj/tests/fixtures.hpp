#pragma once

#include "nestfrag/mass_partition.hpp"

namespace nestfrag::fixtures {

inline FragmentationParams mixed_params() {
  FragmentationParams p;
  p.c_out = 0.5;
  p.c_in1 = 0.3;
  p.c_in2 = 0.2;
  p.nu_out.push_back({1.0, validate_mass({0.5, 0.3})});
  p.nu_in.push_back({1.0, canonicalize_bivariate({0.5}, {{0.5}}, 0.5, {0.5})});
  return p;
}

inline FragmentationParams binary_params() {
  FragmentationParams p;
  p.c_out = 0.5;
  p.c_in1 = 0.3;
  p.c_in2 = 0.2;
  p.nu_out.push_back({1.0, validate_mass({0.5, 0.5})});
  p.nu_in.push_back({1.0, canonicalize_bivariate({0.7, 0.3}, {}, 1.0, {})});
  p.nu_in.push_back({1.0, canonicalize_bivariate({}, {{0.6, 0.4}}, 0.0, {1.0})});
  p.nu_in.push_back({1.0, canonicalize_bivariate({0.4}, {{0.6}}, 0.4, {0.6})});
  return p;
}

inline FragmentationParams erosion_params(double c_out, double c_in1, double c_in2) {
  FragmentationParams p;
  p.c_out = c_out;
  p.c_in1 = c_in1;
  p.c_in2 = c_in2;
  return p;
}

}  // namespace nestfrag::fixtures
