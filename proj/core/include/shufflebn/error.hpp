#pragma once

#include <stdexcept>
#include <string>

namespace shufflebn {

enum class Errc {
  dimension_mismatch,
  non_binary_label,
  batch_too_small,
  constant_coordinate,
  combinatorial_blowup,
  dimension_not_one,
  too_many_permutations,
  zero_reference,
  trace_too_short,
  lp_infeasible,
  numerically_ill_conditioned,
  not_separable,
  unbalanced_classes,
  degenerate_values,
  not_overparameterized,
  config_error,
  io_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised when a zero-variance coordinate is normalized with epsilon == 0.
class ConstantCoordinate : public Error {
 public:
  ConstantCoordinate(long coordinate, long batch);
  long coordinate() const noexcept { return coordinate_; }
  long batch() const noexcept { return batch_; }

 private:
  long coordinate_;
  long batch_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace shufflebn
