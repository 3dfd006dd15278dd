#include "shufflebn/error.hpp"

namespace shufflebn {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::non_binary_label: return "NonBinaryLabel";
    case Errc::batch_too_small: return "BatchTooSmall";
    case Errc::constant_coordinate: return "ConstantCoordinate";
    case Errc::combinatorial_blowup: return "CombinatorialBlowup";
    case Errc::dimension_not_one: return "DimensionNotOne";
    case Errc::too_many_permutations: return "TooManyPermutations";
    case Errc::zero_reference: return "ZeroReference";
    case Errc::trace_too_short: return "TraceTooShort";
    case Errc::lp_infeasible: return "LPInfeasible";
    case Errc::numerically_ill_conditioned: return "NumericallyIllConditioned";
    case Errc::not_separable: return "NotSeparable";
    case Errc::unbalanced_classes: return "UnbalancedClasses";
    case Errc::degenerate_values: return "DegenerateValues";
    case Errc::not_overparameterized: return "NotOverparameterized";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IOError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

ConstantCoordinate::ConstantCoordinate(long coordinate, long batch)
    : Error(Errc::constant_coordinate,
            "coordinate " + std::to_string(coordinate) + " is constant in batch " +
                std::to_string(batch)),
      coordinate_(coordinate),
      batch_(batch) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace shufflebn
