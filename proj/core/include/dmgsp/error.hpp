#pragma once

#include <stdexcept>
#include <string>

namespace dmgsp {

// Every failure mode the library reports. Grouped so a front end can map
// them onto coarse exit codes without string matching.
enum class errc {
  // input / data problems
  not_symmetric,
  negative_weight,
  self_loop,
  too_small,
  bad_coordinates,
  degenerate_data,
  bad_truncation,
  too_few_observations,
  zero_range,
  all_skipped,
  bad_params,
  file_not_found,
  parse_error,
  station_mismatch,
  io_error,
  // numerical problems
  isolated_node,
  disconnected,
  numerical_failure,
  not_ergodic,
  filter_pole,
  not_psd,
  not_connected,
};

enum class error_category { data, numeric };

constexpr error_category category(errc c) {
  switch (c) {
    case errc::isolated_node:
    case errc::disconnected:
    case errc::numerical_failure:
    case errc::not_ergodic:
    case errc::filter_pole:
    case errc::not_psd:
    case errc::not_connected:
      return error_category::numeric;
    default:
      return error_category::data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const { return code_; }
  error_category category() const { return dmgsp::category(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace dmgsp
