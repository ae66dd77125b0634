#pragma once

// Flat key=value configuration for the segmentation driver.
//
//   max_level=9
//   permutation=random          # raster | random | file:<path>
//   seed=0
//   reshuffle_per_level=false
//   neighborhood=8              # 8 (3x3 block) or 4 (cross); sets w0 and the MRF g
//   w0=8                        # adjacency only
//   metric=euclidean            # euclidean | per_band_abs (aliases l2 | l1)
//   temperature=1
//   rho=100                     # or "auto"
//   calibration_samples=2000
//   eval_mode=direct            # direct | pyramid
//   workers=1
//   eval_radii=1,2,3            # optional, one per level
//   merge_radii=2,4,8           # optional, one per level
//
// '#' starts a comment; blank lines are ignored; later keys override earlier ones.

#include <string>
#include <string_view>

#include "mcv/driver.hpp"

namespace mcv {

/// Applies one key. Permutation files are recorded in `permutation_path` and
/// must be loaded by the caller. Throws ConfigError on unknown keys or bad values.
void apply_config_key(McvConfig& config, std::string& permutation_path, std::string_view key,
                      std::string_view value);

/// Parses a whole config file on top of `base`.
McvConfig parse_config(std::string_view text, std::string& permutation_path,
                       McvConfig base = {});

/// Inverse of parse_config for the keys above (permutation files are written as
/// "file"); used for the run report.
std::string format_config(const McvConfig& config);

}  // namespace mcv
