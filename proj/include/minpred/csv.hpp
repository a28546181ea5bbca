#pragma once

#include <string>

#include "minpred/dataset.hpp"

namespace minpred {

// Strict wide-CSV loader: UTF-8, comma-separated, one header row of series
// names, one row per time step, decimal-point reals. Multi-dimensional
// series use the column naming convention name.0, name.1, ...; an optional
// leading `segment` column of integer ids separates independent raw
// segments (windows never cross segment boundaries). Malformed input is
// rejected with the offending line number, never coerced.
TimeSeriesBundle load_csv(const std::string& path);

void save_csv(const TimeSeriesBundle& bundle, const std::string& path);

}  // namespace minpred
