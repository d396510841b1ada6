#pragma once

#include <iosfwd>

#include "otfs/channel.hpp"

namespace otfs {

/// Plain-text dump of a time-varying channel, one tap value per line.
///
///   # otfs channel v1
///   M N delta_f L_cp P D_1 ... D_P
///   p m k re im            (1-based OFDM symbol, row, tap)
///
/// Values are printed with 17 significant digits so a round trip is exact.
void export_channel(std::ostream& out, const TimeVaryingChannel& channel);

/// Inverse of export_channel. Throws ConfigError with the line number on
/// malformed input and InvariantError when the header describes an invalid
/// grid or pattern.
TimeVaryingChannel import_channel(std::istream& in);

}  // namespace otfs
