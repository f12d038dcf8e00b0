#pragma once

namespace dmgsp {

inline constexpr const char* kVersion = "0.1.0";

// Version of the on-disk table/CSV formats. Bump when a header or layout
// changes so downstream parsers can detect stale files.
inline constexpr int kFormatVersion = 1;

}  // namespace dmgsp
