#pragma once

namespace noteval {

inline constexpr const char* kVersion = "0.1.0";

/// Bumped whenever a serialized document's layout changes.
inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;

}  // namespace noteval
