#pragma once

namespace splitsim {

// Embedded in report provenance; bump on releases that change any output schema.
inline constexpr const char* kVersion = "splitsim 1.0.0";

}  // namespace splitsim
