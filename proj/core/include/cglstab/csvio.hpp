#pragma once

#include <cstdint>
#include <string>

namespace cglstab {

// Shortest round-trippable decimal form, printf %.17g. All numeric CSV
// output goes through this so identical runs produce identical bytes.
std::string fmt_g17(double v);

// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

// "0x" + 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

} // namespace cglstab
