#pragma once

#include "decentmem/memory.hpp"

#include <filesystem>

namespace decentmem {

// Line-delimited store: one header record, then one JSON object per
// piece. Schema documented in docs/store_format.md.

void save_store(const DualPoolMemory& memory, const std::filesystem::path& path);

DualPoolMemory load_store(const std::filesystem::path& path);

} // namespace decentmem
