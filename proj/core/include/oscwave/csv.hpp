// CSV emission: comma separated, '.' decimal, 17 significant digits, one
// header row, '#' provenance comments. Byte-deterministic for equal inputs.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>

namespace oscwave::csv {

std::string fmt(double x);
std::string fmt(uint64_t x);
std::string fmt(int x);

// Opens path for writing (creating parent directories) and emits the
// provenance comment line "# config_hash=<hex> seed=<seed>".
std::ofstream open_with_provenance(const std::string& path, uint64_t hash, uint64_t seed);

std::string hash_hex(uint64_t hash);

}  // namespace oscwave::csv
