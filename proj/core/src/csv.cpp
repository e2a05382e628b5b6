#include "oscwave/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace oscwave::csv {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(uint64_t x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(x));
  return buf;
}

std::string fmt(int x) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d", x);
  return buf;
}

std::string hash_hex(uint64_t hash) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::ofstream open_with_provenance(const std::string& path, uint64_t hash, uint64_t seed) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);  // '\n' endings on every platform
  if (!os) throw std::runtime_error("csv: cannot open " + path + " for writing");
  os << "# config_hash=" << hash_hex(hash) << " seed=" << fmt(seed) << "\n";
  return os;
}

}  // namespace oscwave::csv
