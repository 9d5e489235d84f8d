#include <chiprobe/fock/dump.hpp>

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>

namespace chiprobe::fock {

static_assert(std::endian::native == std::endian::little, "NPY writer assumes a little-endian host");

void write_npy(const std::string& path, const Matrix& m) {
  std::string header = "{'descr': '<c16', 'fortran_order': True, 'shape': (" + std::to_string(m.rows()) + ", " +
                       std::to_string(m.cols()) + "), }";
  // magic (6) + version (2) + length (2) + header + '\n' must be a multiple of 64
  const std::size_t total = 10 + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config, "cannot open " + path + " for writing");
  out.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {char(len & 0xff), char(len >> 8)};
  out.write(len_bytes, 2);
  out.write(header.data(), std::streamsize(header.size()));
  out.write(reinterpret_cast<const char*>(m.data()), std::streamsize(sizeof(cdouble) * std::size_t(m.size())));
  if (!out) throw Error(Errc::config, "failed writing " + path);
}

Matrix read_npy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config, "cannot open " + path);
  char magic[10];
  in.read(magic, 10);
  if (!in || std::memcmp(magic, "\x93NUMPY\x01\x00", 8) != 0) throw Error(Errc::config, path + " is not an NPY file");
  const std::size_t len = std::uint8_t(magic[8]) | (std::size_t(std::uint8_t(magic[9])) << 8);
  std::string header(len, '\0');
  in.read(header.data(), std::streamsize(len));
  std::smatch match;
  if (header.find("'<c16'") == std::string::npos || header.find("'fortran_order': True") == std::string::npos ||
      !std::regex_search(header, match, std::regex(R"(\((\d+), (\d+)\))")))
    throw Error(Errc::config, path + " has an unsupported NPY layout");
  Matrix m(std::stol(match[1]), std::stol(match[2]));
  in.read(reinterpret_cast<char*>(m.data()), std::streamsize(sizeof(cdouble) * std::size_t(m.size())));
  if (!in) throw Error(Errc::config, path + " is truncated");
  return m;
}

void dump_matrix(const std::string& stem, const Matrix& m, const std::string& kind, const OscillatorParams& p,
                 int fock_dim, double time) {
  write_npy(stem + ".npy", m);
  nlohmann::json meta = {
      {"kind", kind},
      {"array", stem.substr(stem.find_last_of('/') + 1) + ".npy"},
      {"dtype", "complex128"},
      {"order", "F"},
      {"shape", {m.rows(), m.cols()}},
      {"fock_dim", fock_dim},
      {"time", time},
      {"params", {{"nu", p.nu}, {"gamma", p.gamma}, {"nbar", p.nbar}, {"g", p.g}}},
  };
  std::ofstream out(stem + ".json");
  if (!out) throw Error(Errc::config, "cannot open " + stem + ".json for writing");
  out << meta.dump(2) << '\n';
}

}  // namespace chiprobe::fock
