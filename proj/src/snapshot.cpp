#include "bqp/snapshot.hpp"

#include "bqp/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace bqp {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open snapshot for writing: " + path.string());
  out.write("BQP1", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.n));
  put<double>(out, snap.length);
  put<double>(out, snap.t);
  for (const Values& v : snap.fields) {
    if (v.rows() != snap.n || v.cols() != snap.n) throw ArgumentError("snapshot field has wrong shape");
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
  }
  if (!out) throw Error("failed writing snapshot: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "BQP1", 4) != 0) throw DataIntegrityError("bad snapshot magic in " + path.string());
  Snapshot s;
  s.n = static_cast<int>(get<std::uint32_t>(in));
  s.length = get<double>(in);
  s.t = get<double>(in);
  if (!in || s.n <= 0) throw DataIntegrityError("truncated snapshot header in " + path.string());
  const auto header = static_cast<std::uintmax_t>(4 + 4 + 8 + 8);
  const auto size = std::filesystem::file_size(path);
  const auto per_field = static_cast<std::uintmax_t>(s.n) * s.n * sizeof(double);
  if ((size - header) % per_field != 0) throw DataIntegrityError("snapshot size is not a whole number of fields");
  const auto count = (size - header) / per_field;
  for (std::uintmax_t k = 0; k < count; ++k) {
    Values v(s.n, s.n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(per_field));
    if (!in) throw DataIntegrityError("truncated snapshot data in " + path.string());
    s.fields.push_back(std::move(v));
  }
  return s;
}

}  // namespace bqp
