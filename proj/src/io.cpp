#include "l1ns/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace l1ns {

namespace {

constexpr char kMatrixMagic[4] = {'L', '1', 'N', 'S'};

[[noreturn]] void io_fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

}  // namespace

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  append_u64(out, bits);
}

std::uint32_t read_u32(const std::string& buf, std::size_t& pos) {
  if (pos + 4 > buf.size()) throw std::runtime_error("binary data truncated (u32)");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  pos += 4;
  return v;
}

std::uint64_t read_u64(const std::string& buf, std::size_t& pos) {
  if (pos + 8 > buf.size()) throw std::runtime_error("binary data truncated (u64)");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  pos += 8;
  return v;
}

double read_f64(const std::string& buf, std::size_t& pos) {
  const std::uint64_t bits = read_u64(buf, pos);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail(path, "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) io_fail(path, "write failed");
}

std::string encode_matrix_binary(const DenseMatrix& m) {
  std::string out;
  out.reserve(4 + 4 + 16 + 8 * m.data.size());
  out.append(kMatrixMagic, 4);
  append_u32(out, kMatrixFormatVersion);
  append_u64(out, m.rows);
  append_u64(out, m.cols);
  for (double v : m.data) append_f64(out, v);
  return out;
}

DenseMatrix decode_matrix_binary(const std::string& buf, std::size_t& pos) {
  if (pos + 4 > buf.size() || std::memcmp(buf.data() + pos, kMatrixMagic, 4) != 0) {
    throw std::runtime_error("bad matrix magic bytes");
  }
  pos += 4;
  const std::uint32_t version = read_u32(buf, pos);
  if (version != kMatrixFormatVersion) {
    throw std::runtime_error("unsupported matrix format version " + std::to_string(version));
  }
  const std::uint64_t rows = read_u64(buf, pos);
  const std::uint64_t cols = read_u64(buf, pos);
  if (rows == 0 || cols == 0 || rows * cols > (1ull << 34)) {
    throw std::runtime_error("implausible matrix shape " + std::to_string(rows) + "x" +
                             std::to_string(cols));
  }
  DenseMatrix m(rows, cols);
  for (double& v : m.data) v = read_f64(buf, pos);
  return m;
}

DenseMatrix read_matrix_binary(const std::filesystem::path& path) {
  const std::string buf = read_file_bytes(path);
  std::size_t pos = 0;
  try {
    DenseMatrix m = decode_matrix_binary(buf, pos);
    if (pos != buf.size()) io_fail(path, "trailing bytes after matrix payload");
    return m;
  } catch (const std::runtime_error& e) {
    io_fail(path, e.what());
  }
}

void write_matrix_binary(const std::filesystem::path& path, const DenseMatrix& m) {
  atomic_write(path, [&](const std::filesystem::path& tmp) {
    write_file_bytes(tmp, encode_matrix_binary(m));
  });
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) io_fail(path, "cannot open for reading");
  std::vector<double> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::size_t count = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      const char* field_end = static_cast<const char*>(std::memchr(p, ',', end - p));
      if (field_end == nullptr) field_end = end;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, field_end, v);
      if (ec != std::errc() || ptr != field_end) {
        io_fail(path, "bad number in row " + std::to_string(rows + 1));
      }
      entries.push_back(v);
      ++count;
      p = (field_end == end) ? end : field_end + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      io_fail(path, "row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                        " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0 || cols == 0) io_fail(path, "empty matrix");
  return DenseMatrix(rows, cols, std::move(entries));
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  atomic_write(path, [&](const std::filesystem::path& tmp) {
    std::ofstream out(tmp);
    if (!out) io_fail(tmp, "cannot open for writing");
    char buf[64];
    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t j = 0; j < m.cols; ++j) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), m.at(i, j),
                                             std::chars_format::general, 17);
        if (ec != std::errc()) io_fail(tmp, "number formatting failed");
        if (j) out.put(',');
        out.write(buf, ptr - buf);
      }
      out.put('\n');
    }
    if (!out) io_fail(tmp, "write failed");
  });
}

DenseMatrix read_matrix_any(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) io_fail(path, "cannot open for reading");
  char head[4] = {0, 0, 0, 0};
  probe.read(head, 4);
  probe.close();
  if (std::memcmp(head, kMatrixMagic, 4) == 0) return read_matrix_binary(path);
  return read_matrix_csv(path);
}

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(const std::filesystem::path&)>& writer) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    writer(tmp);
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

}  // namespace l1ns
