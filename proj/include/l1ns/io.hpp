#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "l1ns/matrix.hpp"

namespace l1ns {

// Matrix file formats.
//
// CSV: plain decimal text, one matrix row per line, comma-separated, no
// header. Written with 17 significant digits so values round-trip exactly.
//
// Binary: magic "L1NS", format version u32 little-endian, rows u64, cols u64,
// then rows*cols IEEE-754 doubles little-endian row-major.

inline constexpr std::uint32_t kMatrixFormatVersion = 1;

DenseMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);

DenseMatrix read_matrix_binary(const std::filesystem::path& path);
void write_matrix_binary(const std::filesystem::path& path, const DenseMatrix& m);

/// Reads either format, sniffing the binary magic bytes first.
DenseMatrix read_matrix_any(const std::filesystem::path& path);

/// Runs writer against a temporary file in the destination directory, then
/// renames over path. Nothing is left behind when the writer throws.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(const std::filesystem::path&)>& writer);

// Little-endian scalar encode/decode used by every binary format in the
// library (matrix files and the search index share them).
void append_u32(std::string& out, std::uint32_t v);
void append_u64(std::string& out, std::uint64_t v);
void append_f64(std::string& out, double v);
std::uint32_t read_u32(const std::string& buf, std::size_t& pos);
std::uint64_t read_u64(const std::string& buf, std::size_t& pos);
double read_f64(const std::string& buf, std::size_t& pos);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

std::string encode_matrix_binary(const DenseMatrix& m);
DenseMatrix decode_matrix_binary(const std::string& buf, std::size_t& pos);

}  // namespace l1ns
