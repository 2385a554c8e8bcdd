// Copyright 2026 The nmrqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nmrqpt/matrix_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace nmrqpt {

namespace {

constexpr char kMagic[8] = {'N', 'M', 'R', 'Q', 'P', 'T', 'M', '1'};
constexpr const char* kTextHeader = "nmrqpt-matrix 1";

std::uint32_t basis_code(const std::string& b) {
  if (b == "none") return 0;
  if (b == "zeeman") return 1;
  if (b == "product_operator") return 2;
  throw PreconditionError("unknown basis tag '" + b + "'");
}

std::string basis_name(std::uint32_t code) {
  switch (code) {
    case 0: return "none";
    case 1: return "zeeman";
    case 2: return "product_operator";
    default: throw IoError("matrix file: unknown basis code " + std::to_string(code));
  }
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

template <typename T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw IoError("matrix file: truncated binary data");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string to_binary(const MatrixFile& m) {
  std::string buf(kMagic, sizeof(kMagic));
  put<std::uint64_t>(buf, static_cast<std::uint64_t>(m.data.rows()));
  put<std::uint64_t>(buf, static_cast<std::uint64_t>(m.data.cols()));
  put<std::uint32_t>(buf, basis_code(m.basis));
  for (Index i = 0; i < m.data.rows(); ++i) {
    for (Index j = 0; j < m.data.cols(); ++j) {
      put<double>(buf, m.data(i, j).real());
      put<double>(buf, m.data(i, j).imag());
    }
  }
  return buf;
}

MatrixFile from_binary(const std::string& buf) {
  std::size_t pos = sizeof(kMagic);
  const auto rows = take<std::uint64_t>(buf, pos);
  const auto cols = take<std::uint64_t>(buf, pos);
  MatrixFile m;
  m.basis = basis_name(take<std::uint32_t>(buf, pos));
  if (rows * cols * 16 != buf.size() - pos) throw IoError("matrix file: binary size does not match header");
  m.data.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < m.data.rows(); ++i) {
    for (Index j = 0; j < m.data.cols(); ++j) {
      const double re = take<double>(buf, pos);
      const double im = take<double>(buf, pos);
      m.data(i, j) = {re, im};
    }
  }
  return m;
}

}  // namespace

MatrixFormat format_for_path(const std::string& path) {
  const std::string suffix = ".bin";
  if (path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return MatrixFormat::binary;
  }
  return MatrixFormat::text;
}

std::string matrix_to_text(const MatrixFile& m) {
  basis_code(m.basis);
  std::string out = std::string(kTextHeader) + "\nrows " + std::to_string(m.data.rows()) + "\ncols " +
                    std::to_string(m.data.cols()) + "\nbasis " + m.basis + "\nlayout row-major\ndata\n";
  char buf[64];
  for (Index i = 0; i < m.data.rows(); ++i) {
    for (Index j = 0; j < m.data.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%s%.17g %.17g", j ? " " : "", m.data(i, j).real(), m.data(i, j).imag());
      out += buf;
    }
    out += '\n';
  }
  return out;
}

MatrixFile matrix_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTextHeader) throw IoError("matrix file: missing header line");
  long rows = -1, cols = -1;
  MatrixFile m;
  std::string key;
  for (int field = 0; field < 5; ++field) {
    if (!(in >> key)) throw IoError("matrix file: truncated header");
    if (key == "rows") {
      in >> rows;
    } else if (key == "cols") {
      in >> cols;
    } else if (key == "basis") {
      in >> m.basis;
      basis_code(m.basis);
    } else if (key == "layout") {
      std::string layout;
      in >> layout;
      if (layout != "row-major") throw IoError("matrix file: unsupported layout '" + layout + "'");
    } else if (key == "data") {
      break;
    } else {
      throw IoError("matrix file: unknown header field '" + key + "'");
    }
  }
  if (key != "data") {
    if (!(in >> key) || key != "data") throw IoError("matrix file: missing data section");
  }
  if (rows < 0 || cols < 0) throw IoError("matrix file: rows/cols missing");
  m.data.resize(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      if (!(in >> re >> im)) {
        throw IoError("matrix file: data ends early at row " + std::to_string(i) + ", col " + std::to_string(j));
      }
      m.data(i, j) = {re, im};
    }
  }
  if (in >> key) throw IoError("matrix file: trailing data");
  return m;
}

void save_matrix(const std::string& path, const MatrixFile& m, MatrixFormat format) {
  write_all(path, format == MatrixFormat::binary ? to_binary(m) : matrix_to_text(m));
}

void save_matrix(const std::string& path, const MatrixFile& m) { save_matrix(path, m, format_for_path(path)); }

MatrixFile load_matrix(const std::string& path) {
  const std::string bytes = read_all(path);
  if (bytes.size() >= sizeof(kMagic) && std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) == 0) {
    return from_binary(bytes);
  }
  try {
    return matrix_from_text(bytes);
  } catch (const IoError& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

void save_supermatrix(const std::string& path, const Supermatrix& s) {
  save_matrix(path, MatrixFile{s.matrix, to_string(s.basis)});
}

Supermatrix load_supermatrix(const std::string& path) {
  MatrixFile m = load_matrix(path);
  if (m.basis == "none") throw IoError("'" + path + "': supermatrix file lacks a basis tag");
  if (m.data.rows() != m.data.cols()) throw IoError("'" + path + "': supermatrix is not square");
  return {std::move(m.data), basis_from_string(m.basis)};
}

}  // namespace nmrqpt
