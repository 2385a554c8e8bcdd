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

#pragma once

#include <string>

#include "nmrqpt/superop.hpp"
#include "nmrqpt/types.hpp"

namespace nmrqpt {

// Self-describing matrix container: rows, cols, basis tag, row-major data as
// interleaved (re, im) doubles. The binary form starts with the magic
// "NMRQPTM1"; the text form is lossless (17 significant digits).
struct MatrixFile {
  CMatrix data;
  std::string basis = "none";  // "zeeman", "product_operator" or "none"
};

enum class MatrixFormat { text, binary };

// Picks the binary form for a ".bin" suffix and the text form otherwise.
MatrixFormat format_for_path(const std::string& path);

void save_matrix(const std::string& path, const MatrixFile& m);
void save_matrix(const std::string& path, const MatrixFile& m, MatrixFormat format);
MatrixFile load_matrix(const std::string& path);  // detects the form from the content

void save_supermatrix(const std::string& path, const Supermatrix& s);
Supermatrix load_supermatrix(const std::string& path);

std::string matrix_to_text(const MatrixFile& m);
MatrixFile matrix_from_text(const std::string& text);

}  // namespace nmrqpt
