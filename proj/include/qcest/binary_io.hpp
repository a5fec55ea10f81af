// SPDX-License-Identifier: Apache-2.0
//
// qcest: channel estimation for one-bit quantized MIMO receivers
// Copyright (C) 2026 The qcest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef QCEST_BINARY_IO_HPP
#define QCEST_BINARY_IO_HPP

#include "qcest/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

namespace qcest
{

/// Little-endian binary writer. Throws std::runtime_error on I/O failure.
class BinaryWriter
{
  public:
    explicit BinaryWriter(const std::filesystem::path &path);

    void write_magic(const std::array<char, 8> &magic);
    void write_u32(std::uint32_t v);
    void write_u64(std::uint64_t v);
    void write_f64(double v);
    void write_complex(cdouble v);
    /// Flushes and checks the stream state.
    void close();

  private:
    void write_raw(const void *data, std::size_t size);

    std::ofstream out_;
    std::filesystem::path path_;
};

/// Little-endian binary reader. Throws std::runtime_error on truncated or
/// unreadable input.
class BinaryReader
{
  public:
    explicit BinaryReader(const std::filesystem::path &path);

    /// Throws if the next eight bytes differ from `magic`.
    void expect_magic(const std::array<char, 8> &magic, const std::string &what);
    std::uint32_t read_u32();
    std::uint64_t read_u64();
    double read_f64();
    cdouble read_complex();
    std::uint64_t remaining();
    /// Throws if bytes remain after the payload.
    void expect_end(const std::string &what);

  private:
    void read_raw(void *data, std::size_t size);

    std::ifstream in_;
    std::filesystem::path path_;
};

} // namespace qcest

#endif
