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

#include "qcest/binary_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace qcest
{

namespace
{

template <typename T> T to_little(T v)
{
    if constexpr (std::endian::native == std::endian::little)
        return v;
    auto *bytes = reinterpret_cast<unsigned char *>(&v);
    std::reverse(bytes, bytes + sizeof(T));
    return v;
}

} // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path &path) : out_(path, std::ios::binary | std::ios::trunc), path_(path)
{
    if (!out_)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
}

void BinaryWriter::write_raw(const void *data, std::size_t size)
{
    out_.write(static_cast<const char *>(data), static_cast<std::streamsize>(size));
    if (!out_)
        throw std::runtime_error("write to '" + path_.string() + "' failed");
}

void BinaryWriter::write_magic(const std::array<char, 8> &magic)
{
    write_raw(magic.data(), magic.size());
}

void BinaryWriter::write_u32(std::uint32_t v)
{
    v = to_little(v);
    write_raw(&v, sizeof v);
}

void BinaryWriter::write_u64(std::uint64_t v)
{
    v = to_little(v);
    write_raw(&v, sizeof v);
}

void BinaryWriter::write_f64(double v)
{
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    write_u64(bits);
}

void BinaryWriter::write_complex(cdouble v)
{
    write_f64(v.real());
    write_f64(v.imag());
}

void BinaryWriter::close()
{
    out_.flush();
    if (!out_)
        throw std::runtime_error("flushing '" + path_.string() + "' failed");
    out_.close();
}

BinaryReader::BinaryReader(const std::filesystem::path &path) : in_(path, std::ios::binary), path_(path)
{
    if (!in_)
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
}

void BinaryReader::read_raw(void *data, std::size_t size)
{
    in_.read(static_cast<char *>(data), static_cast<std::streamsize>(size));
    if (!in_)
        throw std::runtime_error("'" + path_.string() + "' is truncated or unreadable");
}

void BinaryReader::expect_magic(const std::array<char, 8> &magic, const std::string &what)
{
    std::array<char, 8> got{};
    in_.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!in_ || got != magic)
        throw std::runtime_error("'" + path_.string() + "' is not a " + what + " file (bad magic)");
}

std::uint32_t BinaryReader::read_u32()
{
    std::uint32_t v;
    read_raw(&v, sizeof v);
    return to_little(v);
}

std::uint64_t BinaryReader::read_u64()
{
    std::uint64_t v;
    read_raw(&v, sizeof v);
    return to_little(v);
}

double BinaryReader::read_f64()
{
    const std::uint64_t bits = read_u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

cdouble BinaryReader::read_complex()
{
    const double re = read_f64();
    const double im = read_f64();
    return {re, im};
}

std::uint64_t BinaryReader::remaining()
{
    const auto here = in_.tellg();
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    in_.seekg(here);
    return static_cast<std::uint64_t>(end - here);
}

void BinaryReader::expect_end(const std::string &what)
{
    if (remaining() != 0)
        throw std::runtime_error("'" + path_.string() + "': trailing bytes after " + what + " payload");
}

} // namespace qcest
