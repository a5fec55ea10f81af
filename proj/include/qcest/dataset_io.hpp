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

#ifndef QCEST_DATASET_IO_HPP
#define QCEST_DATASET_IO_HPP

#include "qcest/channel_model.hpp"
#include "qcest/signal_model.hpp"

#include <filesystem>
#include <optional>

namespace qcest
{

/// Quantized observations of every channel in a dataset under one pilot
/// system; row t is r_t (length N P).
struct ObservationBatch
{
    CVector pilots;
    double noise_var = 1.0;
    CMatrix observations;

    PilotSystem system(int n_antennas) const { return PilotSystem(pilots, n_antennas, noise_var); }
};

/// Observes every channel of `dataset`; channel t uses the noise stream
/// derived from (seed, t).
ObservationBatch observe_dataset(const ChannelDataset &dataset, const PilotSystem &system, std::uint64_t seed);

/// Dataset container, little-endian, layout in docs/file-formats.md.
void save_dataset(const ChannelDataset &dataset, const std::filesystem::path &path,
                  const ObservationBatch *observations = nullptr);

struct DatasetFile
{
    ChannelDataset dataset;
    std::optional<ObservationBatch> observations;
};

DatasetFile load_dataset_file(const std::filesystem::path &path);

inline ChannelDataset load_dataset(const std::filesystem::path &path)
{
    return load_dataset_file(path).dataset;
}

} // namespace qcest

#endif
