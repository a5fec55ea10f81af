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

#include "qcest/dataset_io.hpp"

#include "qcest/binary_io.hpp"
#include "qcest/parallel.hpp"

#include <stdexcept>

namespace qcest
{

namespace
{

constexpr std::array<char, 8> kDatasetMagic = {'Q', 'C', 'E', 'S', 'T', 'C', 'H', 'D'};
constexpr std::uint32_t kDatasetVersion = 1;
constexpr std::uint32_t kFlagGenie = 1u << 0;
constexpr std::uint32_t kFlagObservations = 1u << 1;
constexpr std::uint64_t kMaxDimension = 1u << 16;
constexpr std::uint64_t kMaxSamples = std::uint64_t(1) << 32;

} // namespace

ObservationBatch observe_dataset(const ChannelDataset &dataset, const PilotSystem &system, std::uint64_t seed)
{
    if (dataset.n_antennas() != system.n_antennas())
        throw std::invalid_argument("observe_dataset: antenna count mismatch");
    ObservationBatch batch{system.pilots(), system.noise_var(), CMatrix(dataset.size(), system.observation_size())};
    parallel_for(static_cast<std::size_t>(dataset.size()), [&](std::size_t t) {
        Rng rng = make_stream(seed, {t});
        const auto ti = static_cast<Eigen::Index>(t);
        batch.observations.row(ti) = observe(system, dataset.channel(ti), rng).r.transpose();
    });
    return batch;
}

void save_dataset(const ChannelDataset &dataset, const std::filesystem::path &path, const ObservationBatch *obs)
{
    const Eigen::Index t_count = dataset.size();
    const Eigen::Index n = dataset.n_antennas();
    if (obs && obs->observations.rows() != t_count)
        throw std::invalid_argument("save_dataset: observation count differs from sample count");

    BinaryWriter w(path);
    w.write_magic(kDatasetMagic);
    w.write_u32(kDatasetVersion);
    w.write_u32((dataset.has_genie() ? kFlagGenie : 0u) | (obs ? kFlagObservations : 0u));
    w.write_u64(static_cast<std::uint64_t>(n));
    w.write_u64(static_cast<std::uint64_t>(t_count));
    w.write_u64(static_cast<std::uint64_t>(dataset.n_clusters));
    w.write_u64(dataset.seed);

    for (Eigen::Index t = 0; t < t_count; ++t)
        for (Eigen::Index i = 0; i < n; ++i)
            w.write_complex(dataset.samples(t, i));

    if (dataset.has_genie())
    {
        for (Eigen::Index t = 0; t < t_count; ++t)
        {
            const ClusterParams &p = dataset.cluster_params.at(static_cast<std::size_t>(t));
            if (p.angles.size() != static_cast<std::size_t>(dataset.n_clusters))
                throw std::invalid_argument("save_dataset: cluster count mismatch in genie data");
            for (double a : p.angles)
                w.write_f64(a);
            for (double g : p.gains)
                w.write_f64(g);
            w.write_f64(p.angle_spread);
            const CMatrix &c = dataset.genie_covariance(t);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i)
                    w.write_complex(c(i, j));
        }
    }

    if (obs)
    {
        w.write_u64(static_cast<std::uint64_t>(obs->pilots.size()));
        w.write_f64(obs->noise_var);
        for (Eigen::Index p = 0; p < obs->pilots.size(); ++p)
            w.write_complex(obs->pilots[p]);
        if (obs->observations.cols() != n * obs->pilots.size())
            throw std::invalid_argument("save_dataset: observation length must be N * P");
        for (Eigen::Index t = 0; t < t_count; ++t)
            for (Eigen::Index i = 0; i < obs->observations.cols(); ++i)
                w.write_complex(obs->observations(t, i));
    }
    w.close();
}

DatasetFile load_dataset_file(const std::filesystem::path &path)
{
    BinaryReader r(path);
    r.expect_magic(kDatasetMagic, "channel dataset");
    const std::uint32_t version = r.read_u32();
    if (version != kDatasetVersion)
        throw std::runtime_error("dataset file version " + std::to_string(version) + " is not supported");
    const std::uint32_t flags = r.read_u32();
    if (flags & ~(kFlagGenie | kFlagObservations))
        throw std::runtime_error("dataset file: unknown flags");
    const std::uint64_t n = r.read_u64();
    const std::uint64_t t_count = r.read_u64();
    const std::uint64_t clusters = r.read_u64();
    const std::uint64_t seed = r.read_u64();
    if (n == 0 || n > kMaxDimension || t_count == 0 || t_count > kMaxSamples || clusters == 0 ||
        clusters > kMaxDimension)
        throw std::runtime_error("dataset file: implausible header");

    std::uint64_t body = 16 * t_count * n;
    if (flags & kFlagGenie)
        body += t_count * (8 * (2 * clusters + 1) + 16 * n * n);
    if (r.remaining() < body)
        throw std::runtime_error("dataset file: truncated payload");

    DatasetFile file;
    ChannelDataset &d = file.dataset;
    d.seed = seed;
    d.n_clusters = static_cast<int>(clusters);
    const auto ti = static_cast<Eigen::Index>(t_count);
    const auto ni = static_cast<Eigen::Index>(n);
    d.samples.resize(ti, ni);
    for (Eigen::Index t = 0; t < ti; ++t)
        for (Eigen::Index i = 0; i < ni; ++i)
            d.samples(t, i) = r.read_complex();

    if (flags & kFlagGenie)
    {
        d.cluster_params.resize(t_count);
        d.covariances.resize(t_count);
        for (std::uint64_t t = 0; t < t_count; ++t)
        {
            ClusterParams &p = d.cluster_params[t];
            p.angles.resize(clusters);
            p.gains.resize(clusters);
            for (auto &a : p.angles)
                a = r.read_f64();
            for (auto &g : p.gains)
                g = r.read_f64();
            p.angle_spread = r.read_f64();
            CMatrix c(ni, ni);
            for (Eigen::Index j = 0; j < ni; ++j)
                for (Eigen::Index i = 0; i < ni; ++i)
                    c(i, j) = r.read_complex();
            d.covariances[t] = std::move(c);
        }
    }

    if (flags & kFlagObservations)
    {
        const std::uint64_t p_count = r.read_u64();
        if (p_count == 0 || p_count > kMaxDimension)
            throw std::runtime_error("dataset file: implausible pilot count");
        ObservationBatch batch;
        batch.noise_var = r.read_f64();
        batch.pilots.resize(static_cast<Eigen::Index>(p_count));
        for (Eigen::Index p = 0; p < batch.pilots.size(); ++p)
            batch.pilots[p] = r.read_complex();
        if (r.remaining() != 16 * t_count * n * p_count)
            throw std::runtime_error("dataset file: observation block size mismatch");
        batch.observations.resize(ti, ni * static_cast<Eigen::Index>(p_count));
        for (Eigen::Index t = 0; t < ti; ++t)
            for (Eigen::Index i = 0; i < batch.observations.cols(); ++i)
                batch.observations(t, i) = r.read_complex();
        file.observations = std::move(batch);
    }
    r.expect_end("dataset");
    return file;
}

} // namespace qcest
