/**
 * Copyright 2026 The snnforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "snnforge/tensor.hpp"

namespace snnforge {

inline constexpr int kSensorSize = 128;  // DVS128 resolution
inline constexpr int kGestureClasses = 11;

/// One camera event: time since recording start, pixel, brightness-change sign.
struct DvsEvent {
    uint32_t t_us = 0;
    uint16_t x = 0, y = 0;
    int8_t polarity = 1;  // +1 or -1

    bool operator==(const DvsEvent&) const = default;
};

struct EventStream {
    std::vector<DvsEvent> events;  // sorted by t_us
    int label = -1;                // gesture class, 0..10
    int subject = -1, trial = -1, lighting = -1;

    // duration convention: recordings start at t = 0
    int64_t duration_us() const { return events.empty() ? 0 : static_cast<int64_t>(events.back().t_us) + 1; }
};

enum class AccumulationMode { TimeBased, Quantitative };
enum class PolarityPolicy { TwoChannel, SignedSingle, UnsignedSingle };

const char* to_string(AccumulationMode m);
const char* to_string(PolarityPolicy p);
AccumulationMode accumulation_mode_from_string(const std::string& s);
PolarityPolicy polarity_policy_from_string(const std::string& s);

/**
 * Frame accumulation settings. A frame covers `window` (ms, or events in
 * quantitative mode), split into `channels` consecutive sub-windows;
 * sub-window length is floor(window/channels) with the remainder on the
 * last channel. Consecutive frames start window/overlap_factor apart.
 */
struct AccumulationConfig {
    AccumulationMode mode = AccumulationMode::TimeBased;
    int64_t window_ms = 300;
    int64_t window_events = 2000;
    int channels = 3;
    int overlap_factor = 2;  // 1 or 2
    PolarityPolicy polarity = PolarityPolicy::UnsignedSingle;
    int frame_size = 32;  // 16, 32 or 64; sensor is pooled down by 128/frame_size

    /// channels in the raw frame tensor (doubled for two-channel polarity)
    int total_channels() const {
        return polarity == PolarityPolicy::TwoChannel ? 2 * channels : channels;
    }
};

void validate_accumulation_config(const AccumulationConfig& config);

/// Number of frames a recording of `duration` yields (time-based mode).
int64_t frame_count(int64_t duration_us, const AccumulationConfig& config);

/// Channel receiving an event at `offset_us` within its window.
int channel_of_offset(int64_t offset_us, const AccumulationConfig& config);

struct ReadReport {
    int64_t rejected = 0;   // out-of-range coordinates or polarity
    bool was_unsorted = false;
};

// Event files: CSV rows "t_us,x,y,polarity" or packed 12-byte binary
// records (u32 t_us, u16 x, u16 y, i8 polarity, u8 pad), little-endian.
EventStream read_events_csv(const std::filesystem::path& path, ReadReport* report = nullptr);
EventStream read_events_bin(const std::filesystem::path& path, ReadReport* report = nullptr);
void write_events_csv(const EventStream& stream, const std::filesystem::path& path);
void write_events_bin(const EventStream& stream, const std::filesystem::path& path);

/**
 * Slices a recording into raw count frames of 128 x 128 x total_channels.
 * Pixel semantics per polarity policy: two_channel counts up from 0 in a
 * sign-specific channel, signed_single starts at 128 and moves +-1 per
 * event, unsigned_single counts every event from 0. Streams shorter than
 * one window yield no frames.
 */
std::vector<Tensor> accumulate(const EventStream& stream, const AccumulationConfig& config);

/**
 * Average-pools a raw frame down to frame_size and normalizes to [0, 1]:
 * per-frame max for the counting policies (an empty frame stays zero),
 * clamp to [0, 255] then divide by 255 for signed_single.
 */
Tensor downsample_normalize(const Tensor& raw, const AccumulationConfig& config);

struct FrameDataset {
    Shape frame_shape;
    std::vector<Tensor> frames;
    std::vector<int> labels;
    std::vector<int> recording_ids;
    std::string split;  // "train" or "test"
};

struct DatasetPair {
    FrameDataset train, test;
    std::vector<std::string> warnings;
    int64_t rejected_events = 0;
};

/**
 * Runs the full pipeline over a set of recordings. The split is decided
 * per recording (never per frame, so overlapping frames cannot leak
 * across the split). Frame order is (recording index, frame index).
 */
DatasetPair build_dataset(const std::vector<EventStream>& recordings,
                          const std::vector<uint8_t>& test_mask, const AccumulationConfig& config);

// Frame container: "DVSF" magic, u32 version, u32 frame count, u16 h/w/c,
// u16 pad, then float32 frames; labels ride in a sidecar CSV.
void save_frames(const FrameDataset& dataset, const std::filesystem::path& frames_path);
FrameDataset load_frames(const std::filesystem::path& frames_path);

}  // namespace snnforge
