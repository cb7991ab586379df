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
#include "snnforge/dvs.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>

#include "snnforge/common.hpp"

namespace snnforge {

namespace fs = std::filesystem;

namespace {

constexpr char kFrameMagic[4] = {'D', 'V', 'S', 'F'};
constexpr uint32_t kFrameVersion = 1;

bool valid_event(int64_t t, int64_t x, int64_t y, int64_t pol) {
    return t >= 0 && t <= UINT32_MAX && x >= 0 && x < kSensorSize && y >= 0 && y < kSensorSize &&
           (pol == 1 || pol == -1);
}

void finish_stream(EventStream& s, ReadReport* report) {
    if (!std::is_sorted(s.events.begin(), s.events.end(),
                        [](const DvsEvent& a, const DvsEvent& b) { return a.t_us < b.t_us; })) {
        std::stable_sort(s.events.begin(), s.events.end(),
                         [](const DvsEvent& a, const DvsEvent& b) { return a.t_us < b.t_us; });
        if (report) report->was_unsorted = true;
    }
}

}  // namespace

const char* to_string(AccumulationMode m) {
    return m == AccumulationMode::TimeBased ? "time_based" : "quantitative";
}

const char* to_string(PolarityPolicy p) {
    switch (p) {
        case PolarityPolicy::TwoChannel: return "two_channel";
        case PolarityPolicy::SignedSingle: return "signed_single";
        case PolarityPolicy::UnsignedSingle: return "unsigned_single";
    }
    return "?";
}

AccumulationMode accumulation_mode_from_string(const std::string& s) {
    if (s == "time_based") return AccumulationMode::TimeBased;
    if (s == "quantitative") return AccumulationMode::Quantitative;
    throw InputError("unknown accumulation mode '" + s + "'");
}

PolarityPolicy polarity_policy_from_string(const std::string& s) {
    if (s == "two_channel" || s == "split") return PolarityPolicy::TwoChannel;
    if (s == "signed_single" || s == "signed") return PolarityPolicy::SignedSingle;
    if (s == "unsigned_single" || s == "discard") return PolarityPolicy::UnsignedSingle;
    throw InputError("unknown polarity policy '" + s + "'");
}

void validate_accumulation_config(const AccumulationConfig& config) {
    if (config.channels < 1) throw InputError("channels must be at least 1");
    if (config.overlap_factor != 1 && config.overlap_factor != 2)
        throw InputError("overlap factor must be 1 or 2");
    if (config.frame_size != 16 && config.frame_size != 32 && config.frame_size != 64)
        throw InputError("frame size must be 16, 32 or 64 (" + std::to_string(config.frame_size) +
                         " does not divide " + std::to_string(kSensorSize) + " evenly)");
    if (config.mode == AccumulationMode::TimeBased) {
        if (config.window_ms < 1) throw InputError("window must be at least 1 ms");
        if (config.window_ms < config.channels)
            throw InputError("window shorter than one ms per channel");
    } else {
        if (config.window_events < config.channels)
            throw InputError("event window smaller than the channel count");
    }
}

int64_t frame_count(int64_t duration_us, const AccumulationConfig& config) {
    const int64_t window = config.window_ms * 1000;
    const int64_t stride = window / config.overlap_factor;
    if (duration_us < window) return 0;
    return (duration_us - window) / stride + 1;
}

int channel_of_offset(int64_t offset_us, const AccumulationConfig& config) {
    // sub-window length floors to whole ms; the remainder widens the last
    // channel (235 ms / 3 -> 78, 78, 79)
    const int64_t sub_us = (config.window_ms / config.channels) * 1000;
    return static_cast<int>(std::min<int64_t>(offset_us / sub_us, config.channels - 1));
}

EventStream read_events_csv(const fs::path& path, ReadReport* report) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");

    EventStream stream;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.find_first_not_of("0123456789,-+ \r") != std::string::npos)
            continue;  // header row

        std::array<int64_t, 4> fields{};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        bool ok = true;
        for (int f = 0; f < 4 && ok; ++f) {
            while (p < end && *p == ' ') ++p;
            auto [next, ec] = std::from_chars(p, end, fields[static_cast<size_t>(f)]);
            ok = ec == std::errc();
            p = next;
            if (f < 3) {
                ok = ok && p < end && *p == ',';
                ++p;
            }
        }
        if (!ok) throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed event row");
        if (!valid_event(fields[0], fields[1], fields[2], fields[3])) {
            if (report) ++report->rejected;
            continue;
        }
        stream.events.push_back({static_cast<uint32_t>(fields[0]), static_cast<uint16_t>(fields[1]),
                                 static_cast<uint16_t>(fields[2]), static_cast<int8_t>(fields[3])});
    }
    finish_stream(stream, report);
    return stream;
}

EventStream read_events_bin(const fs::path& path, ReadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<size_t>(in.tellg());
    in.seekg(0);
    if (bytes % 12 != 0)
        throw InputError("'" + path.string() + "' is not a whole number of 12-byte event records");

    EventStream stream;
    stream.events.reserve(bytes / 12);
    std::array<char, 12> rec{};
    while (in.read(rec.data(), 12)) {
        uint32_t t;
        uint16_t x, y;
        int8_t pol;
        std::memcpy(&t, rec.data(), 4);
        std::memcpy(&x, rec.data() + 4, 2);
        std::memcpy(&y, rec.data() + 6, 2);
        std::memcpy(&pol, rec.data() + 8, 1);
        if (!valid_event(t, x, y, pol)) {
            if (report) ++report->rejected;
            continue;
        }
        stream.events.push_back({t, x, y, pol});
    }
    finish_stream(stream, report);
    return stream;
}

void write_events_csv(const EventStream& stream, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << "t_us,x,y,polarity\n";
    for (const DvsEvent& e : stream.events)
        out << e.t_us << ',' << e.x << ',' << e.y << ',' << static_cast<int>(e.polarity) << '\n';
}

void write_events_bin(const EventStream& stream, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    for (const DvsEvent& e : stream.events) {
        std::array<char, 12> rec{};
        std::memcpy(rec.data(), &e.t_us, 4);
        std::memcpy(rec.data() + 4, &e.x, 2);
        std::memcpy(rec.data() + 6, &e.y, 2);
        std::memcpy(rec.data() + 8, &e.polarity, 1);
        out.write(rec.data(), 12);
    }
}

namespace {

void deposit(Tensor& frame, const DvsEvent& e, int time_channel, PolarityPolicy policy) {
    switch (policy) {
        case PolarityPolicy::TwoChannel: {
            int ch = time_channel * 2 + (e.polarity > 0 ? 0 : 1);
            frame.at(e.y, e.x, ch) += 1.0f;
            break;
        }
        case PolarityPolicy::SignedSingle:
            frame.at(e.y, e.x, time_channel) += e.polarity > 0 ? 1.0f : -1.0f;
            break;
        case PolarityPolicy::UnsignedSingle:
            frame.at(e.y, e.x, time_channel) += 1.0f;
            break;
    }
}

std::vector<Tensor> accumulate_time_based(const EventStream& stream, const AccumulationConfig& config) {
    const int64_t window = config.window_ms * 1000;
    const int64_t stride = window / config.overlap_factor;
    const int64_t n_frames = frame_count(stream.duration_us(), config);
    const float init = config.polarity == PolarityPolicy::SignedSingle ? 128.0f : 0.0f;

    std::vector<Tensor> frames;
    frames.reserve(static_cast<size_t>(n_frames));
    size_t window_begin = 0;  // index of the first event with t >= frame start
    for (int64_t k = 0; k < n_frames; ++k) {
        const int64_t start = k * stride;
        while (window_begin < stream.events.size() && stream.events[window_begin].t_us < start)
            ++window_begin;

        Tensor frame(Shape({kSensorSize, kSensorSize, config.total_channels()}));
        if (init != 0.0f) std::fill(frame.data.begin(), frame.data.end(), init);
        for (size_t i = window_begin; i < stream.events.size(); ++i) {
            const DvsEvent& e = stream.events[i];
            const int64_t offset = static_cast<int64_t>(e.t_us) - start;
            if (offset >= window) break;
            deposit(frame, e, channel_of_offset(offset, config), config.polarity);
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

std::vector<Tensor> accumulate_quantitative(const EventStream& stream, const AccumulationConfig& config) {
    const int64_t window = config.window_events;
    const int64_t stride = std::max<int64_t>(1, window / config.overlap_factor);
    const int64_t n_events = static_cast<int64_t>(stream.events.size());
    const int64_t n_frames = n_events < window ? 0 : (n_events - window) / stride + 1;
    const int64_t sub = window / config.channels;  // remainder goes to the last channel
    const float init = config.polarity == PolarityPolicy::SignedSingle ? 128.0f : 0.0f;

    std::vector<Tensor> frames;
    frames.reserve(static_cast<size_t>(n_frames));
    for (int64_t k = 0; k < n_frames; ++k) {
        Tensor frame(Shape({kSensorSize, kSensorSize, config.total_channels()}));
        if (init != 0.0f) std::fill(frame.data.begin(), frame.data.end(), init);
        for (int64_t i = 0; i < window; ++i) {
            const int ch = static_cast<int>(std::min(i / sub, static_cast<int64_t>(config.channels) - 1));
            deposit(frame, stream.events[static_cast<size_t>(k * stride + i)], ch, config.polarity);
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace

std::vector<Tensor> accumulate(const EventStream& stream, const AccumulationConfig& config) {
    validate_accumulation_config(config);
    return config.mode == AccumulationMode::TimeBased ? accumulate_time_based(stream, config)
                                                      : accumulate_quantitative(stream, config);
}

Tensor downsample_normalize(const Tensor& raw, const AccumulationConfig& config) {
    if (raw.shape.rank() != 3 || raw.shape.dim(0) != kSensorSize || raw.shape.dim(1) != kSensorSize)
        throw InputError("raw frame must be " + std::to_string(kSensorSize) + "x" +
                         std::to_string(kSensorSize));
    if (kSensorSize % config.frame_size != 0)
        throw InputError("frame size " + std::to_string(config.frame_size) + " does not divide " +
                         std::to_string(kSensorSize));

    const int k = kSensorSize / config.frame_size;
    const int c = raw.shape.dim(2);
    Tensor out(Shape({config.frame_size, config.frame_size, c}));
    for (int oy = 0; oy < config.frame_size; ++oy) {
        for (int ox = 0; ox < config.frame_size; ++ox) {
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx) acc += raw.at(oy * k + dy, ox * k + dx, ch);
                out.at(oy, ox, ch) = static_cast<float>(acc / (k * k));
            }
        }
    }

    if (config.polarity == PolarityPolicy::SignedSingle) {
        for (float& v : out.data) v = std::clamp(v, 0.0f, 255.0f) / 255.0f;
    } else {
        float peak = *std::max_element(out.data.begin(), out.data.end());
        if (peak > 0.0f) {
            for (float& v : out.data) v /= peak;
        }
    }
    return out;
}

DatasetPair build_dataset(const std::vector<EventStream>& recordings,
                          const std::vector<uint8_t>& test_mask, const AccumulationConfig& config) {
    validate_accumulation_config(config);
    if (test_mask.size() != recordings.size())
        throw InputError("test mask size does not match the recording count");

    DatasetPair out;
    const Shape frame_shape({config.frame_size, config.frame_size, config.total_channels()});
    out.train.frame_shape = out.test.frame_shape = frame_shape;
    out.train.split = "train";
    out.test.split = "test";

    for (size_t r = 0; r < recordings.size(); ++r) {
        FrameDataset& target = test_mask[r] ? out.test : out.train;
        for (Tensor& raw : accumulate(recordings[r], config)) {
            target.frames.push_back(downsample_normalize(raw, config));
            target.labels.push_back(recordings[r].label);
            target.recording_ids.push_back(static_cast<int>(r));
        }
    }

    std::set<int> train_classes(out.train.labels.begin(), out.train.labels.end());
    std::set<int> test_classes(out.test.labels.begin(), out.test.labels.end());
    for (int cls : train_classes) {
        if (!test_classes.count(cls))
            out.warnings.push_back("class " + std::to_string(cls) + " absent from the test split");
    }
    return out;
}

void save_frames(const FrameDataset& dataset, const fs::path& frames_path) {
    std::ofstream out(frames_path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + frames_path.string() + "'");
    const Shape& s = dataset.frame_shape;
    const uint32_t count = static_cast<uint32_t>(dataset.frames.size());
    const uint16_t h = static_cast<uint16_t>(s.dim(0)), w = static_cast<uint16_t>(s.dim(1)),
                   c = static_cast<uint16_t>(s.dim(2)), pad = 0;
    out.write(kFrameMagic, 4);
    out.write(reinterpret_cast<const char*>(&kFrameVersion), 4);
    out.write(reinterpret_cast<const char*>(&count), 4);
    out.write(reinterpret_cast<const char*>(&h), 2);
    out.write(reinterpret_cast<const char*>(&w), 2);
    out.write(reinterpret_cast<const char*>(&c), 2);
    out.write(reinterpret_cast<const char*>(&pad), 2);
    for (const Tensor& f : dataset.frames) {
        if (f.shape != s) throw InputError("frame shape mismatch in dataset");
        out.write(reinterpret_cast<const char*>(f.data.data()),
                  static_cast<std::streamsize>(f.data.size() * sizeof(float)));
    }
    if (!out) throw InputError("write failed for '" + frames_path.string() + "'");

    fs::path labels_path = frames_path;
    labels_path.replace_extension(".labels.csv");
    std::ofstream lab(labels_path, std::ios::trunc);
    if (!lab) throw InputError("cannot write '" + labels_path.string() + "'");
    lab << "index,label,recording\n";
    for (size_t i = 0; i < dataset.frames.size(); ++i) {
        int rec = i < dataset.recording_ids.size() ? dataset.recording_ids[i] : -1;
        lab << i << ',' << dataset.labels[i] << ',' << rec << '\n';
    }
}

FrameDataset load_frames(const fs::path& frames_path) {
    std::ifstream in(frames_path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + frames_path.string() + "'");
    char magic[4];
    uint32_t version = 0, count = 0;
    uint16_t h = 0, w = 0, c = 0, pad = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&count), 4);
    in.read(reinterpret_cast<char*>(&h), 2);
    in.read(reinterpret_cast<char*>(&w), 2);
    in.read(reinterpret_cast<char*>(&c), 2);
    in.read(reinterpret_cast<char*>(&pad), 2);
    if (!in || std::memcmp(magic, kFrameMagic, 4) != 0)
        throw InputError("'" + frames_path.string() + "' is not a frame container");
    if (version != kFrameVersion)
        throw InputError("unsupported frame container version " + std::to_string(version));

    FrameDataset dataset;
    dataset.frame_shape = Shape({h, w, c});
    dataset.frames.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        Tensor f(dataset.frame_shape);
        in.read(reinterpret_cast<char*>(f.data.data()),
                static_cast<std::streamsize>(f.data.size() * sizeof(float)));
        if (!in) throw InputError("truncated frame container '" + frames_path.string() + "'");
        dataset.frames.push_back(std::move(f));
    }

    fs::path labels_path = frames_path;
    labels_path.replace_extension(".labels.csv");
    std::ifstream lab(labels_path);
    if (!lab) throw InputError("cannot open '" + labels_path.string() + "'");
    std::string line;
    std::getline(lab, line);  // header
    while (std::getline(lab, line)) {
        if (line.empty()) continue;
        int64_t idx = 0, label = 0, rec = 0;
        if (std::sscanf(line.c_str(), "%ld,%ld,%ld", &idx, &label, &rec) != 3)
            throw InputError("malformed label row '" + line + "'");
        dataset.labels.push_back(static_cast<int>(label));
        dataset.recording_ids.push_back(static_cast<int>(rec));
    }
    if (dataset.labels.size() != dataset.frames.size())
        throw InputError("label count does not match frame count in '" + frames_path.string() + "'");
    return dataset;
}

}  // namespace snnforge
