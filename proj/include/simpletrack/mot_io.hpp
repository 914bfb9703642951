// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

// Readers and writers for the on-disk formats.
//
//   results     frame,id,x,y,w,h,score,-1,-1,-1          (MOTChallenge submission)
//   detections  "#dim=D" header, then frame,x,y,w,h,score,e1,...,eD
//               (an optional "#frames=N" header fixes the sequence length)
//   gt          frame,id,x,y,w,h,conf,class,visibility
//   grid        binary, little-endian; per frame
//               [frame u32][H u32][W u32][D u32][stride u32] + H*W*D f32,
//               row-major, channel-last
//
// Text output goes through std::to_chars, so it is locale independent and
// byte-stable.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "simpletrack/error.hpp"
#include "simpletrack/geometry.hpp"
#include "simpletrack/tracker.hpp"

namespace simpletrack {

struct ResultRecord {
    std::int64_t frame = 1;
    std::int64_t id = 0;
    BoundingBox box;
    double score = 1.0;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

struct GtRecord {
    std::int64_t frame = 1;
    std::int64_t id = 0;
    BoundingBox box;
    int conf = 1;  // 0 marks an entry to be ignored
    int cls = 1;
    double visibility = 1.0;

    friend bool operator==(const GtRecord&, const GtRecord&) = default;
};

struct GroundTruth {
    std::vector<GtRecord> records;
};

/// Which ground-truth rows take part in evaluation.
struct GtFilter {
    bool drop_ignored = true;         // rows whose conf flag is 0
    std::vector<int> keep_classes;    // empty keeps every class
    double min_visibility = 0.0;      // rows strictly below are dropped
};

/// A detection file: embedding dimension plus one FrameInput per frame,
/// including empty frames, in ascending frame order starting at 1.
struct DetectionSequence {
    std::size_t dim = 0;
    std::vector<FrameInput> frames;
};

/// Decimal places of box coordinates in results and ground-truth files.
inline constexpr int kBoxDecimals = 2;
/// Decimal places of scores in results files.
inline constexpr int kScoreDecimals = 6;
/// Significant digits of every float in detection files.
inline constexpr int kDetectionDigits = 6;

namespace io_detail {

inline void append_fixed(std::string& out, double v, int decimals) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
    // "-0.00" reads back as 0; keep the text canonical.
    std::string_view text(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
    if (text.starts_with('-') && text.find_first_not_of("-0.") == std::string_view::npos) text.remove_prefix(1);
    out.append(text);
}

inline void append_general(std::string& out, double v, int digits) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, digits);
    out.append(buf.data(), res.ptr);
}

inline void append_int(std::string& out, std::int64_t v) {
    std::array<char, 24> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

class LineParser {
public:
    LineParser(std::string path, std::size_t line) : path_(std::move(path)), line_(line) {}

    double real(std::string_view s, const char* what) const {
        double v = 0.0;
        const auto* end = s.data() + s.size();
        auto res = std::from_chars(s.data(), end, v);
        if (res.ec != std::errc() || res.ptr != end) {
            // from_chars does not accept a leading '+'
            if (!s.empty() && s.front() == '+') return real(s.substr(1), what);
            if (s == "inf" || s == "-inf" || s == "nan") {
                fail(std::string("non-finite ") + what + " '" + std::string(s) + "'");
            }
            fail(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
        }
        if (!std::isfinite(v)) fail(std::string("non-finite ") + what);
        return v;
    }

    std::int64_t integer(std::string_view s, const char* what) const {
        std::int64_t v = 0;
        const auto* end = s.data() + s.size();
        auto res = std::from_chars(s.data(), end, v);
        if (res.ec == std::errc() && res.ptr == end) return v;
        // Some tools write integral columns as floats ("1.000000").
        const double d = real(s, what);
        if (d != std::floor(d) || std::fabs(d) > 9.0e15) fail(std::string(what) + " is not an integer");
        return static_cast<std::int64_t>(d);
    }

    [[noreturn]] void fail(const std::string& what) const { throw FormatError(path_, line_, what); }

private:
    std::string path_;
    std::size_t line_;
};

inline std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw FormatError(path.string(), 0, "cannot open file");
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xFFu), static_cast<char>((v >> 8) & 0xFFu),
                                static_cast<char>((v >> 16) & 0xFFu), static_cast<char>((v >> 24) & 0xFFu)};
    os.write(b.data(), 4);
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > 0xFFFFFFFFull) throw Error(std::string("grid ") + what + " does not fit in u32");
    return static_cast<std::uint32_t>(v);
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Results

inline std::string format_result(const ResultRecord& r) {
    using namespace io_detail;
    std::string line;
    append_int(line, r.frame);
    line += ',';
    append_int(line, r.id);
    for (double v : {r.box.x, r.box.y, r.box.w, r.box.h}) {
        line += ',';
        append_fixed(line, v, kBoxDecimals);
    }
    line += ',';
    append_fixed(line, r.score, kScoreDecimals);
    line += ",-1,-1,-1";
    return line;
}

inline void write_results(std::ostream& os, std::span<const ResultRecord> records) {
    for (const auto& r : records) os << format_result(r) << '\n';
}

inline void write_results(const std::filesystem::path& path, std::span<const ResultRecord> records) {
    auto out = io_detail::open_output(path);
    write_results(out, records);
    if (!out) throw Error("failed writing " + path.string());
}

inline std::vector<ResultRecord> read_results(std::istream& in, const std::string& name = "<results>") {
    std::vector<ResultRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = io_detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        const io_detail::LineParser p(name, lineno);
        const auto f = io_detail::split_csv(text);
        if (f.size() < 7) p.fail("expected at least 7 fields, got " + std::to_string(f.size()));
        ResultRecord r;
        r.frame = p.integer(f[0], "frame");
        r.id = p.integer(f[1], "id");
        r.box = {p.real(f[2], "x"), p.real(f[3], "y"), p.real(f[4], "w"), p.real(f[5], "h")};
        r.score = p.real(f[6], "score");
        if (r.frame < 1) p.fail("frame must be >= 1");
        if (!r.box.is_valid()) p.fail("box width and height must be positive");
        out.push_back(r);
    }
    return out;
}

inline std::vector<ResultRecord> read_results(const std::filesystem::path& path) {
    auto in = io_detail::open_input(path);
    return read_results(in, path.string());
}

// ---------------------------------------------------------------------------
// Detections with embeddings

inline std::string format_detection(std::int64_t frame, const Detection& d) {
    using namespace io_detail;
    std::string line;
    append_int(line, frame);
    for (double v : {d.box.x, d.box.y, d.box.w, d.box.h, d.score}) {
        line += ',';
        append_general(line, v, kDetectionDigits);
    }
    for (double v : d.embedding.values()) {
        line += ',';
        append_general(line, v, kDetectionDigits);
    }
    return line;
}

/// Frames must be in ascending order; every embedding must have `dim` entries.
inline void write_detections(std::ostream& os, std::span<const FrameInput> frames, std::size_t dim,
                             std::optional<std::int64_t> num_frames = std::nullopt) {
    os << "#dim=" << dim << '\n';
    if (num_frames) os << "#frames=" << *num_frames << '\n';
    for (const auto& f : frames) {
        for (const auto& d : f.detections) {
            if (d.embedding.dim() != dim) {
                throw DimensionMismatchError("frame " + std::to_string(f.frame) + ": embedding dim " +
                                             std::to_string(d.embedding.dim()) + " != " + std::to_string(dim));
            }
            os << format_detection(f.frame, d) << '\n';
        }
    }
}

inline void write_detections(const std::filesystem::path& path, std::span<const FrameInput> frames, std::size_t dim,
                             std::optional<std::int64_t> num_frames = std::nullopt) {
    auto out = io_detail::open_output(path);
    write_detections(out, frames, dim, num_frames);
    if (!out) throw Error("failed writing " + path.string());
}

inline DetectionSequence read_detections(std::istream& in, const std::string& name = "<detections>") {
    DetectionSequence seq;
    std::optional<std::size_t> dim;
    std::int64_t declared_frames = 0;
    std::map<std::int64_t, std::vector<Detection>> by_frame;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = io_detail::trim(line);
        if (text.empty()) continue;
        const io_detail::LineParser p(name, lineno);
        if (text.front() == '#' || text.starts_with("dim=") || text.starts_with("frames=")) {
            auto body = text.front() == '#' ? io_detail::trim(text.substr(1)) : text;
            if (body.starts_with("dim=")) {
                if (dim) p.fail("duplicate dim header");
                const auto v = p.integer(io_detail::trim(body.substr(4)), "dim");
                if (v < 0) p.fail("dim must be non-negative");
                dim = static_cast<std::size_t>(v);
            } else if (body.starts_with("frames=")) {
                declared_frames = p.integer(io_detail::trim(body.substr(7)), "frames");
                if (declared_frames < 0) p.fail("frames must be non-negative");
            }
            continue;
        }
        if (!dim) p.fail("detection line before the '#dim=D' header");
        const auto f = io_detail::split_csv(text);
        if (f.size() != 6 + *dim) {
            p.fail("expected " + std::to_string(6 + *dim) + " fields for dim=" + std::to_string(*dim) + ", got " +
                   std::to_string(f.size()));
        }
        const auto frame = p.integer(f[0], "frame");
        if (frame < 1) p.fail("frame must be >= 1");
        Detection d;
        d.box = {p.real(f[1], "x"), p.real(f[2], "y"), p.real(f[3], "w"), p.real(f[4], "h")};
        if (!d.box.is_valid()) p.fail("box width and height must be positive");
        d.score = p.real(f[5], "score");
        if (d.score < 0.0 || d.score > 1.0) p.fail("score outside [0, 1]");
        std::vector<double> e(*dim);
        for (std::size_t k = 0; k < *dim; ++k) e[k] = p.real(f[6 + k], "embedding value");
        d.embedding = Embedding(std::move(e));
        by_frame[frame].push_back(std::move(d));
    }
    if (!dim) throw FormatError(name, 0, "missing '#dim=D' header");
    seq.dim = *dim;
    const std::int64_t last = std::max(declared_frames, by_frame.empty() ? 0 : by_frame.rbegin()->first);
    seq.frames.reserve(static_cast<std::size_t>(last));
    for (std::int64_t k = 1; k <= last; ++k) {
        FrameInput fi;
        fi.frame = k;
        if (auto it = by_frame.find(k); it != by_frame.end()) fi.detections = std::move(it->second);
        seq.frames.push_back(std::move(fi));
    }
    return seq;
}

inline DetectionSequence read_detections(const std::filesystem::path& path) {
    auto in = io_detail::open_input(path);
    return read_detections(in, path.string());
}

// ---------------------------------------------------------------------------
// Ground truth

inline std::string format_ground_truth(const GtRecord& r) {
    using namespace io_detail;
    std::string line;
    append_int(line, r.frame);
    line += ',';
    append_int(line, r.id);
    for (double v : {r.box.x, r.box.y, r.box.w, r.box.h}) {
        line += ',';
        append_fixed(line, v, kBoxDecimals);
    }
    line += ',';
    append_int(line, r.conf);
    line += ',';
    append_int(line, r.cls);
    line += ',';
    append_fixed(line, r.visibility, kBoxDecimals);
    return line;
}

inline void write_ground_truth(std::ostream& os, const GroundTruth& gt) {
    for (const auto& r : gt.records) os << format_ground_truth(r) << '\n';
}

inline void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
    auto out = io_detail::open_output(path);
    write_ground_truth(out, gt);
    if (!out) throw Error("failed writing " + path.string());
}

inline bool passes(const GtFilter& filter, const GtRecord& r) {
    if (filter.drop_ignored && r.conf == 0) return false;
    if (!filter.keep_classes.empty() &&
        std::find(filter.keep_classes.begin(), filter.keep_classes.end(), r.cls) == filter.keep_classes.end()) {
        return false;
    }
    return !(r.visibility < filter.min_visibility);
}

inline GroundTruth read_ground_truth(std::istream& in, const GtFilter& filter = {},
                                     const std::string& name = "<gt>") {
    GroundTruth gt;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = io_detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        const io_detail::LineParser p(name, lineno);
        const auto f = io_detail::split_csv(text);
        if (f.size() < 6) p.fail("expected at least 6 fields, got " + std::to_string(f.size()));
        GtRecord r;
        r.frame = p.integer(f[0], "frame");
        r.id = p.integer(f[1], "id");
        r.box = {p.real(f[2], "x"), p.real(f[3], "y"), p.real(f[4], "w"), p.real(f[5], "h")};
        if (f.size() > 6) r.conf = static_cast<int>(p.integer(f[6], "conf"));
        if (f.size() > 7) r.cls = static_cast<int>(p.integer(f[7], "class"));
        if (f.size() > 8) r.visibility = p.real(f[8], "visibility");
        if (r.frame < 1) p.fail("frame must be >= 1");
        if (!r.box.is_valid()) p.fail("box width and height must be positive");
        if (passes(filter, r)) gt.records.push_back(r);
    }
    return gt;
}

inline GroundTruth read_ground_truth(const std::filesystem::path& path, const GtFilter& filter = {}) {
    auto in = io_detail::open_input(path);
    return read_ground_truth(in, filter, path.string());
}

// ---------------------------------------------------------------------------
// Embedding-grid sidecar

inline void write_grid(std::ostream& os, std::int64_t frame, const EmbeddingGrid& grid) {
    using namespace io_detail;
    if (frame < 0) throw Error("grid frame must be non-negative");
    put_u32(os, checked_u32(static_cast<std::size_t>(frame), "frame"));
    put_u32(os, checked_u32(grid.height(), "height"));
    put_u32(os, checked_u32(grid.width(), "width"));
    put_u32(os, checked_u32(grid.dim(), "dim"));
    put_u32(os, checked_u32(grid.stride(), "stride"));
    const auto values = grid.values();
    std::string buf(values.size() * 4, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(values[i]);
        buf[4 * i] = static_cast<char>(bits & 0xFFu);
        buf[4 * i + 1] = static_cast<char>((bits >> 8) & 0xFFu);
        buf[4 * i + 2] = static_cast<char>((bits >> 16) & 0xFFu);
        buf[4 * i + 3] = static_cast<char>((bits >> 24) & 0xFFu);
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

/// Sequential reader over a grid sidecar.
class GridReader {
public:
    explicit GridReader(const std::filesystem::path& path)
        : path_(path.string()), in_(io_detail::open_input(path, std::ios::in | std::ios::binary)) {}

    struct Entry {
        std::int64_t frame;
        EmbeddingGrid grid;
    };

    /// Next frame record, or nullopt at a clean end of file.
    std::optional<Entry> next() {
        auto header = read_header();
        if (!header) return std::nullopt;
        const auto [frame, h, w, d, stride] = *header;
        std::vector<float> values(static_cast<std::size_t>(h) * w * d);
        std::string buf(values.size() * 4, '\0');
        in_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in_.gcount()) != buf.size()) {
            throw FormatError(path_, 0, "truncated grid payload for frame " + std::to_string(frame));
        }
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::bit_cast<float>(io_detail::get_u32(p + 4 * i));
        ++records_;
        return Entry{frame, EmbeddingGrid(h, w, d, stride, std::move(values))};
    }

    /// Skips forward to `frame`; nullopt if the file has no such record.
    std::optional<EmbeddingGrid> seek(std::int64_t frame) {
        while (true) {
            auto header = read_header();
            if (!header) return std::nullopt;
            const auto [f, h, w, d, stride] = *header;
            const auto bytes = static_cast<std::streamoff>(static_cast<std::uint64_t>(h) * w * d * 4);
            if (f == frame) {
                in_.seekg(-20, std::ios::cur);
                auto e = next();
                return std::move(e->grid);
            }
            in_.seekg(bytes, std::ios::cur);
            if (!in_) throw FormatError(path_, 0, "truncated grid payload for frame " + std::to_string(f));
            ++records_;
        }
    }

private:
    struct Header {
        std::int64_t frame;
        std::size_t h, w, d, stride;
    };

    std::optional<Header> read_header() {
        std::array<unsigned char, 20> hdr{};
        in_.read(reinterpret_cast<char*>(hdr.data()), 20);
        const auto got = in_.gcount();
        if (got == 0) return std::nullopt;
        if (got != 20) throw FormatError(path_, 0, "truncated grid header after record " + std::to_string(records_));
        Header h{io_detail::get_u32(hdr.data()), io_detail::get_u32(hdr.data() + 4), io_detail::get_u32(hdr.data() + 8),
                 io_detail::get_u32(hdr.data() + 12), io_detail::get_u32(hdr.data() + 16)};
        if (h.stride < 1) throw FormatError(path_, 0, "grid stride must be >= 1 (frame " + std::to_string(h.frame) + ")");
        return h;
    }

    std::string path_;
    std::ifstream in_;
    std::size_t records_ = 0;
};

inline std::optional<EmbeddingGrid> read_grid(const std::filesystem::path& path, std::int64_t frame) {
    GridReader reader(path);
    return reader.seek(frame);
}

// ---------------------------------------------------------------------------
// Post-processing

/// Fills per-identity gaps of 1..max_gap missing frames with boxes linearly
/// interpolated between the two surrounding observations; the score of an
/// inserted record is the mean of the endpoint scores. Original records are
/// kept untouched. The output is stably ordered by frame, inserted records
/// after the original ones of the same frame.
inline std::vector<ResultRecord> linear_interpolation(std::span<const ResultRecord> results, std::int64_t max_gap = 20) {
    if (max_gap < 1) throw std::invalid_argument("max_gap must be >= 1");
    std::map<std::int64_t, std::vector<const ResultRecord*>> by_id;
    for (const auto& r : results) by_id[r.id].push_back(&r);

    std::vector<ResultRecord> added;
    for (auto& [id, track] : by_id) {
        std::stable_sort(track.begin(), track.end(),
                         [](const ResultRecord* a, const ResultRecord* b) { return a->frame < b->frame; });
        for (std::size_t k = 1; k < track.size(); ++k) {
            const ResultRecord& a = *track[k - 1];
            const ResultRecord& b = *track[k];
            const std::int64_t gap = b.frame - a.frame - 1;
            if (gap < 1 || gap > max_gap) continue;
            const double span = static_cast<double>(b.frame - a.frame);
            for (std::int64_t f = a.frame + 1; f < b.frame; ++f) {
                const double t = static_cast<double>(f - a.frame) / span;
                auto lerp = [t](double u, double v) { return u + (v - u) * t; };
                ResultRecord r;
                r.frame = f;
                r.id = id;
                r.box = {lerp(a.box.x, b.box.x), lerp(a.box.y, b.box.y), lerp(a.box.w, b.box.w),
                         lerp(a.box.h, b.box.h)};
                r.score = (a.score + b.score) / 2.0;
                added.push_back(r);
            }
        }
    }

    std::vector<ResultRecord> out(results.begin(), results.end());
    out.insert(out.end(), added.begin(), added.end());
    std::stable_sort(out.begin(), out.end(), [](const ResultRecord& a, const ResultRecord& b) { return a.frame < b.frame; });
    return out;
}

}  // namespace simpletrack
