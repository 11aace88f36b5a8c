#pragma once

#include "escape/engine.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

namespace escape {

/// `t,move,goal_x,goal_y` then `man{k}_x,man{k}_y` per recorded level, then
/// `lion{i}_x,lion{i}_y` per lion (1-based).
std::string csv_header(const TraceHeader& header);
/// Inverse of csv_header; level_n is the highest recorded level.
TraceHeader parse_csv_header(std::string_view line);

/// Exact-value companion of an extended-precision CSV trace.
inline std::string sidecar_path(const std::string& csv_path) { return csv_path + ".hex"; }

/// Writes one row per sample with 17 significant digits; with a sidecar
/// stream, also writes the same rows in hexadecimal floating point.
template <class Real>
class CsvTraceWriter final : public TraceSink<Real> {
public:
    explicit CsvTraceWriter(std::ostream& out, std::ostream* sidecar = nullptr);
    void begin(const TraceHeader& header) override;
    void sample(const TraceSample<Real>& s) override;
    void end() override;
    std::size_t bytes() const { return bytes_; }

private:
    void put(std::ostream& os, const std::string& line);

    std::ostream& out_;
    std::ostream* sidecar_;
    std::string line_;
    std::size_t bytes_ = 0;
};

template <class Real>
std::size_t write_trace_csv(const Trace<Real>& trace, std::ostream& out, std::ostream* sidecar = nullptr);

/// Streams rows into `sink`. With a sidecar, every value comes from its
/// exact encoding and the two files must agree row by row.
template <class Real>
TraceHeader read_trace_csv(std::istream& csv, TraceSink<Real>& sink, std::istream* sidecar = nullptr);

/// Reads a whole trace; picks up `sidecar_path(path)` when it exists.
/// Cascade and digest are left empty.
template <class Real>
Trace<Real> load_trace_csv(const std::string& path);

/// Output stream that hashes everything written to it (SHA-256).
class DigestStream {
public:
    DigestStream();
    ~DigestStream();
    DigestStream(const DigestStream&) = delete;
    DigestStream& operator=(const DigestStream&) = delete;

    std::ostream& stream();
    std::string hex();

private:
    class Buf;
    std::unique_ptr<Buf> buf_;
    std::unique_ptr<std::ostream> os_;
};

}  // namespace escape
