#include "escape/trace_io.hpp"

#include "escape/errors.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <streambuf>

namespace escape {

namespace {

void append_number(std::string& line, double v) {
    if (std::isnan(v)) {
        line += "nan";
        return;
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    line.append(buf, res.ptr);
}

template <class Real>
void append_row(std::string& line, const TraceSample<Real>& s, bool hex) {
    auto put = [&](const Real& v) {
        line += ',';
        if (hex) {
            line += to_hex(v);
        } else {
            append_number(line, to_double(v));
        }
    };
    line.clear();
    if (hex) {
        line += to_hex(s.t);
    } else {
        append_number(line, to_double(s.t));
    }
    line += ',';
    line += move_code(s.move);
    if (s.goal) {
        put(s.goal->x);
        put(s.goal->y);
    } else {
        line += ",nan,nan";
    }
    for (const auto& p : s.man) {
        put(p.x);
        put(p.y);
    }
    for (const auto& p : s.lions) {
        put(p.x);
        put(p.y);
    }
    line += '\n';
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view chomp(const std::string& line) {
    std::string_view v(line);
    if (!v.empty() && v.back() == '\r') {
        v.remove_suffix(1);
    }
    return v;
}

double parse_decimal(std::string_view f, std::size_t row) {
    if (f == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ConfigError("trace row " + std::to_string(row) + ": bad number '" + std::string(f) + "'");
    }
    return v;
}

template <class Real>
Real parse_field(std::string_view f, bool hex, std::size_t row) {
    if (!hex) {
        return Real(parse_decimal(f, row));
    }
    if (f == "nan") {
        return Real(std::numeric_limits<double>::quiet_NaN());
    }
    if constexpr (std::is_same_v<Real, double>) {
        return parse_hex_double(std::string(f));
    } else {
        return parse_hex_extended(std::string(f));
    }
}

template <class Real>
void parse_row(const std::vector<std::string_view>& f, const TraceHeader& h, bool hex, std::size_t row,
               TraceSample<Real>& s) {
    const std::size_t want = 4 + 2 * (h.levels.size() + h.lion_count);
    if (f.size() != want) {
        throw ConfigError("trace row " + std::to_string(row) + ": expected " + std::to_string(want) + " fields, got " +
                          std::to_string(f.size()));
    }
    s.t = parse_field<Real>(f[0], hex, row);
    if (f[1].size() != 1) {
        throw ConfigError("trace row " + std::to_string(row) + ": bad move code");
    }
    try {
        s.move = parse_move_code(f[1][0]);
    } catch (const Error&) {
        throw ConfigError("trace row " + std::to_string(row) + ": bad move code '" + std::string(f[1]) + "'");
    }
    if (f[2] == "nan" && f[3] == "nan") {
        s.goal.reset();
    } else {
        s.goal = Point2<Real>{parse_field<Real>(f[2], hex, row), parse_field<Real>(f[3], hex, row)};
    }
    std::size_t k = 4;
    s.man.resize(h.levels.size());
    for (auto& p : s.man) {
        p = {parse_field<Real>(f[k], hex, row), parse_field<Real>(f[k + 1], hex, row)};
        k += 2;
    }
    s.lions.resize(h.lion_count);
    for (auto& p : s.lions) {
        p = {parse_field<Real>(f[k], hex, row), parse_field<Real>(f[k + 1], hex, row)};
        k += 2;
    }
}

}  // namespace

std::string csv_header(const TraceHeader& header) {
    std::string out = "t,move,goal_x,goal_y";
    for (int k : header.levels) {
        out += ",man" + std::to_string(k) + "_x,man" + std::to_string(k) + "_y";
    }
    for (std::size_t i = 1; i <= header.lion_count; ++i) {
        out += ",lion" + std::to_string(i) + "_x,lion" + std::to_string(i) + "_y";
    }
    return out;
}

TraceHeader parse_csv_header(std::string_view line) {
    const auto f = split(line);
    if (f.size() < 4 || f[0] != "t" || f[1] != "move" || f[2] != "goal_x" || f[3] != "goal_y") {
        throw ConfigError("trace header must start with t,move,goal_x,goal_y");
    }
    TraceHeader h;
    std::size_t k = 4;
    auto numbered = [&](std::string_view prefix, int& out) {
        if (k >= f.size()) return false;
        const std::string_view x = f[k];
        if (x.substr(0, prefix.size()) != prefix || x.size() < prefix.size() + 3 || x.substr(x.size() - 2) != "_x") {
            return false;
        }
        const std::string_view digits = x.substr(prefix.size(), x.size() - prefix.size() - 2);
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), out);
        if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) {
            return false;
        }
        if (k + 1 >= f.size() || f[k + 1] != std::string(prefix) + std::string(digits) + "_y") {
            throw ConfigError("trace header: " + std::string(x) + " without its _y column");
        }
        k += 2;
        return true;
    };
    int v = 0;
    while (k < f.size() && numbered("man", v)) {
        if (!h.levels.empty() && v <= h.levels.back()) {
            throw ConfigError("trace header: man levels must ascend");
        }
        h.levels.push_back(v);
    }
    while (k < f.size() && numbered("lion", v)) {
        if (v != static_cast<int>(h.lion_count) + 1) {
            throw ConfigError("trace header: lions must be numbered 1, 2, ...");
        }
        ++h.lion_count;
    }
    if (k != f.size()) {
        throw ConfigError("trace header: unexpected column '" + std::string(f[k]) + "'");
    }
    if (h.levels.empty()) {
        throw ConfigError("trace header: no man columns");
    }
    h.level_n = h.levels.back();
    return h;
}

template <class Real>
CsvTraceWriter<Real>::CsvTraceWriter(std::ostream& out, std::ostream* sidecar) : out_(out), sidecar_(sidecar) {}

template <class Real>
void CsvTraceWriter<Real>::put(std::ostream& os, const std::string& line) {
    os.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!os) {
        throw Error("trace write failed");
    }
}

template <class Real>
void CsvTraceWriter<Real>::begin(const TraceHeader& header) {
    line_ = csv_header(header) + "\n";
    put(out_, line_);
    bytes_ += line_.size();
    if (sidecar_ != nullptr) {
        put(*sidecar_, line_);
    }
}

template <class Real>
void CsvTraceWriter<Real>::sample(const TraceSample<Real>& s) {
    append_row(line_, s, false);
    put(out_, line_);
    bytes_ += line_.size();
    if (sidecar_ != nullptr) {
        append_row(line_, s, true);
        put(*sidecar_, line_);
    }
}

template <class Real>
void CsvTraceWriter<Real>::end() {
    out_.flush();
    if (sidecar_ != nullptr) {
        sidecar_->flush();
    }
    if (!out_ || (sidecar_ != nullptr && !*sidecar_)) {
        throw Error("trace write failed");
    }
}

template <class Real>
std::size_t write_trace_csv(const Trace<Real>& trace, std::ostream& out, std::ostream* sidecar) {
    if (trace.samples.empty()) {
        throw DomainError("cannot write an empty trace");
    }
    CsvTraceWriter<Real> w(out, sidecar);
    w.begin(trace.header);
    for (const auto& s : trace.samples) {
        w.sample(s);
    }
    w.end();
    return w.bytes();
}

template <class Real>
TraceHeader read_trace_csv(std::istream& csv, TraceSink<Real>& sink, std::istream* sidecar) {
    std::string line;
    std::string exact;
    if (!std::getline(csv, line)) {
        throw ConfigError("trace is empty");
    }
    const TraceHeader header = parse_csv_header(chomp(line));
    if (sidecar != nullptr) {
        if (!std::getline(*sidecar, exact) || chomp(exact) != chomp(line)) {
            throw ConfigError("sidecar header does not match the trace");
        }
    }
    sink.begin(header);
    TraceSample<Real> s;
    TraceSample<Real> check;
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        ++row;
        if (chomp(line).empty()) {
            continue;
        }
        parse_row(split(chomp(line)), header, false, row, check);
        if (sidecar != nullptr) {
            if (!std::getline(*sidecar, exact)) {
                throw ConfigError("sidecar ends before the trace");
            }
            parse_row(split(chomp(exact)), header, true, row, s);
            if (to_double(s.t) != to_double(check.t) || s.move != check.move) {
                throw ConfigError("sidecar row " + std::to_string(row) + " does not match the trace");
            }
            sink.sample(s);
        } else {
            sink.sample(check);
        }
    }
    sink.end();
    return header;
}

template <class Real>
Trace<Real> load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read " + path);
    }
    std::ifstream hex;
    std::istream* sidecar = nullptr;
    if (precision_of<Real>() == Precision::Extended && std::filesystem::exists(sidecar_path(path))) {
        hex.open(sidecar_path(path));
        sidecar = &hex;
    }
    TraceCollector<Real> c;
    read_trace_csv(in, c, sidecar);
    return std::move(c.trace());
}

class DigestStream::Buf final : public std::streambuf {
public:
    Buf() : ctx_(EVP_MD_CTX_new()) {
        if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
            throw Error("SHA-256 init failed");
        }
    }
    ~Buf() override { EVP_MD_CTX_free(ctx_); }
    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 15]);
        }
        return out;
    }

protected:
    std::streamsize xsputn(const char* s, std::streamsize n) override {
        EVP_DigestUpdate(ctx_, s, static_cast<std::size_t>(n));
        return n;
    }
    int_type overflow(int_type c) override {
        if (!traits_type::eq_int_type(c, traits_type::eof())) {
            const char ch = traits_type::to_char_type(c);
            EVP_DigestUpdate(ctx_, &ch, 1);
        }
        return traits_type::not_eof(c);
    }

private:
    EVP_MD_CTX* ctx_;
};

DigestStream::DigestStream() : buf_(std::make_unique<Buf>()), os_(std::make_unique<std::ostream>(buf_.get())) {}
DigestStream::~DigestStream() = default;
std::ostream& DigestStream::stream() { return *os_; }
std::string DigestStream::hex() {
    os_->flush();
    return buf_->hex();
}

#define ESCAPE_INSTANTIATE_TRACE_IO(Real)                                                                          \
    template class CsvTraceWriter<Real>;                                                                        \
    template std::size_t write_trace_csv<Real>(const Trace<Real>&, std::ostream&, std::ostream*);              \
    template TraceHeader read_trace_csv<Real>(std::istream&, TraceSink<Real>&, std::istream*);                 \
    template Trace<Real> load_trace_csv<Real>(const std::string&);

ESCAPE_INSTANTIATE_TRACE_IO(double)
ESCAPE_INSTANTIATE_TRACE_IO(Extended)

}  // namespace escape
