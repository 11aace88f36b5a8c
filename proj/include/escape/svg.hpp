#pragma once

#include "escape/engine.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace escape {

struct SvgOptions {
    int width_px = 800;
    bool show_goals = false;
    std::optional<std::vector<int>> level_filter;  // man levels to draw; all recorded when empty
    std::size_t max_points = 20000;                 // per polyline before thinning
};

/// Collects a trace sample by sample and renders it as standalone SVG.
/// Long polylines are thinned to at most max_points, keeping endpoints and
/// every change of move kind.
template <class Real>
class SvgPlot final : public TraceSink<Real> {
public:
    explicit SvgPlot(SvgOptions options = {});
    void begin(const TraceHeader& header) override;
    void sample(const TraceSample<Real>& s) override;
    std::string render() const;

private:
    struct Vertex {
        double x = 0.0;
        double y = 0.0;
        MoveKind kind = MoveKind::Free;
    };
    struct Line {
        std::vector<Vertex> points;
        std::optional<Vertex> tail;  // latest sample when it fell between strides
        std::size_t stride = 1;
        std::size_t seen = 0;
    };
    void push(Line& line, const Vertex& v, bool keep);
    static std::vector<Vertex> vertices(const Line& line) {
        std::vector<Vertex> out = line.points;
        if (line.tail) out.push_back(*line.tail);
        return out;
    }
    void grow(double x, double y);

    SvgOptions options_;
    TraceHeader header_;
    std::vector<int> columns_;  // man columns drawn
    std::vector<Line> men_;
    std::vector<Line> lions_;
    int top_column_ = -1;
    std::optional<MoveKind> last_kind_;
    std::vector<std::array<double, 2>> goals_;
    std::array<double, 4> box_{};  // min x, min y, max x, max y
    bool any_ = false;
};

template <class Real>
std::string render_svg(const Trace<Real>& trace, const SvgOptions& options = {});

}  // namespace escape
