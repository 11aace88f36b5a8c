#include "escape/svg.hpp"

#include "escape/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace escape {

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

const char* kind_class(MoveKind k) {
    switch (k) {
        case MoveKind::Free:
            return "move-free";
        case MoveKind::Escape:
            return "move-escape";
        case MoveKind::Avoidance:
            return "move-avoidance";
    }
    return "move-free";
}

constexpr const char* kStyle =
    ".man{fill:none;stroke-width:1.5px;vector-effect:non-scaling-stroke}"
    ".man-level-1{stroke:#9aa5b1}.man-level-2{stroke:#3e4c59}.man-level-3{stroke:#1f2933}"
    ".man-level-4{stroke:#000}"
    ".lion{fill:none;stroke:#c0392b;stroke-width:1px;stroke-dasharray:4 2;vector-effect:non-scaling-stroke}"
    ".move{fill:none;stroke-width:2.5px;vector-effect:non-scaling-stroke}"
    ".move-free{stroke:#2e86de}.move-escape{stroke:#f39c12}.move-avoidance{stroke:#8e44ad}"
    ".start{stroke:none}.start.man{fill:#1f2933}.start.lion{fill:#c0392b}"
    ".goal{fill:none;stroke:#27ae60;stroke-width:1px;vector-effect:non-scaling-stroke}";

}  // namespace

template <class Real>
SvgPlot<Real>::SvgPlot(SvgOptions options) : options_(std::move(options)) {
    options_.max_points = std::max<std::size_t>(options_.max_points, 16);
}

template <class Real>
void SvgPlot<Real>::begin(const TraceHeader& header) {
    header_ = header;
    for (std::size_t i = 0; i < header.levels.size(); ++i) {
        const int k = header.levels[i];
        if (!options_.level_filter ||
            std::find(options_.level_filter->begin(), options_.level_filter->end(), k) != options_.level_filter->end()) {
            columns_.push_back(static_cast<int>(i));
        }
    }
    men_.assign(columns_.size(), Line{});
    lions_.assign(header.lion_count, Line{});
    const int top = header.column_of(header.level_n);
    if (std::find(columns_.begin(), columns_.end(), top) != columns_.end()) {
        top_column_ = top;
    }
}

template <class Real>
void SvgPlot<Real>::grow(double x, double y) {
    if (!any_) {
        box_ = {x, y, x, y};
        any_ = true;
        return;
    }
    box_[0] = std::min(box_[0], x);
    box_[1] = std::min(box_[1], y);
    box_[2] = std::max(box_[2], x);
    box_[3] = std::max(box_[3], y);
}

template <class Real>
void SvgPlot<Real>::push(Line& line, const Vertex& v, bool keep) {
    const std::size_t idx = line.seen++;
    if (!keep && idx % line.stride != 0) {
        line.tail = v;
        return;
    }
    line.tail.reset();
    line.points.push_back(v);
    if (line.points.size() > options_.max_points) {
        std::vector<Vertex> thinned;
        thinned.reserve(line.points.size() / 2 + 2);
        for (std::size_t i = 0; i < line.points.size(); ++i) {
            const bool edge = i == 0 || i + 1 == line.points.size();
            const bool change = i > 0 && line.points[i].kind != line.points[i - 1].kind;
            if (edge || change || i % 2 == 0) {
                thinned.push_back(line.points[i]);
            }
        }
        line.points = std::move(thinned);
        line.stride *= 2;
    }
}

template <class Real>
void SvgPlot<Real>::sample(const TraceSample<Real>& s) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const int col = columns_[i];
        const auto& p = s.man[static_cast<std::size_t>(col)];
        const Vertex v{to_double(p.x), to_double(p.y), col == top_column_ ? s.move : MoveKind::Free};
        const bool keep = col == top_column_ && (!last_kind_ || *last_kind_ != s.move);
        push(men_[i], v, keep);
        grow(v.x, v.y);
    }
    if (top_column_ >= 0) {
        last_kind_ = s.move;
    }
    for (std::size_t i = 0; i < s.lions.size() && i < lions_.size(); ++i) {
        const Vertex v{to_double(s.lions[i].x), to_double(s.lions[i].y), MoveKind::Free};
        push(lions_[i], v, false);
        grow(v.x, v.y);
    }
    if (options_.show_goals && s.goal) {
        const std::array<double, 2> g{to_double(s.goal->x), to_double(s.goal->y)};
        if (goals_.empty() || goals_.back() != g) {
            goals_.push_back(g);
            grow(g[0], g[1]);
        }
    }
}

template <class Real>
std::string SvgPlot<Real>::render() const {
    if (!any_) {
        throw DomainError("cannot plot an empty trace");
    }
    double w = box_[2] - box_[0];
    double h = box_[3] - box_[1];
    const double extent = std::max({w, h, 1e-300});
    if (w < extent * 1e-3) w = extent * 1e-3;
    if (h < extent * 1e-3) h = extent * 1e-3;
    const double cx = 0.5 * (box_[0] + box_[2]);
    const double cy = 0.5 * (box_[1] + box_[3]);
    const double vw = w * 1.1;
    const double vh = h * 1.1;
    const double min_x = cx - vw / 2;
    const double min_y = -cy - vh / 2;  // y axis flipped
    const double marker = 0.006 * std::max(vw, vh);
    const int width = std::max(options_.width_px, 1);
    const int height = std::max(1, static_cast<int>(std::lround(width * vh / vw)));

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"" + fmt(min_x) + " " + fmt(min_y) + " " + fmt(vw) + " " + fmt(vh) +
           "\">\n";
    out += "<style>" + std::string(kStyle) + "</style>\n";

    auto polyline = [&](const std::vector<Vertex>& pts, std::size_t from, std::size_t to, const std::string& cls) {
        out += "<polyline class=\"" + cls + "\" points=\"";
        for (std::size_t i = from; i < to; ++i) {
            if (i > from) out += ' ';
            out += fmt(pts[i].x) + "," + fmt(-pts[i].y);
        }
        out += "\"/>\n";
    };
    auto dot = [&](const Vertex& v, const std::string& cls) {
        out += "<circle class=\"" + cls + "\" cx=\"" + fmt(v.x) + "\" cy=\"" + fmt(-v.y) + "\" r=\"" + fmt(marker) +
               "\"/>\n";
    };

    for (std::size_t i = 0; i < lions_.size(); ++i) {
        const std::string cls = "lion lion-" + std::to_string(i + 1);
        const auto pts = vertices(lions_[i]);
        if (pts.size() >= 2) polyline(pts, 0, pts.size(), cls);
        if (!pts.empty()) dot(pts.front(), "start " + cls);
    }
    for (std::size_t i = 0; i < men_.size(); ++i) {
        const int level = header_.levels[static_cast<std::size_t>(columns_[i])];
        const std::string cls = "man man-level-" + std::to_string(level);
        const auto pts = vertices(men_[i]);
        if (pts.size() >= 2) polyline(pts, 0, pts.size(), cls);
        if (!pts.empty()) dot(pts.front(), "start " + cls);
    }
    if (top_column_ >= 0) {
        const auto it = std::find(columns_.begin(), columns_.end(), top_column_);
        const auto pts = vertices(men_[static_cast<std::size_t>(it - columns_.begin())]);
        out += "<g class=\"moves\">\n";
        // A vertex carries the kind of the move that starts there.
        std::size_t begin = 0;
        for (std::size_t i = 1; i <= pts.size(); ++i) {
            if (i == pts.size() || pts[i].kind != pts[begin].kind) {
                const std::size_t end = std::min(i + 1, pts.size());
                if (end - begin >= 2) {
                    polyline(pts, begin, end, std::string("move ") + kind_class(pts[begin].kind));
                }
                begin = i;
            }
        }
        out += "</g>\n";
    }
    if (options_.show_goals && !goals_.empty()) {
        out += "<g class=\"goals\">\n";
        for (const auto& g : goals_) {
            dot(Vertex{g[0], g[1], MoveKind::Free}, "goal");
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

template <class Real>
std::string render_svg(const Trace<Real>& trace, const SvgOptions& options) {
    SvgPlot<Real> plot(options);
    plot.begin(trace.header);
    for (const auto& s : trace.samples) {
        plot.sample(s);
    }
    return plot.render();
}

template class SvgPlot<double>;
template class SvgPlot<Extended>;
template std::string render_svg<double>(const Trace<double>&, const SvgOptions&);
template std::string render_svg<Extended>(const Trace<Extended>&, const SvgOptions&);

}  // namespace escape
