#include "anchorlife/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace anchorlife::svg
{

namespace
{

constexpr double width = 720.0, height = 480.0;
constexpr double left = 80.0, right = 170.0, top = 40.0, bottom = 60.0;

std::string escape(const std::string& s)
{
    std::string out;
    for (const char c : s)
    {
        switch (c)
        {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v, bool log)
{
    char buf[32];
    if (log)
        std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(std::log10(v))));
    else
        std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Axis
{
    bool log;
    double lo, hi;

    bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
    double map(double v) const { return log ? std::log10(v) : v; }
    double frac(double v) const
    {
        const double f = (map(v) - map(lo)) / (map(hi) - map(lo));
        return std::clamp(f, -0.05, 1.05);
    }

    std::vector<double> ticks() const
    {
        std::vector<double> out;
        if (log)
        {
            const int a = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
            const int b = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
            const int step = std::max(1, (b - a + 1) / 8);
            for (int e = a; e <= b; e += step)
                out.push_back(std::pow(10.0, e));
        }
        else
        {
            for (int i = 0; i <= 5; ++i)
                out.push_back(lo + (hi - lo) * i / 5.0);
        }
        return out;
    }
};

Axis make_axis(bool log, const std::vector<const std::vector<double>*>& columns)
{
    Axis ax{log, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto* col : columns)
        for (const double v : *col)
            if (ax.usable(v))
            {
                ax.lo = std::min(ax.lo, v);
                ax.hi = std::max(ax.hi, v);
            }
    if (!std::isfinite(ax.lo))
    {
        ax.lo = log ? 0.1 : 0.0;
        ax.hi = log ? 10.0 : 1.0;
    }
    if (log)
    {
        ax.lo = std::pow(10.0, std::floor(std::log10(ax.lo)));
        ax.hi = std::pow(10.0, std::ceil(std::log10(ax.hi)));
        if (ax.hi <= ax.lo)
            ax.hi = ax.lo * 10.0;
    }
    else if (ax.hi <= ax.lo)
    {
        ax.lo -= 0.5;
        ax.hi += 0.5;
    }
    return ax;
}

} // namespace

std::string render(const Plot& plot)
{
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : plot.series)
    {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
        if (s.kind == SeriesKind::Band)
            ys.push_back(&s.y_upper);
        if (s.kind == SeriesKind::BandX)
            xs.push_back(&s.x_upper);
    }
    const Axis ax = make_axis(plot.log_x, xs);
    const Axis ay = make_axis(plot.log_y, ys);
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double v) { return left + pw * ax.frac(v); };
    auto py = [&](double v) { return top + ph * (1.0 - ay.frac(v)); };
    auto py_or_edge = [&](double v, bool upper) {
        if (ay.usable(v))
            return py(v);
        return upper ? top : top + ph;
    };
    auto px_or_edge = [&](double v, bool upper) {
        if (ax.usable(v))
            return px(v);
        return upper ? left + pw : left;
    };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";

    o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (const double t : ax.ticks())
        o << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
          << fmt(top + ph) << "\"/>\n";
    for (const double t : ay.ticks())
        o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
          << fmt(py(t)) << "\"/>\n";
    o << "</g>\n";

    o << "<defs><clipPath id=\"plot-area\"><rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
      << fmt(pw) << "\" height=\"" << fmt(ph) << "\"/></clipPath></defs>\n"
      << "<g clip-path=\"url(#plot-area)\">\n";
    for (const auto& s : plot.series)
    {
        std::string d;
        const std::size_t n = std::min(s.x.size(), s.y.size());
        switch (s.kind)
        {
        case SeriesKind::Scatter:
            for (std::size_t i = 0; i < n; ++i)
                if (ax.usable(s.x[i]) && ay.usable(s.y[i]))
                    d += "M" + fmt(px(s.x[i]) - 3) + "," + fmt(py(s.y[i])) + "a3,3 0 1,0 6,0a3,3 0 1,0 -6,0";
            o << "<path d=\"" << d << "\" fill=\"" << s.color << "\" stroke=\"none\"/>\n";
            break;
        case SeriesKind::Line:
            for (std::size_t i = 0; i < n; ++i)
                if (ax.usable(s.x[i]) && ay.usable(s.y[i]))
                    d += (d.empty() ? "M" : "L") + fmt(px(s.x[i])) + "," + fmt(py(s.y[i]));
            o << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n";
            break;
        case SeriesKind::Band:
        {
            const std::size_t m = std::min(n, s.y_upper.size());
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < m; ++i)
                if (ax.usable(s.x[i]))
                    idx.push_back(i);
            for (const std::size_t i : idx)
                d += (d.empty() ? "M" : "L") + fmt(px(s.x[i])) + "," + fmt(py_or_edge(s.y_upper[i], true));
            for (auto it = idx.rbegin(); it != idx.rend(); ++it)
                d += "L" + fmt(px(s.x[*it])) + "," + fmt(py_or_edge(s.y[*it], false));
            if (!d.empty())
                d += "Z";
            o << "<path d=\"" << d << "\" fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
            break;
        }
        case SeriesKind::BandX:
        {
            const std::size_t m = std::min({s.x.size(), s.x_upper.size(), s.y.size()});
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < m; ++i)
                if (ay.usable(s.y[i]))
                    idx.push_back(i);
            for (const std::size_t i : idx)
                d += (d.empty() ? "M" : "L") + fmt(px_or_edge(s.x_upper[i], true)) + "," + fmt(py(s.y[i]));
            for (auto it = idx.rbegin(); it != idx.rend(); ++it)
                d += "L" + fmt(px_or_edge(s.x[*it], false)) + "," + fmt(py(s.y[*it]));
            if (!d.empty())
                d += "Z";
            o << "<path d=\"" << d << "\" fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
            break;
        }
        }
    }
    o << "</g>\n";

    o << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const double t : ax.ticks())
        o << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\">"
          << tick_label(t, ax.log) << "</text>\n";
    for (const double t : ay.ticks())
        o << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(t) + 4) << "\" text-anchor=\"end\">"
          << tick_label(t, ay.log) << "</text>\n";
    o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(height - 16) << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n"
      << "<text transform=\"translate(18," << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << "</text>\n";

    double ly = top + 10;
    for (const auto& s : plot.series)
    {
        o << "<rect x=\"" << fmt(left + pw + 12) << "\" y=\"" << fmt(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
          << s.color << "\"" << (s.kind == SeriesKind::Band || s.kind == SeriesKind::BandX ? " fill-opacity=\"0.2\"" : "") << "/>\n"
          << "<text x=\"" << fmt(left + pw + 28) << "\" y=\"" << fmt(ly + 1) << "\">" << escape(s.label)
          << "</text>\n";
        ly += 18;
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace anchorlife::svg
