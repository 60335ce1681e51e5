#include "eit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace eit {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<SvgSeries>& series,
                          const std::string& stamp) {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (const auto& p : s.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
    if (!(xmin < xmax)) { xmin -= 1; xmax += 1; }
    if (!(ymin < ymax)) { ymin -= 1; ymax += 1; }
    double xpad = 0.02 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto sy = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<!-- " << stamp << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
       << "</text>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
       << H - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double x = xmin + (xmax - xmin) * i / 5.0;
        double y = ymin + (ymax - ymin) * i / 5.0;
        os << "<line x1=\"" << sx(x) << "\" y1=\"" << H - mb << "\" x2=\"" << sx(x) << "\" y2=\""
           << H - mb + 4 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << sx(x) << "\" y=\"" << H - mb + 18
           << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(x) << "</text>\n";
        os << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(y) << "\" x2=\"" << ml << "\" y2=\""
           << sy(y) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << sy(y) + 3
           << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(y) << "</text>\n";
    }
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << (mt + H - mb) / 2 << ")\">" << y_label << "</text>\n";

    double legend_y = mt + 6;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& p : s.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
            os << fmt(sx(p.x)) << ',' << fmt(sy(p.y)) << ' ';
        }
        os << "\"/>\n";
        if (!s.label.empty() && series.size() <= 18) {
            os << "<line x1=\"" << W - mr - 120 << "\" y1=\"" << legend_y << "\" x2=\""
               << W - mr - 100 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color << "\"/>\n";
            os << "<text x=\"" << W - mr - 96 << "\" y=\"" << legend_y + 3
               << "\" font-size=\"10\">" << s.label << "</text>\n";
            legend_y += 13;
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_overlay_plot(const std::string& title, const std::vector<SvgPolygon>& polys,
                             const std::string& stamp) {
    const double W = 520, H = 520, margin = 40;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : polys)
        for (const auto& p : s.points) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
    if (!(xmin < xmax)) { xmin -= 1; xmax += 1; }
    if (!(ymin < ymax)) { ymin -= 1; ymax += 1; }
    double span = std::max(xmax - xmin, ymax - ymin);
    double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    double scale = (W - 2 * margin) / span;
    auto sx = [&](double x) { return W / 2 + (x - cx) * scale; };
    auto sy = [&](double y) { return H / 2 - (y - cy) * scale; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<!-- " << stamp << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
       << "</text>\n";
    double legend_y = 36;
    for (const auto& s : polys) {
        os << (s.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << s.color
           << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : s.points) os << fmt(sx(p.x)) << ',' << fmt(sy(p.y)) << ' ';
        os << "\"/>\n";
        if (!s.label.empty()) {
            os << "<line x1=\"16\" y1=\"" << legend_y << "\" x2=\"36\" y2=\"" << legend_y
               << "\" stroke=\"" << s.color << "\"/>\n";
            os << "<text x=\"40\" y=\"" << legend_y + 3 << "\" font-size=\"10\">" << s.label
               << "</text>\n";
            legend_y += 13;
        }
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << content;
}

} // namespace eit
