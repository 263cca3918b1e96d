#include "krylreg/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace krylreg {

namespace {

constexpr double kFloor = 1e-18;
constexpr double kWidth = 800.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 630.0;
constexpr double kTop = 46.0;
constexpr double kBottom = 470.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e"};
constexpr int kPaletteSize = 5;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

bool plottable(double x, double y) {
    return std::isfinite(x) && std::isfinite(y);
}

}  // namespace

void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::vector<PlotSeries>& series) {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    bool any = false;
    for (const PlotSeries& s : series) {
        const std::size_t n = std::min(s.k.size(), s.value.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!plottable(s.k[i], s.value[i])) continue;
            const double y = std::log10(std::max(s.value[i], kFloor));
            if (!any) {
                xmin = xmax = s.k[i];
                ymin = ymax = y;
                any = true;
            } else {
                xmin = std::min(xmin, s.k[i]);
                xmax = std::max(xmax, s.k[i]);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (!any)
        throw std::invalid_argument("write_svg_plot: no plottable points");
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax - ymin < 0.5) ymax = ymin + 1.0;

    const auto sx = [&](double x) {
        return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft);
    };
    const auto sy = [&](double v) {
        const double y = std::log10(std::max(v, kFloor));
        return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
       << kHeight << "\">\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"24\" "
          "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << escape(title) << "</text>\n";

    // Decade gridlines and y labels.
    const int decades = static_cast<int>(ymax - ymin);
    const int ystep = std::max(1, (decades + 9) / 10);
    for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax);
         d += ystep) {
        const double y = kBottom - (d - ymin) / (ymax - ymin) * (kBottom - kTop);
        os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\""
           << fmt(kRight) << "\" y2=\"" << fmt(y)
           << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        char lab[24];
        std::snprintf(lab, sizeof lab, "1e%d", d);
        os << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
              "font-size=\"12\">"
           << lab << "</text>\n";
    }

    // Integer x ticks, thinned to at most eight.
    const long long x0 = static_cast<long long>(std::ceil(xmin));
    const long long x1 = static_cast<long long>(std::floor(xmax));
    const long long xstep =
        std::max<long long>(1, (x1 - x0) / 8 + ((x1 - x0) % 8 ? 1 : 0));
    for (long long t = x0; t <= x1; t += xstep) {
        const double x = sx(static_cast<double>(t));
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kBottom)
           << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(kBottom + 5)
           << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kBottom + 20)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"12\">"
           << t << "</text>\n";
    }

    os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
       << fmt(kLeft) << "\" y2=\"" << fmt(kBottom)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom)
       << "\" x2=\"" << fmt(kRight) << "\" y2=\"" << fmt(kBottom)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\""
       << fmt(kHeight - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"13\">k</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const char* color = kPalette[si % kPaletteSize];
        const std::size_t n = std::min(s.k.size(), s.value.size());
        std::string points;
        for (std::size_t i = 0; i < n; ++i) {
            if (!plottable(s.k[i], s.value[i])) continue;
            if (!points.empty()) points += ' ';
            points += fmt(sx(s.k[i])) + "," + fmt(sy(s.value[i]));
        }
        if (!points.empty())
            os << "<polyline points=\"" << points
               << "\" fill=\"none\" stroke=\"" << color
               << "\" stroke-width=\"1.5\"/>\n";
        if (s.k_star >= 0) {
            for (std::size_t i = 0; i < n; ++i) {
                if (s.k[i] == static_cast<double>(s.k_star) &&
                    plottable(s.k[i], s.value[i])) {
                    os << "<circle cx=\"" << fmt(sx(s.k[i])) << "\" cy=\""
                       << fmt(sy(s.value[i])) << "\" r=\"4\" fill=\"" << color
                       << "\"/>\n";
                    break;
                }
            }
        }

        // Legend row: color swatch, label, and the marked step if any.
        const double ly = kTop + 8 + 22.0 * static_cast<double>(si);
        os << "<rect x=\"" << fmt(kRight + 14) << "\" y=\"" << fmt(ly)
           << "\" width=\"14\" height=\"14\" fill=\"" << color << "\"/>\n";
        std::string text = escape(s.label);
        if (s.k_star >= 0) text += " (k*=" + std::to_string(s.k_star) + ")";
        os << "<text x=\"" << fmt(kRight + 34) << "\" y=\"" << fmt(ly + 12)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << text
           << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace krylreg
