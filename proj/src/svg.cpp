#include "deepc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace deepc {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(6) << v;
    return ss.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::vector<double> tick_positions(double lo, double hi, int target) {
    std::vector<double> ticks;
    double span = hi - lo;
    if (span <= 0) {
        ticks.push_back(lo);
        return ticks;
    }
    double raw = span / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0})
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 1e-12 * span; t += step) ticks.push_back(t);
    return ticks;
}

}  // namespace

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<PlotSeries>& series,
                             int width, int height, bool log_x) {
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto tx = [&](double x) { return log_x ? std::log10(std::max(x, 1e-300)) : x; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (tx(x) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" << escape(title) << "</text>\n";

    // axes box
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (double t : tick_positions(xmin, xmax, 6)) {
        double x = ml + (t - xmin) / (xmax - xmin) * pw;
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt(x) << "\" y2=\""
            << mt + ph + 5 << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << fmt(x) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << (log_x ? "1e" + fmt(t) : fmt(t)) << "</text>\n";
    }
    for (double t : tick_positions(ymin, ymax, 6)) {
        double y = mt + (ymax - t) / (ymax - ymin) * ph;
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << ml << "\" y2=\""
            << fmt(y) << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
            << "</text>\n";
    }
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(x_label)
        << "</text>\n"
        << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">" << escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) svg << ' ';
            svg << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
        }
        svg << "\"/>\n";
        double ly = mt + 16 + 16 * static_cast<double>(k);
        svg << "<line x1=\"" << ml + pw - 110 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
            << ml + pw - 90 << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + pw - 84 << "\" y=\"" << fmt(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_svg_file(const std::string& path, const std::string& svg) {
    std::ofstream f(path);
    if (!f) throw SolverFailure("svg: cannot open " + path + " for writing");
    f << svg;
}

std::vector<PlotSeries> series_from_signal(const Signal& s, const std::string& prefix) {
    std::vector<PlotSeries> out(s.dim());
    for (int c = 0; c < s.dim(); ++c) {
        out[c].label = prefix + "_" + std::to_string(c + 1);
        for (int t = 0; t < s.length(); ++t) {
            out[c].x.push_back(t);
            out[c].y.push_back(s.samples()(c, t));
        }
    }
    return out;
}

}  // namespace deepc
