#include "collapse/harness/plot.hpp"

#include "collapse/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace collapse {

std::string render_svg(const std::vector<AggregateRow>& rows, const PlotOptions& options) {
    std::optional<std::string> cell = options.cell_params;
    if (!cell) {
        for (const auto& r : rows)
            if (r.metric == options.metric && (!cell || r.cell_params < *cell)) cell = r.cell_params;
    }
    std::map<std::string, std::vector<std::pair<double, double>>> lines;
    for (const auto& r : rows) {
        if (r.metric != options.metric || !cell || r.cell_params != *cell) continue;
        const double y = options.use_mean ? r.mean : r.median;
        auto& line = lines[r.setting];
        if (std::isfinite(y)) line.emplace_back(static_cast<double>(r.iteration), y);
    }
    if (lines.empty())
        throw Error(ErrorCode::InvalidArgument, "no rows for metric '" + options.metric + "'" +
                                                    (options.cell_params ? " and the requested cell" : ""));

    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (auto& [_, pts] : lines) {
        std::sort(pts.begin(), pts.end());
        for (const auto& [x, y] : pts) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;

    constexpr double width = 640, height = 400, left = 70, right = 150, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<title>" << options.metric << " (" << *cell << ")</title>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
       << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">iteration</text>\n";
    os << "<text x=\"15\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 15 " << top + plot_h / 2
       << ")\" text-anchor=\"middle\">" << options.metric << "</text>\n";
    os << "<text x=\"" << left << "\" y=\"" << top + plot_h + 18 << "\">" << x_lo << "</text>\n";
    os << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"end\">" << x_hi
       << "</text>\n";
    os << "<text x=\"" << left - 5 << "\" y=\"" << top + plot_h << "\" text-anchor=\"end\">" << y_lo << "</text>\n";
    os << "<text x=\"" << left - 5 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << y_hi << "</text>\n";
    std::size_t k = 0;
    for (const auto& [setting, pts] : lines) {
        const char* color = colors[k % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << (i ? " " : "") << px(pts[i].first) << ',' << py(pts[i].second);
        os << "\"/>\n";
        os << "<text x=\"" << left + plot_w + 10 << "\" y=\"" << top + 15 + 18 * static_cast<double>(k)
           << "\" fill=\"" << color << "\">" << setting << "</text>\n";
        ++k;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace collapse
