#include "mccs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"

namespace mccs::svg {
namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string color(double v, double scale) {
    const double t = std::clamp(v / scale, -1.0, 1.0);
    // white at 0, (178, 24, 43) at +1, (33, 102, 172) at -1
    const double r = t >= 0 ? 255 + t * (178 - 255) : 255 + (-t) * (33 - 255);
    const double g = t >= 0 ? 255 + t * (24 - 255) : 255 + (-t) * (102 - 255);
    const double b = t >= 0 ? 255 + t * (43 - 255) : 255 + (-t) * (172 - 255);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(r)), static_cast<int>(std::lround(g)),
                  static_cast<int>(std::lround(b)));
    return buf;
}

std::string short_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render(const Heatmap& h) {
    if (h.values.size() != h.row_labels.size()) throw ArgumentError("heatmap: row count mismatch");
    for (const auto& row : h.values)
        if (row.size() != h.column_labels.size()) throw ArgumentError("heatmap: column count mismatch");

    double scale = h.scale;
    if (!(scale > 0.0)) {
        for (const auto& row : h.values)
            for (const auto& v : row)
                if (v && std::isfinite(*v)) scale = std::max(scale, std::abs(*v));
        if (!(scale > 0.0)) scale = 1.0;
    }

    const int cell_w = std::max(1, h.cell_width), cell_h = std::max(1, h.cell_height);
    constexpr int kLeft = 190, kTop = 150, kFont = 10;
    const int width = kLeft + cell_w * static_cast<int>(h.column_labels.size()) + 20;
    const int height = kTop + cell_h * static_cast<int>(h.row_labels.size()) + 20;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"" << kFont << "\">\n";
    s << "<text x=\"10\" y=\"20\" font-size=\"14\">" << escape(h.title) << "</text>\n";
    s << "<g data-scale=\"" << csv::format_number(scale) << "\"/>\n";
    for (std::size_t c = 0; c < h.column_labels.size(); ++c) {
        const int x = kLeft + cell_w * static_cast<int>(c) + cell_w / 2;
        s << "<text transform=\"translate(" << x << "," << kTop - 6 << ") rotate(-60)\">"
          << escape(h.column_labels[c]) << "</text>\n";
    }
    for (std::size_t r = 0; r < h.row_labels.size(); ++r) {
        const int y = kTop + cell_h * static_cast<int>(r);
        s << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + cell_h - 5 << "\" text-anchor=\"end\">"
          << escape(h.row_labels[r]) << "</text>\n";
        for (std::size_t c = 0; c < h.column_labels.size(); ++c) {
            const int x = kLeft + cell_w * static_cast<int>(c);
            const auto& v = h.values[r][c];
            const std::string label = escape(h.row_labels[r] + " / " + h.column_labels[c]);
            s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\"" << cell_h
              << "\" fill=\"" << (v && std::isfinite(*v) ? color(*v, scale) : std::string("#cccccc"))
              << "\" stroke=\"#ffffff\" data-row=\"" << escape(h.row_labels[r]) << "\" data-col=\""
              << escape(h.column_labels[c]) << "\" data-value=\"" << (v ? csv::format_number(*v) : std::string())
              << "\"><title>" << label << ": " << (v ? csv::format_number(*v) : std::string("n/a"))
              << "</title></rect>\n";
            if (h.show_text && v)
                s << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h - 5
                  << "\" text-anchor=\"middle\" pointer-events=\"none\">"
                  << escape(short_text(*v * h.display_factor) + h.display_suffix) << "</text>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

void write(const std::filesystem::path& path, const Heatmap& heatmap) {
    const std::string text = render(heatmap);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace mccs::svg
