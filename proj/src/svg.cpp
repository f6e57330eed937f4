#include "gdmd/svg.hpp"

#include <algorithm>
#include <cmath>

namespace gdmd {

namespace {

constexpr const char* kXmlHeader = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

std::string num(double v) { return format_double(v); }

void open_svg(std::string& s, double w, double h) {
    s += kXmlHeader;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" +
         num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"white\"/>\n";
}

void text(std::string& s, double x, double y, const std::string& msg,
          const std::string& anchor = "start", int size = 12) {
    s += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + msg + "</text>\n";
}

void line(std::string& s, double x1, double y1, double x2, double y2,
          const std::string& stroke = "#444", double width = 1.0) {
    s += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

std::string gray_hex(double v) {
    const int g = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    static const char* digits = "0123456789abcdef";
    std::string hex = "#";
    for (int i = 0; i < 3; ++i) {
        hex += digits[g >> 4];
        hex += digits[g & 15];
    }
    return hex;
}

Eigen::Index tick_step(Eigen::Index range) {
    if (range <= 12) return 1;
    if (range <= 60) return 5;
    if (range <= 120) return 10;
    return 20;
}

} // namespace

std::string svg_profile(const InnovationProfile& p, const std::string& title) {
    const double margin_l = 50, margin_r = 15, margin_t = 30, margin_b = 40;
    const double plot_w = 540, plot_h = 300;
    const double w = margin_l + plot_w + margin_r, h = margin_t + plot_h + margin_b;
    const Eigen::Index kmax = p.k_max();

    auto sx = [&](double k) {
        return margin_l + (kmax > 1 ? (k - 1) / static_cast<double>(kmax - 1) : 0.5) * plot_w;
    };
    auto sy = [&](double r) { return margin_t + (1.0 - std::clamp(r, 0.0, 1.0)) * plot_h; };

    std::string s;
    open_svg(s, w, h);
    text(s, w / 2, 18, title, "middle", 14);
    line(s, margin_l, margin_t, margin_l, margin_t + plot_h);
    line(s, margin_l, margin_t + plot_h, margin_l + plot_w, margin_t + plot_h);
    for (double r = 0.0; r <= 1.0001; r += 0.25) {
        line(s, margin_l - 4, sy(r), margin_l, sy(r));
        text(s, margin_l - 8, sy(r) + 4, num(r), "end", 10);
    }
    const Eigen::Index step = tick_step(kmax);
    for (Eigen::Index k = step; k <= kmax; k += step) {
        line(s, sx(static_cast<double>(k)), margin_t + plot_h,
             sx(static_cast<double>(k)), margin_t + plot_h + 4);
        text(s, sx(static_cast<double>(k)), margin_t + plot_h + 16, std::to_string(k), "middle", 10);
    }
    text(s, margin_l + plot_w / 2, h - 8, "k", "middle", 12);
    text(s, 14, margin_t + plot_h / 2, "r", "middle", 12);

    std::string pts;
    for (Eigen::Index k = 1; k <= kmax; ++k) {
        if (k > 1) pts += ' ';
        pts += num(sx(static_cast<double>(k))) + "," +
               num(sy(p.values[static_cast<size_t>(k - 1)]));
    }
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\"/>\n";
    for (Eigen::Index k = 1; k <= kmax; ++k)
        s += "<circle cx=\"" + num(sx(static_cast<double>(k))) + "\" cy=\"" +
             num(sy(p.values[static_cast<size_t>(k - 1)])) + "\" r=\"2\" fill=\"#1f5fa8\"/>\n";
    s += "</svg>\n";
    return s;
}

std::string svg_spectrogram(const GapSpectrogram& sg, const std::string& title) {
    const double cell = std::clamp(600.0 / static_cast<double>(sg.k_max), 3.0, 12.0);
    const double margin_l = 50, margin_r = 15, margin_t = 30, margin_b = 40;
    const double plot_w = cell * static_cast<double>(sg.k_max);
    const double plot_h = cell * static_cast<double>(sg.l_max);
    const double w = margin_l + plot_w + margin_r, h = margin_t + plot_h + margin_b;

    std::string s;
    open_svg(s, w, h);
    text(s, w / 2, 18, title, "middle", 14);
    for (Eigen::Index l = 1; l <= sg.l_max; ++l)
        for (Eigen::Index k = 1; k <= sg.k_max; ++k) {
            const auto& e = sg.at(l, k);
            if (!e.present) continue;
            s += "<rect x=\"" + num(margin_l + cell * static_cast<double>(k - 1)) + "\" y=\"" +
                 num(margin_t + cell * static_cast<double>(l - 1)) + "\" width=\"" + num(cell) +
                 "\" height=\"" + num(cell) + "\" fill=\"" + gray_hex(e.value) + "\"/>\n";
        }
    const Eigen::Index kstep = tick_step(sg.k_max);
    for (Eigen::Index k = kstep; k <= sg.k_max; k += kstep) {
        const double x = margin_l + cell * (static_cast<double>(k) - 0.5);
        line(s, x, margin_t + plot_h, x, margin_t + plot_h + 4);
        text(s, x, margin_t + plot_h + 16, std::to_string(k), "middle", 10);
    }
    const Eigen::Index lstep = tick_step(sg.l_max);
    for (Eigen::Index l = lstep; l <= sg.l_max; l += lstep) {
        const double y = margin_t + cell * (static_cast<double>(l) - 0.5);
        line(s, margin_l - 4, y, margin_l, y);
        text(s, margin_l - 8, y + 4, std::to_string(l), "end", 10);
    }
    text(s, margin_l + plot_w / 2, h - 8, "k", "middle", 12);
    text(s, 14, margin_t + plot_h / 2, "l", "middle", 12);
    s += "</svg>\n";
    return s;
}

std::string svg_unit_circle(const Eigen::VectorXcd& eigenvalues, const std::string& title) {
    const double half = 190, margin = 30;
    const double w = 2 * (half + margin), h = 2 * (half + margin) + 10;
    const double cx = half + margin, cy = half + margin + 10;
    double extent = 1.25;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        extent = std::max(extent, std::abs(eigenvalues(i)) * 1.1);
    const double scale = half / extent;

    std::string s;
    open_svg(s, w, h);
    text(s, w / 2, 18, title, "middle", 14);
    line(s, cx - half, cy, cx + half, cy, "#bbb");
    line(s, cx, cy - half, cx, cy + half, "#bbb");
    s += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(scale) +
         "\" fill=\"none\" stroke=\"#444\" stroke-dasharray=\"4 3\"/>\n";
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double x = cx + eigenvalues(i).real() * scale;
        const double y = cy - eigenvalues(i).imag() * scale;
        s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) +
             "\" r=\"3.5\" fill=\"none\" stroke=\"#c23\" stroke-width=\"1.5\"/>\n";
    }
    text(s, cx + scale, cy + 16, "1", "middle", 10);
    s += "</svg>\n";
    return s;
}

} // namespace gdmd
