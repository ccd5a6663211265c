#include "dipde/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dipde {

namespace {

constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<')
            o += "&lt;";
        else if (c == '>')
            o += "&gt;";
        else if (c == '&')
            o += "&amp;";
        else
            o += c;
    }
    return o;
}

}  // namespace

std::string log_plot_svg(const std::vector<SvgSeries>& series, const std::string& title, const std::string& xlabel,
                         const std::string& ylabel) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    Eigen::Index n = 1;
    for (const auto& s : series) {
        n = std::max(n, s.mean.size());
        for (Eigen::Index i = 0; i < s.mean.size(); ++i) {
            const double sd = s.std.size() == s.mean.size() ? s.std[i] : 0.0;
            for (double v : {s.mean[i], s.mean[i] - sd, s.mean[i] + sd})
                if (v > 0 && std::isfinite(v)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
        }
    }
    if (!(hi > 0)) lo = 1e-12, hi = 1.0;
    double ylo = std::floor(std::log10(lo)), yhi = std::ceil(std::log10(hi));
    if (yhi <= ylo) yhi = ylo + 1;
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto X = [&](double i) { return kLeft + pw * (n > 1 ? i / (n - 1) : 0.0); };
    auto Y = [&](double v) {
        const double l = std::log10(std::max(v, lo));
        return kTop + ph * (1.0 - (l - ylo) / (yhi - ylo));
    };

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
    for (int d = static_cast<int>(ylo); d <= static_cast<int>(yhi); ++d) {
        const double y = Y(std::pow(10.0, d));
        os << "<line x1=\"" << kLeft << "\" x2=\"" << kW - kRight << "\" y1=\"" << y << "\" y2=\"" << y
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    for (int k = 0; k <= 5; ++k) {
        const double i = (n - 1) * k / 5.0;
        os << "<text x=\"" << X(i) << "\" y=\"" << kH - kBottom + 18 << "\" text-anchor=\"middle\">"
           << static_cast<long>(std::lround(i)) << "</text>\n";
    }
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">" << esc(xlabel)
       << "</text>\n";
    os << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << esc(ylabel) << "</text>\n";

    int legend = 0;
    for (const auto& s : series) {
        const Eigen::Index m = s.mean.size();
        if (m == 0) continue;
        if (s.std.size() == m) {
            os << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
            for (Eigen::Index i = 0; i < m; ++i) os << X(i) << ',' << Y(s.mean[i] + s.std[i]) << ' ';
            for (Eigen::Index i = m; i-- > 0;) os << X(i) << ',' << Y(s.mean[i] - s.std[i]) << ' ';
            os << "\"/>\n";
        }
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (Eigen::Index i = 0; i < m; ++i) os << X(i) << ',' << Y(s.mean[i]) << ' ';
        os << "\"/>\n";
        const double ly = kTop + 14 + 16 * legend++;
        os << "<line x1=\"" << kLeft + 10 << "\" x2=\"" << kLeft + 30 << "\" y1=\"" << ly << "\" y2=\"" << ly
           << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kLeft + 36 << "\" y=\"" << ly + 4 << "\">" << esc(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace dipde
