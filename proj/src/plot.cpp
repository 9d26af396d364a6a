#include "chuarc/plot.hpp"

#include "chuarc/error.hpp"
#include "chuarc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace chuarc::plot {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

bool starts_with(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
    if (header.size() < names.size()) return false;
    std::size_t i = 0;
    for (const char* n : names)
        if (header[i++] != n) return false;
    return true;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    static Range of(const std::vector<double>& v) {
        Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (double x : v)
            if (std::isfinite(x)) {
                r.lo = std::min(r.lo, x);
                r.hi = std::max(r.hi, x);
            }
        if (!std::isfinite(r.lo)) return {0.0, 1.0};
        if (r.hi == r.lo) {
            const double pad = r.lo == 0.0 ? 1.0 : 0.05 * std::abs(r.lo);
            r.lo -= pad;
            r.hi += pad;
        }
        return r;
    }
};

class Canvas {
public:
    Canvas(std::string title, std::string xlabel, std::string ylabel, Range x, Range y)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), x_(x), y_(y) {}

    double sx(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
    double sy(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

    std::ostringstream body;
    std::vector<std::string> metadata;

    std::string finish() const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
           << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        os << "<metadata>";
        for (const auto& m : metadata) os << m << ';';
        os << "</metadata>\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title_
           << "</text>\n";
        os << body.str();
        axes(os);
        os << "</svg>\n";
        return os.str();
    }

private:
    void axes(std::ostringstream& os) const {
        const double x0 = kLeft;
        const double x1 = kWidth - kRight;
        const double y0 = kHeight - kBottom;
        const double y1 = kTop;
        os << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << px(x0) << "\" y=\"" << px(y1) << "\" width=\""
           << px(x1 - x0) << "\" height=\"" << px(y0 - y1) << "\"/></g>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = x_.lo + (x_.hi - x_.lo) * i / 4.0;
            const double fy = y_.lo + (y_.hi - y_.lo) * i / 4.0;
            os << "<line x1=\"" << px(sx(fx)) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(sx(fx)) << "\" y2=\""
               << px(y0 + 5) << "\" stroke=\"black\"/>";
            os << "<text x=\"" << px(sx(fx)) << "\" y=\"" << px(y0 + 18) << "\" text-anchor=\"middle\">" << num(fx)
               << "</text>\n";
            os << "<line x1=\"" << px(x0 - 5) << "\" y1=\"" << px(sy(fy)) << "\" x2=\"" << px(x0) << "\" y2=\""
               << px(sy(fy)) << "\" stroke=\"black\"/>";
            os << "<text x=\"" << px(x0 - 8) << "\" y=\"" << px(sy(fy) + 4) << "\" text-anchor=\"end\">" << num(fy)
               << "</text>\n";
        }
        os << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(kHeight - 10) << "\" text-anchor=\"middle\">"
           << xlabel_ << "</text>\n";
        os << "<text transform=\"translate(16 " << px((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
           << ylabel_ << "</text>\n";
    }

    std::string title_;
    std::string xlabel_;
    std::string ylabel_;
    Range x_;
    Range y_;
};

void digest_metadata(const io::Table& t, Canvas& c) {
    for (const auto& line : t.comments)
        if (line.rfind("config_digest=", 0) == 0) c.metadata.push_back(line);
}

std::string scatter(const io::Table& t, const std::string& xcol, const std::string& ycol, const std::string& title,
                    const std::string& group_col = "") {
    const auto xs = t.numeric(xcol);
    const auto ys = t.numeric(ycol);
    std::vector<double> groups(xs.size(), 0.0);
    if (!group_col.empty()) groups = t.numeric(group_col);
    Canvas c(title, xcol, ycol, Range::of(xs), Range::of(ys));
    digest_metadata(t, c);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
        const auto g = static_cast<std::size_t>(std::max(0.0, groups[i])) % std::size(kPalette);
        c.body << "<circle cx=\"" << px(c.sx(xs[i])) << "\" cy=\"" << px(c.sy(ys[i])) << "\" r=\"1.5\" fill=\""
               << kPalette[g] << "\"/>\n";
    }
    return c.finish();
}

std::string lines(const io::Table& t, const std::string& xcol, const std::vector<std::string>& ycols,
                  const std::string& title) {
    const auto xs = t.numeric(xcol);
    std::vector<std::vector<double>> series;
    std::vector<double> all;
    for (const auto& yc : ycols) {
        series.push_back(t.numeric(yc));
        all.insert(all.end(), series.back().begin(), series.back().end());
    }
    Canvas c(title, xcol, ycols.size() == 1 ? ycols[0] : "value", Range::of(xs), Range::of(all));
    digest_metadata(t, c);
    // Long traces are decimated to at most ~4000 vertices per series.
    const std::size_t stride = std::max<std::size_t>(1, xs.size() / 4000);
    for (std::size_t k = 0; k < series.size(); ++k) {
        c.body << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << kPalette[k % std::size(kPalette)]
               << "\" points=\"";
        for (std::size_t i = 0; i < xs.size(); i += stride) c.body << px(c.sx(xs[i])) << ',' << px(c.sy(series[k][i])) << ' ';
        c.body << "\"/>\n";
        c.body << "<text x=\"" << px(kWidth - kRight - 60) << "\" y=\"" << px(kTop + 14 + 14.0 * static_cast<double>(k))
               << "\" fill=\"" << kPalette[k % std::size(kPalette)] << "\">" << ycols[k] << "</text>\n";
    }
    return c.finish();
}

std::string color(double f) {
    f = std::clamp(f, 0.0, 1.0);
    // dark blue -> teal -> yellow
    const double r = f < 0.5 ? 40 + 2 * f * (30 - 40) : 30 + (f - 0.5) * 2 * (250 - 30);
    const double g = f < 0.5 ? 30 + 2 * f * (160 - 30) : 160 + (f - 0.5) * 2 * (230 - 160);
    const double b = f < 0.5 ? 110 + 2 * f * (150 - 110) : 150 + (f - 0.5) * 2 * (40 - 150);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(r), static_cast<int>(g), static_cast<int>(b));
    return buf;
}

std::string heatmap(const io::Table& t) {
    const auto rs = t.numeric("r_ohms");
    const auto vs = t.numeric("v_center");
    const auto zs = t.numeric("mean_nmse");
    std::vector<double> ys = rs;
    std::string ylabel = "r_ohms";
    if (t.column("n_mask") >= 0) {
        const auto ms = t.numeric("n_mask");
        if (std::set<double>(rs.begin(), rs.end()).size() == 1 && std::set<double>(ms.begin(), ms.end()).size() > 1) {
            ys = ms;
            ylabel = "n_mask";
        }
    }
    const std::set<double> xset(vs.begin(), vs.end());
    const std::set<double> yset(ys.begin(), ys.end());
    const std::vector<double> xv(xset.begin(), xset.end());
    const std::vector<double> yv(yset.begin(), yset.end());
    const double dx = xv.size() > 1 ? (xv.back() - xv.front()) / static_cast<double>(xv.size() - 1) : 1.0;
    const double dy = yv.size() > 1 ? (yv.back() - yv.front()) / static_cast<double>(yv.size() - 1) : 1.0;
    Canvas c("mean NMSE", "v_center", ylabel, {xv.front() - dx / 2, xv.back() + dx / 2},
             {yv.front() - dy / 2, yv.back() + dy / 2});
    digest_metadata(t, c);
    const Range zr = Range::of(zs);
    c.metadata.push_back("nmse_range=" + io::fmt(zr.lo) + "," + io::fmt(zr.hi));
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double x0 = c.sx(vs[i] - dx / 2);
        const double x1 = c.sx(vs[i] + dx / 2);
        const double y0 = c.sy(ys[i] + dy / 2);
        const double y1 = c.sy(ys[i] - dy / 2);
        const std::string fill = std::isfinite(zs[i]) ? color((zs[i] - zr.lo) / (zr.hi - zr.lo)) : "#bbbbbb";
        c.body << "<rect x=\"" << px(x0) << "\" y=\"" << px(y0) << "\" width=\"" << px(x1 - x0) << "\" height=\""
               << px(y1 - y0) << "\" fill=\"" << fill << "\"><title>" << num(zs[i]) << "</title></rect>\n";
    }
    return c.finish();
}

std::string histogram(const io::Table& t) {
    const auto all = t.numeric("nmse");
    const int split = t.column("split");
    std::vector<double> v;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (split < 0 || t.rows[i][static_cast<std::size_t>(split)] == "validation") v.push_back(all[i]);
    constexpr std::size_t kBins = 20;
    const double hi = v.empty() ? 1.0 : std::max(*std::max_element(v.begin(), v.end()), 1e-12);
    std::vector<double> edges(kBins + 1);
    for (std::size_t b = 0; b <= kBins; ++b) edges[b] = hi * static_cast<double>(b) / kBins;
    std::vector<double> counts(kBins, 0.0);
    for (double x : v) counts[std::min(kBins - 1, static_cast<std::size_t>(x / hi * kBins))] += 1.0;
    const double top = counts.empty() ? 1.0 : std::max(1.0, *std::max_element(counts.begin(), counts.end()));
    Canvas c("validation NMSE", "NMSE", "cases", {0.0, hi}, {0.0, top});
    digest_metadata(t, c);
    std::string e = "bin_edges=";
    for (std::size_t b = 0; b <= kBins; ++b) e += (b ? "," : "") + io::fmt(edges[b]);
    c.metadata.push_back(e);
    for (std::size_t b = 0; b < kBins; ++b) {
        const double x0 = c.sx(edges[b]);
        const double x1 = c.sx(edges[b + 1]);
        const double y0 = c.sy(counts[b]);
        c.body << "<rect x=\"" << px(x0) << "\" y=\"" << px(y0) << "\" width=\"" << px(x1 - x0) << "\" height=\""
               << px(c.sy(0.0) - y0) << "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
    }
    return c.finish();
}

}  // namespace

Kind detect(const std::string& csv_text) {
    const auto t = io::parse_csv(csv_text);
    const auto& h = t.header;
    if (starts_with(h, {"param", "extremum_value"})) return Kind::scatter;
    if (starts_with(h, {"x", "y_teacher"}) || starts_with(h, {"x", "y", "class"})) return Kind::scatter;
    if (starts_with(h, {"x1", "x2", "sum", "product", "modlin"})) return Kind::scatter;
    if (starts_with(h, {"t", "V_CD", "V_L"}) || starts_with(h, {"t", "ch_0"})) return Kind::line;
    if (starts_with(h, {"freq_hz", "magnitude"})) return Kind::line;
    if (starts_with(h, {"r_ohms", "v_center", "mean_nmse"})) return Kind::heatmap;
    if (starts_with(h, {"index", "split"}) && t.column("nmse") >= 0) return Kind::histogram;
    std::string joined;
    for (const auto& s : h) joined += (joined.empty() ? "" : ",") + s;
    throw ParseError("plot: unknown CSV schema '" + joined + "'");
}

std::string render(const std::string& csv_text, const std::string& title) {
    detect(csv_text);
    const auto t = io::parse_csv(csv_text);
    const auto& h = t.header;
    auto name = [&](const char* fallback) { return title.empty() ? std::string(fallback) : title; };
    if (starts_with(h, {"param", "extremum_value"})) return scatter(t, "param", "extremum_value", name("bifurcation"));
    if (starts_with(h, {"x", "y_teacher"})) return scatter(t, "x", "y_teacher", name("teacher"));
    if (starts_with(h, {"x", "y", "class"})) return scatter(t, "x", "y", name("classes"), "class");
    if (starts_with(h, {"x1", "x2"})) return scatter(t, "x1", "x2", name("pair inputs"));
    if (starts_with(h, {"t", "V_CD", "V_L"})) return lines(t, "t", {"V_CD", "V_L"}, name("trace"));
    if (starts_with(h, {"t", "ch_0"})) {
        std::vector<std::string> cols(h.begin() + 1, h.end());
        if (cols.size() > std::size(kPalette)) cols.resize(std::size(kPalette));
        return lines(t, "t", cols, name("states"));
    }
    if (starts_with(h, {"freq_hz", "magnitude"})) return lines(t, "freq_hz", {"magnitude"}, name("spectrum"));
    if (starts_with(h, {"r_ohms", "v_center", "mean_nmse"})) return heatmap(t);
    return histogram(t);
}

void render_plot(const std::string& csv_path, const std::string& svg_path) {
    io::write_file(svg_path, render(io::read_file(csv_path)));
}

}  // namespace chuarc::plot
