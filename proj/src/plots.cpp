#include "lapeig/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lapeig::plots {

namespace {

void require(const io::CsvTable& t, std::initializer_list<const char*> names)
{
    std::string missing;
    for (const char* n : names) {
        if (t.column(n) < 0) {
            if (!missing.empty())
                missing += ", ";
            missing += n;
        }
    }
    if (!missing.empty())
        throw std::invalid_argument("missing columns: " + missing);
    if (t.rows.empty())
        throw std::invalid_argument("missing columns: table has no rows");
}

std::string num(double v)
{
    return io::format_double(std::abs(v) < 1e-300 ? 0.0 : v);
}

// Fixed-size canvas with a linear data window.
class Canvas {
public:
    static constexpr double width = 640, height = 400, margin = 50;

    Canvas(std::string title, double x0, double x1, double y0, double y1) : title_(std::move(title))
    {
        if (!(x1 > x0)) {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if (!(y1 > y0)) {
            y0 -= 0.5;
            y1 += 0.5;
        }
        x0_ = x0;
        x1_ = x1;
        y0_ = y0;
        y1_ = y1;
    }

    double px(double x) const { return margin + (x - x0_) / (x1_ - x0_) * (width - 2 * margin); }
    double py(double y) const { return height - margin - (y - y0_) / (y1_ - y0_) * (height - 2 * margin); }

    void dot(double x, double y, const char* color, double r = 2.0)
    {
        body_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << r << "\" fill=\"" << color
              << "\"/>\n";
    }

    void ring(double x, double y, const char* color)
    {
        body_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"none\" stroke=\""
              << color << "\"/>\n";
    }

    void segment(double xa, double ya, double xb, double yb, const char* color)
    {
        body_ << "<line x1=\"" << num(px(xa)) << "\" y1=\"" << num(py(ya)) << "\" x2=\"" << num(px(xb))
              << "\" y2=\"" << num(py(yb)) << "\" stroke=\"" << color << "\"/>\n";
    }

    void polyline(const std::vector<double>& x, const std::vector<double>& y, const char* color,
                  const std::string& cls)
    {
        body_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i)
            body_ << (i ? " " : "") << num(px(x[i])) << "," << num(py(y[i]));
        body_ << "\"/>\n";
    }

    /// Path given in data coordinates, mapped by a group transform.
    void data_path(const std::string& d, const char* color, const std::string& cls)
    {
        const double sx = (width - 2 * margin) / (x1_ - x0_);
        const double sy = (height - 2 * margin) / (y1_ - y0_);
        const double tx = margin - x0_ * sx;
        const double ty = height - margin + y0_ * sy;
        body_ << "<g transform=\"matrix(" << num(sx) << " 0 0 " << num(-sy) << " " << num(tx) << " " << num(ty)
              << ")\">\n<path class=\"" << cls << "\" d=\"" << d << "\" fill=\"none\" stroke=\"" << color
              << "\" vector-effect=\"non-scaling-stroke\"/>\n</g>\n";
    }

    void legend(int row, const std::string& text, const char* color)
    {
        const double y = margin + 14 * row;
        body_ << "<rect x=\"" << width - margin - 150 << "\" y=\"" << y - 8 << "\" width=\"10\" height=\"10\" fill=\""
              << color << "\"/><text x=\"" << width - margin - 135 << "\" y=\"" << y << "\" font-size=\"11\">" << text
              << "</text>\n";
    }

    std::string str(const std::string& xlabel, const std::string& ylabel) const
    {
        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
          << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
        s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        s << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title_
          << "</text>\n";
        s << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
          << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
        s << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
          << xlabel << "</text>\n";
        s << "<text x=\"14\" y=\"" << height / 2 << "\" transform=\"rotate(-90 14 " << height / 2
          << ")\" text-anchor=\"middle\" font-size=\"12\">" << ylabel << "</text>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = x0_ + (x1_ - x0_) * i / 4.0, fy = y0_ + (y1_ - y0_) * i / 4.0;
            s << "<text x=\"" << num(px(fx)) << "\" y=\"" << height - margin + 14
              << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(fx) << "</text>\n";
            s << "<text x=\"" << margin - 4 << "\" y=\"" << num(py(fy) + 3)
              << "\" text-anchor=\"end\" font-size=\"10\">" << tick(fy) << "</text>\n";
        }
        s << body_.str() << "</svg>\n";
        return s.str();
    }

private:
    static std::string tick(double v)
    {
        std::ostringstream s;
        s.precision(3);
        s << v;
        return s.str();
    }

    std::string title_;
    double x0_, x1_, y0_, y1_;
    std::ostringstream body_;
};

std::pair<double, double> range(const std::vector<double>& v)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : v) {
        if (std::isfinite(x)) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    if (!std::isfinite(lo))
        return {0.0, 1.0};
    return {lo, hi};
}

std::vector<double> log10_positive(const std::vector<double>& v)
{
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) {
        return x > 0 ? std::log10(x) : std::numeric_limits<double>::quiet_NaN();
    });
    return out;
}

std::vector<std::size_t> order_by(const std::vector<double>& key)
{
    std::vector<std::size_t> idx(key.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    return idx;
}

} // namespace

std::string pairing_scatter(const io::CsvTable& pairing)
{
    require(pairing, {"k_nodal", "lambda_paired"});
    const auto lam = pairing.values("lambda_paired");
    const auto nodal = pairing.values("k_nodal");
    const auto idx = order_by(lam);
    auto [lo, hi] = range(lam);
    auto [nlo, nhi] = range(nodal);
    Canvas c("eigenvalues and paired nodal values", 1, static_cast<double>(lam.size()), std::min(lo, nlo),
             std::max(hi, nhi));
    for (std::size_t s = 0; s < idx.size(); ++s) {
        c.dot(s + 1.0, lam[idx[s]], "red");
        c.ring(s + 1.0, nodal[idx[s]], "blue");
    }
    c.legend(0, "eigenvalue", "red");
    c.legend(1, "nodal value", "blue");
    return c.str("index", "value");
}

std::string interval_whiskers(const io::CsvTable& pairing)
{
    require(pairing, {"kmin", "kmax", "lambda_paired"});
    const auto lam = pairing.values("lambda_paired");
    const auto kmin = pairing.values("kmin");
    const auto kmax = pairing.values("kmax");
    const auto idx = order_by(lam);
    const double lo = range(kmin).first, hi = range(kmax).second;
    Canvas c("eigenvalues in their support intervals", 1, static_cast<double>(lam.size()), lo, hi);
    for (std::size_t s = 0; s < idx.size(); ++s) {
        c.segment(s + 1.0, kmin[idx[s]], s + 1.0, kmax[idx[s]], "black");
        c.dot(s + 1.0, lam[idx[s]], "red");
    }
    return c.str("index", "value");
}

std::string gap_vs_bound(const io::CsvTable& bounds)
{
    require(bounds, {"gap", "loose_bound", "taylor1"});
    const auto gap = log10_positive(bounds.values("gap"));
    const auto loose = log10_positive(bounds.values("loose_bound"));
    const auto taylor = log10_positive(bounds.values("taylor1"));
    const auto idx = order_by(bounds.values("loose_bound"));
    std::vector<double> all = gap;
    all.insert(all.end(), loose.begin(), loose.end());
    all.insert(all.end(), taylor.begin(), taylor.end());
    auto [lo, hi] = range(all);
    Canvas c("gap and bounds (log10)", 1, static_cast<double>(gap.size()), lo, hi);
    for (std::size_t s = 0; s < idx.size(); ++s) {
        const std::size_t j = idx[s];
        if (std::isfinite(taylor[j]))
            c.ring(s + 1.0, taylor[j], "green");
        if (std::isfinite(loose[j]))
            c.dot(s + 1.0, loose[j], "black", 1.5);
        if (std::isfinite(gap[j]))
            c.dot(s + 1.0, gap[j], "red");
    }
    c.legend(0, "gap", "red");
    c.legend(1, "loose bound", "black");
    c.legend(2, "first Taylor term", "green");
    return c.str("dof (by loose bound)", "log10");
}

std::string convergence_curves(const std::vector<std::pair<std::string, io::CsvTable>>& traces)
{
    if (traces.empty())
        throw std::invalid_argument("missing columns: no traces");
    static const char* colors[] = {"blue", "red", "green", "black"};
    double xmax = 1, ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> series;
    for (const auto& [name, t] : traces) {
        require(t, {"iter", "rel_energy_error"});
        const auto it = t.values("iter");
        const auto err = log10_positive(t.values("rel_energy_error"));
        std::vector<double> x, y;
        for (std::size_t i = 0; i < it.size(); ++i) {
            if (std::isfinite(err[i])) {
                x.push_back(it[i]);
                y.push_back(err[i]);
            }
        }
        auto [lo, hi] = range(y);
        ylo = std::min(ylo, lo);
        yhi = std::max(yhi, hi);
        if (!x.empty())
            xmax = std::max(xmax, x.back());
        series.emplace_back(std::move(x), std::move(y));
    }
    Canvas c("relative energy error (log10)", 0, xmax, ylo, yhi);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % 4];
        c.polyline(series[s].first, series[s].second, color, "trace");
        c.legend(static_cast<int>(s), traces[s].first, color);
    }
    return c.str("iteration", "log10 error");
}

std::string distribution_steps(const io::CsvTable& distribution)
{
    require(distribution, {"lambda", "cumulative"});
    const auto lam = distribution.values("lambda");
    const auto cum = distribution.values("cumulative");
    auto [lo, hi] = range(lam);
    const double pad = 0.02 * std::max(hi - lo, 1e-3);
    Canvas c("distribution function", lo - pad, hi + pad, 0.0, 1.0);
    std::ostringstream d;
    d << "M " << num(lo - pad) << " 0";
    for (std::size_t i = 0; i < lam.size(); ++i)
        d << " H " << num(lam[i]) << " V " << num(cum[i]);
    d << " H " << num(hi + pad);
    c.data_path(d.str(), "blue", "step");
    return c.str("lambda", "cumulative weight");
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    std::vector<fs::path> out;
    auto write = [&](const std::string& name, const std::string& svg) {
        const fs::path p = dir / name;
        std::ofstream(p) << svg;
        out.push_back(p);
    };
    if (fs::exists(dir / "pairing.csv")) {
        const auto t = io::read_csv((dir / "pairing.csv").string());
        write("pairing.svg", pairing_scatter(t));
        write("intervals.svg", interval_whiskers(t));
    }
    if (fs::exists(dir / "bounds.csv"))
        write("bounds.svg", gap_vs_bound(io::read_csv((dir / "bounds.csv").string())));

    std::vector<std::pair<std::string, io::CsvTable>> traces;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        const std::string stem = p.stem().string();
        if (p.extension() != ".csv")
            continue;
        if (stem.rfind("trace_", 0) == 0)
            traces.emplace_back(stem.substr(6), io::read_csv(p.string()));
        else if (stem.rfind("distribution_", 0) == 0)
            write(stem + ".svg", distribution_steps(io::read_csv(p.string())));
    }
    if (!traces.empty())
        write("convergence.svg", convergence_curves(traces));
    return out;
}

} // namespace lapeig::plots
