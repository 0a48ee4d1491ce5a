#include "cdsurf/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cdsurf/fit.hpp"

namespace cdsurf {

namespace {

namespace fs = std::filesystem;

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

struct DataPoint {
    double x = 0, y = 0, yerr = 0;
};

struct Curve {
    std::string label;
    std::vector<DataPoint> points;
};

struct Panel {
    std::string title;
    std::string xlabel, ylabel;
    bool log_y = false;
    std::vector<Curve> curves;
};

// ---- minimal SVG rendering ----------------------------------------------

struct Extent {
    double lo = 0, hi = 1;
};

Extent nice_extent(double lo, double hi, bool log_scale) {
    if (log_scale) {
        lo = std::log10(lo);
        hi = std::log10(hi);
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.06 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::string svg_render(const std::vector<Panel>& panels) {
    const double pw = 360, ph = 300, margin_l = 58, margin_b = 44, margin_t = 28, margin_r = 14;
    const double width = pw * panels.size(), height = ph;
    static const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const double x0 = pi * pw + margin_l, x1 = (pi + 1) * pw - margin_r;
        const double y0 = ph - margin_b, y1 = margin_t;

        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& c : panel.curves) {
            for (const auto& pt : c.points) {
                xmin = std::min(xmin, pt.x);
                xmax = std::max(xmax, pt.x);
                const double ylo = panel.log_y ? std::max(pt.y - pt.yerr, pt.y * 0.3) : pt.y - pt.yerr;
                if (pt.y > 0 || !panel.log_y) {
                    ymin = std::min(ymin, panel.log_y ? std::max(ylo, 1e-12) : ylo);
                    ymax = std::max(ymax, pt.y + pt.yerr);
                }
            }
        }
        if (xmin > xmax) {
            xmin = 0;
            xmax = 1;
            ymin = 0.1;
            ymax = 1;
        }
        const Extent ex = nice_extent(xmin, xmax, false);
        const Extent ey = nice_extent(std::max(ymin, 1e-12), std::max(ymax, 1e-12), panel.log_y);

        auto sx = [&](double x) { return x0 + (x - ex.lo) / (ex.hi - ex.lo) * (x1 - x0); };
        auto sy = [&](double y) {
            const double v = panel.log_y ? std::log10(std::max(y, 1e-12)) : y;
            return y0 + (v - ey.lo) / (ey.hi - ey.lo) * (y1 - y0);
        };

        svg << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
            << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"16\" text-anchor=\"middle\">" << panel.title
            << "</text>\n";
        svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << ph - 10 << "\" text-anchor=\"middle\">"
            << panel.xlabel << "</text>\n";
        svg << "<text x=\"" << pi * pw + 14 << "\" y=\"" << (y0 + y1) / 2
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << pi * pw + 14 << ' '
            << (y0 + y1) / 2 << ")\">" << panel.ylabel << "</text>\n";

        // Ticks: 5 linear divisions, or decades when logarithmic.
        for (int t = 0; t <= 4; ++t) {
            const double fx = ex.lo + (ex.hi - ex.lo) * t / 4.0;
            svg << "<line x1=\"" << sx(fx) << "\" y1=\"" << y0 << "\" x2=\"" << sx(fx) << "\" y2=\""
                << y0 + 4 << "\" stroke=\"black\"/>\n";
            std::ostringstream lab;
            lab.precision(4);
            lab << fx;
            svg << "<text x=\"" << sx(fx) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
                << lab.str() << "</text>\n";
        }
        if (panel.log_y) {
            for (int e = static_cast<int>(std::floor(ey.lo)); e <= static_cast<int>(std::ceil(ey.hi)); ++e) {
                const double y = std::pow(10.0, e);
                const double py = sy(y);
                if (py > y0 || py < y1) continue;
                svg << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
                    << "\" stroke=\"black\"/>\n";
                svg << "<text x=\"" << x0 - 6 << "\" y=\"" << py + 3
                    << "\" text-anchor=\"end\">1e" << e << "</text>\n";
            }
        } else {
            for (int t = 0; t <= 4; ++t) {
                const double fy = ey.lo + (ey.hi - ey.lo) * t / 4.0;
                const double py = y0 + (fy - ey.lo) / (ey.hi - ey.lo) * (y1 - y0);
                std::ostringstream lab;
                lab.precision(3);
                lab << fy;
                svg << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
                    << "\" stroke=\"black\"/>\n";
                svg << "<text x=\"" << x0 - 6 << "\" y=\"" << py + 3 << "\" text-anchor=\"end\">"
                    << lab.str() << "</text>\n";
            }
        }

        for (std::size_t ci = 0; ci < panel.curves.size(); ++ci) {
            const auto& curve = panel.curves[ci];
            const char* color = colors[ci % 8];
            std::ostringstream poly;
            for (const auto& pt : curve.points) {
                if (panel.log_y && pt.y <= 0) continue;
                poly << sx(pt.x) << ',' << sy(pt.y) << ' ';
                const double lo = pt.y - pt.yerr, hi = pt.y + pt.yerr;
                if (pt.yerr > 0 && (!panel.log_y || lo > 0)) {
                    svg << "<line x1=\"" << sx(pt.x) << "\" y1=\"" << sy(std::max(lo, 1e-12))
                        << "\" x2=\"" << sx(pt.x) << "\" y2=\"" << sy(hi) << "\" stroke=\"" << color
                        << "\"/>\n";
                }
                svg << "<circle cx=\"" << sx(pt.x) << "\" cy=\"" << sy(pt.y) << "\" r=\"2.6\" fill=\""
                    << color << "\"/>\n";
            }
            svg << "<polyline points=\"" << poly.str() << "\" fill=\"none\" stroke=\"" << color
                << "\"/>\n";
            svg << "<text x=\"" << x0 + 8 << "\" y=\"" << y1 + 14 + 13 * ci << "\" fill=\"" << color
                << "\">" << curve.label << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

// ---- recipe machinery -----------------------------------------------------

struct RowFilter {
    std::string family;
    std::string metric;
    std::function<bool(const CsvRow&)> extra;

    bool matches(const CsvRow& r) const {
        if (!family.empty() && r.family != family) return false;
        if (!metric.empty() && r.metric != metric) return false;
        return !extra || extra(r);
    }
};

std::vector<CsvRow> select(const std::vector<CsvRow>& rows, const RowFilter& f) {
    std::vector<CsvRow> out;
    for (const auto& r : rows) {
        if (f.matches(r)) out.push_back(r);
    }
    return out;
}

std::string sanitize(std::string s) {
    for (auto& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    }
    return s;
}

struct FigureBuilder {
    const std::vector<CsvRow>& rows;
    std::string recipe;
    fs::path out_dir;
    std::vector<std::string> written;
    std::vector<std::string> missing;
    std::vector<Panel> panels;

    // Curve of p_fail vs d at fixed p.
    void curve_vs_d(Panel& panel, const RowFilter& filter, double p, const std::string& label) {
        auto sel = select(rows, filter);
        std::erase_if(sel, [&](const CsvRow& r) { return !near(r.p, p); });
        add_curve(panel, sel, label, /*x_is_d=*/true);
    }

    void curve_vs_p(Panel& panel, const RowFilter& filter, int d, const std::string& label) {
        auto sel = select(rows, filter);
        std::erase_if(sel, [&](const CsvRow& r) { return r.d1 != d || r.d2 != d; });
        add_curve(panel, sel, label, /*x_is_d=*/false);
    }

    void add_curve(Panel& panel, std::vector<CsvRow>& sel, const std::string& label, bool x_is_d) {
        if (sel.empty()) {
            missing.push_back(panel.title + " / " + label);
            return;
        }
        Curve c;
        c.label = label;
        std::map<double, std::pair<double, double>> pts;  // x -> (y, err), last write wins
        for (const auto& r : sel) {
            const double x = x_is_d ? static_cast<double>(std::min(r.d1, r.d2)) : r.p;
            pts[x] = {r.p_fail, r.stderr_};
        }
        for (const auto& [x, ye] : pts) c.points.push_back({x, ye.first, ye.second});
        panel.curves.push_back(std::move(c));
    }

    void write_curve_files() {
        for (const auto& panel : panels) {
            for (const auto& curve : panel.curves) {
                const fs::path path =
                    out_dir / (recipe + "_" + sanitize(panel.title) + "_" + sanitize(curve.label) + ".dat");
                std::ofstream out(path);
                out << "# " << panel.xlabel << "  p_fail  stderr\n";
                for (const auto& pt : curve.points) {
                    out << pt.x << ' ' << pt.y << ' ' << pt.yerr << "\n";
                }
                written.push_back(path.string());
            }
        }
    }

    void finish() {
        if (!missing.empty()) {
            std::string msg = "missing sweeps for recipe " + recipe + ":";
            for (const auto& m : missing) msg += "\n  - " + m;
            throw MissingSweepError(msg);
        }
        fs::create_directories(out_dir);
        write_curve_files();
        const fs::path svg_path = out_dir / (recipe + ".svg");
        std::ofstream out(svg_path);
        out << svg_render(panels);
        written.push_back(svg_path.string());
    }
};

RowFilter gaussian_filter(const std::string& family, const std::string& metric, double sigma_p,
                          double sigma_tot) {
    return {family, metric, [sigma_p, sigma_tot](const CsvRow& r) {
                return near(r.sigma_p, sigma_p) && near(r.sigma_tot, sigma_tot);
            }};
}

// Threshold point extracted from near-threshold rows of one (family, metric,
// sigma) combination.
double fit_threshold_from_rows(const std::vector<CsvRow>& sel) {
    std::vector<CurvePoint> pts;
    double lo = 1.0, hi = 0.0;
    for (const auto& r : sel) {
        pts.push_back({std::min(r.d1, r.d2), r.p, r.p_fail, r.stderr_, r.trials});
        lo = std::min(lo, r.p);
        hi = std::max(hi, r.p);
    }
    const auto fit = fit_threshold(pts, {lo, hi});
    return fit.p_th;
}

}  // namespace

std::vector<std::string> figure_recipes() {
    return {"fig5a", "fig5b", "fig7", "fig9", "fig10", "fig11", "fig12", "fig13"};
}

std::vector<std::string> render_figure(const std::string& recipe, const std::string& results_dir,
                                       const std::string& out_dir) {
    const auto rows = read_csv_dir(results_dir);
    FigureBuilder fb{rows, recipe, fs::path(out_dir), {}, {}, {}};

    if (recipe == "fig5a") {
        Panel panel{"subthreshold_tailored", "d", "p_fail", true, {}};
        for (const char* fam : {"css", "mmhh"}) {
            for (double sp : {0.125, 0.5}) {
                fb.curve_vs_d(panel, gaussian_filter(fam, "manhattan", sp, 0.5), 0.1,
                              std::string(fam) + " sigma_p=" + (sp == 0.5 ? "0.5" : "0.125"));
            }
        }
        fb.panels.push_back(std::move(panel));
    } else if (recipe == "fig5b") {
        Panel panel{"subthreshold_decoder", "d", "p_fail", true, {}};
        for (const char* metric : {"weighted_manhattan", "dijkstra"}) {
            for (double st : {0.25, 0.5}) {
                fb.curve_vs_d(panel, gaussian_filter("mhhm", metric, 0.5, st), 0.1,
                              std::string(metric) + " sigma_tot=" + (st == 0.5 ? "0.5" : "0.25"));
            }
        }
        fb.panels.push_back(std::move(panel));
    } else if (recipe == "fig7") {
        Panel panel{"correlated_noise", "d", "p_fail", true, {}};
        for (const char* metric : {"manhattan", "degeneracy", "degeneracy_correlation"}) {
            RowFilter f{"xzzx", metric, [](const CsvRow& r) { return r.pair_kind == "xz"; }};
            fb.curve_vs_d(panel, f, 0.125, metric);
        }
        fb.panels.push_back(std::move(panel));
    } else if (recipe == "fig9" || recipe == "fig11") {
        const bool dijkstra = recipe == "fig11";
        for (double st : {0.5, 0.0}) {
            for (const char* fam : {"css", "mmhh", "mhhm"}) {
                const std::string metric = dijkstra ? "dijkstra"
                                           : std::string(fam) == "mhhm" ? "weighted_manhattan"
                                                                        : "manhattan";
                Panel panel{std::string(fam) + "_sigma_tot_" + (st == 0.5 ? "0.5" : "0"), "p", "p_fail",
                            false, {}};
                auto sel = select(rows, gaussian_filter(fam, metric, 0.5, st));
                std::set<int> ds;
                for (const auto& r : sel) ds.insert(std::min(r.d1, r.d2));
                if (ds.empty()) {
                    fb.missing.push_back(panel.title + " / " + metric);
                } else {
                    for (int d : ds) {
                        fb.curve_vs_p(panel, gaussian_filter(fam, metric, 0.5, st), d,
                                      "d=" + std::to_string(d));
                    }
                }
                fb.panels.push_back(std::move(panel));
            }
        }
    } else if (recipe == "fig10" || recipe == "fig12") {
        // Threshold summaries: fig10 scans sigma_p at fixed sigma_tot=0.5,
        // fig12 scans sigma_tot for the MMHH code under both metrics.
        Panel panel{recipe == "fig10" ? "thresholds_vs_sigma_p" : "thresholds_vs_sigma_tot",
                    recipe == "fig10" ? "sigma_p" : "sigma_tot", "p_th", false, {}};
        const std::vector<std::string> fams =
            recipe == "fig10" ? std::vector<std::string>{"css", "mmhh"} : std::vector<std::string>{"mmhh"};
        const std::vector<std::string> metrics =
            recipe == "fig10" ? std::vector<std::string>{"manhattan"}
                              : std::vector<std::string>{"manhattan", "dijkstra"};
        for (const auto& fam : fams) {
            for (const auto& metric : metrics) {
                std::map<double, std::vector<CsvRow>> by_sigma;
                for (const auto& r : rows) {
                    if (r.family != fam || r.metric != metric) continue;
                    by_sigma[recipe == "fig10" ? r.sigma_p : r.sigma_tot].push_back(r);
                }
                if (by_sigma.empty()) {
                    fb.missing.push_back(panel.title + " / " + fam + " " + metric);
                    continue;
                }
                Curve c;
                c.label = fam + " " + metric;
                for (const auto& [sigma, sel] : by_sigma) {
                    c.points.push_back({sigma, fit_threshold_from_rows(sel), 0.0});
                }
                panel.curves.push_back(std::move(c));
            }
        }
        fb.panels.push_back(std::move(panel));
    } else if (recipe == "fig13") {
        struct PanelSpec {
            const char* title;
            Layout layout;
            bool pair;
            double p;
        };
        const PanelSpec specs[] = {{"nonrotated_single", Layout::NonRotated, false, 0.1},
                                   {"rotated_single", Layout::Rotated, false, 0.1},
                                   {"nonrotated_pair", Layout::NonRotated, true, 0.1},
                                   {"rotated_pair", Layout::Rotated, true, 0.05}};
        for (const auto& ps : specs) {
            Panel panel{ps.title, "d", "p_fail", true, {}};
            // The CSV schema carries no layout column; fig13 sweeps are
            // identified by their file names instead.
            const std::string tag = std::string("fig13_") +
                                    (ps.layout == Layout::Rotated ? "rot_" : "nonrot_") +
                                    (ps.pair ? "pair" : "single");
            for (const char* metric : {"manhattan", "degeneracy_literal"}) {
                RowFilter f{"css", metric, [&](const CsvRow& r) {
                                const bool pair = r.pair_kind != "none";
                                return pair == ps.pair && r.source.find(tag) != std::string::npos;
                            }};
                fb.curve_vs_d(panel, f, ps.p, metric);
            }
            fb.panels.push_back(std::move(panel));
        }
    } else {
        throw std::invalid_argument("unknown figure recipe '" + recipe + "'");
    }

    fb.finish();
    return fb.written;
}

}  // namespace cdsurf
