#include "growthcast/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "growthcast/csv.hpp"
#include "growthcast/num.hpp"

namespace growthcast {

RegressionResult fit_regression(const std::vector<PairedObservation>& observations) {
    const long n = long(observations.size());
    if (n < 2) throw DataError("fit_regression: need at least 2 observations");
    double mx = 0.0, my = 0.0;
    for (const auto& o : observations) {
        mx += o.reference_area_px;
        my += o.generated_area_px;
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& o : observations) {
        double dx = o.reference_area_px - mx;
        sxx += dx * dx;
        sxy += dx * (o.generated_area_px - my);
    }
    if (sxx <= 0.0) throw DataError("fit_regression: reference values are all equal");

    RegressionResult r;
    r.n = n;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& o : observations) {
        double fit = r.slope * o.reference_area_px + r.intercept;
        ss_res += (o.generated_area_px - fit) * (o.generated_area_px - fit);
        ss_tot += (o.generated_area_px - my) * (o.generated_area_px - my);
    }
    r.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
    return r;
}

std::vector<StageStats> stage_statistics(const std::vector<TraitRecord>& records,
                                         bool group_by_treatment) {
    if (records.empty()) throw DataError("stage_statistics: no records");
    std::map<std::pair<int, int>, std::vector<double>> groups;
    for (const auto& r : records) {
        int t = group_by_treatment ? int(r.treatment) : int(Treatment::None);
        groups[{r.stage, t}].push_back(double(r.projected_leaf_area_px));
    }
    std::vector<StageStats> out;
    for (const auto& [key, areas] : groups) {
        StageStats s;
        s.stage = key.first;
        s.treatment = Treatment(key.second);
        s.n = long(areas.size());
        double mean = 0.0;
        for (double a : areas) mean += a;
        mean /= double(areas.size());
        double var = 0.0;
        for (double a : areas) var += (a - mean) * (a - mean);
        var /= double(areas.size());  // population divisor
        s.mean_area_px = mean;
        s.std_area_px = std::sqrt(var);
        out.push_back(s);
    }
    return out;  // map iteration is already (stage, treatment)-sorted
}

std::string regression_annotation(const RegressionResult& r) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "y = %.2fx %s %.2f, R² = %.2f", r.slope,
                  r.intercept < 0 ? "-" : "+", std::abs(r.intercept), r.r_squared);
    return buf;
}

namespace {

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

const std::map<std::string, std::string> kGroupColors = {
    {"i+f+", "#1f77b4"}, {"i+f-", "#2ca02c"}, {"i-f+", "#ff7f0e"},
    {"i-f-", "#d62728"}, {"none", "#555555"}, {"pooled", "#555555"}};

std::string group_color(const std::string& group) {
    auto it = kGroupColors.find(group);
    return it == kGroupColors.end() ? "#555555" : it->second;
}

// Maps data coordinates into one SVG panel.
struct Scale {
    double x0, x1, y0, y1;          // data range
    double px0, px1, py0, py1;      // pixel range (py0 is the bottom)
    double x(double v) const { return px0 + (v - x0) / (x1 - x0) * (px1 - px0); }
    double y(double v) const { return py0 - (v - y0) / (y1 - y0) * (py0 - py1); }
};

void svg_axes(std::ostream& os, const Scale& s, const std::string& x_label,
              const std::string& y_label) {
    os << "<line x1=\"" << fmt2(s.px0) << "\" y1=\"" << fmt2(s.py0) << "\" x2=\"" << fmt2(s.px1)
       << "\" y2=\"" << fmt2(s.py0) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt2(s.px0) << "\" y1=\"" << fmt2(s.py0) << "\" x2=\"" << fmt2(s.px0)
       << "\" y2=\"" << fmt2(s.py1) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = s.x0 + (s.x1 - s.x0) * i / 4.0;
        double fy = s.y0 + (s.y1 - s.y0) * i / 4.0;
        os << "<text x=\"" << fmt2(s.x(fx)) << "\" y=\"" << fmt2(s.py0 + 16)
           << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt2(fx) << "</text>\n";
        os << "<text x=\"" << fmt2(s.px0 - 6) << "\" y=\"" << fmt2(s.y(fy) + 3)
           << "\" font-size=\"10\" text-anchor=\"end\">" << fmt2(fy) << "</text>\n";
    }
    os << "<text x=\"" << fmt2((s.px0 + s.px1) / 2) << "\" y=\"" << fmt2(s.py0 + 32)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"" << fmt2(s.px0 - 44) << "\" y=\"" << fmt2((s.py0 + s.py1) / 2)
       << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " << fmt2(s.px0 - 44)
       << " " << fmt2((s.py0 + s.py1) / 2) << ")\">" << y_label << "</text>\n";
}

void write_scatter_svg(const std::filesystem::path& path, const std::string& group,
                       const std::vector<PairedObservation>& points,
                       const RegressionResult& reg) {
    double hi = 1.0;
    for (const auto& p : points)
        hi = std::max({hi, p.reference_area_px, p.generated_area_px});
    hi *= 1.05;
    Scale s{0, hi, 0, hi, 60, 600, 420, 20};

    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path.string());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
          "viewBox=\"0 0 640 480\">\n";
    os << "<text x=\"320\" y=\"14\" font-size=\"13\" text-anchor=\"middle\">projected leaf area, "
       << group << "</text>\n";
    svg_axes(os, s, "reference area [px]", "generated area [px]");
    // identity line
    os << "<line x1=\"" << fmt2(s.x(0)) << "\" y1=\"" << fmt2(s.y(0)) << "\" x2=\""
       << fmt2(s.x(hi)) << "\" y2=\"" << fmt2(s.y(hi))
       << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    // fitted line, clipped to the x range
    double ya = reg.slope * 0 + reg.intercept;
    double yb = reg.slope * hi + reg.intercept;
    os << "<line x1=\"" << fmt2(s.x(0)) << "\" y1=\"" << fmt2(s.y(std::clamp(ya, 0.0, hi)))
       << "\" x2=\"" << fmt2(s.x(hi)) << "\" y2=\"" << fmt2(s.y(std::clamp(yb, 0.0, hi)))
       << "\" stroke=\"black\"/>\n";
    for (const auto& p : points)
        os << "<circle cx=\"" << fmt2(s.x(p.reference_area_px)) << "\" cy=\""
           << fmt2(s.y(p.generated_area_px)) << "\" r=\"2.5\" fill=\"" << group_color(group)
           << "\" fill-opacity=\"0.6\"/>\n";
    os << "<text x=\"70\" y=\"36\" font-size=\"12\">" << regression_annotation(reg)
       << "</text>\n";
    os << "</svg>\n";
}

void write_growth_svg(const std::filesystem::path& path,
                      const std::vector<StageStats>& reference,
                      const std::vector<StageStats>& generated,
                      const std::string& stage_unit) {
    int stage_lo = 1 << 30, stage_hi = -(1 << 30);
    double area_hi = 1.0;
    for (const auto* series : {&reference, &generated})
        for (const auto& st : *series) {
            stage_lo = std::min(stage_lo, st.stage);
            stage_hi = std::max(stage_hi, st.stage);
            area_hi = std::max(area_hi, st.mean_area_px + st.std_area_px);
        }
    if (stage_hi < stage_lo) throw DataError("growth curves: no stats");
    if (stage_hi == stage_lo) stage_hi = stage_lo + 1;
    area_hi *= 1.05;

    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path.string());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"480\" "
          "viewBox=\"0 0 960 480\">\n";
    Scale panels[2] = {{double(stage_lo), double(stage_hi), 0, area_hi, 60, 450, 420, 30},
                       {double(stage_lo), double(stage_hi), 0, area_hi, 540, 930, 420, 30}};
    const char* titles[2] = {"reference", "generated"};
    const std::vector<StageStats>* series[2] = {&reference, &generated};
    for (int p = 0; p < 2; ++p) {
        const Scale& s = panels[p];
        os << "<text x=\"" << fmt2((s.px0 + s.px1) / 2)
           << "\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">" << titles[p]
           << "</text>\n";
        svg_axes(os, s, "stage [" + stage_unit + "]", "mean area [px]");
        std::map<Treatment, std::vector<const StageStats*>> lines;
        for (const auto& st : *series[p]) lines[st.treatment].push_back(&st);
        for (auto& [treatment, pts] : lines) {
            std::string color = group_color(to_string(treatment));
            std::ostringstream poly;
            for (const auto* st : pts)
                poly << fmt2(s.x(st->stage)) << "," << fmt2(s.y(st->mean_area_px)) << " ";
            os << "<polyline points=\"" << poly.str() << "\" fill=\"none\" stroke=\"" << color
               << "\" stroke-width=\"1.5\"/>\n";
            for (const auto* st : pts) {
                double x = s.x(st->stage);
                os << "<line x1=\"" << fmt2(x) << "\" y1=\""
                   << fmt2(s.y(std::max(0.0, st->mean_area_px - st->std_area_px))) << "\" x2=\""
                   << fmt2(x) << "\" y2=\"" << fmt2(s.y(st->mean_area_px + st->std_area_px))
                   << "\" stroke=\"" << color << "\"/>\n";
                os << "<circle cx=\"" << fmt2(x) << "\" cy=\"" << fmt2(s.y(st->mean_area_px))
                   << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
            }
        }
    }
    // legend
    int ly = 40;
    for (const auto& [name, color] : kGroupColors) {
        if (name == "pooled" || name == "none") continue;
        os << "<rect x=\"468\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\"" << color
           << "\"/>\n<text x=\"482\" y=\"" << ly << "\" font-size=\"11\">" << name
           << "</text>\n";
        ly += 16;
    }
    os << "</svg>\n";
}

nlohmann::ordered_json stats_json(const std::vector<StageStats>& stats) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : stats)
        arr.push_back({{"stage", s.stage},
                       {"treatment", to_string(s.treatment)},
                       {"mean_area_px", s.mean_area_px},
                       {"std_area_px", s.std_area_px},
                       {"n", s.n}});
    return arr;
}

}  // namespace

void render_report(const ReportInputs& inputs, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    nlohmann::ordered_json summary;
    summary["std_divisor"] = "n";
    summary["center_fraction"] = inputs.center_fraction;
    summary["stage_unit"] = inputs.stage_unit;

    nlohmann::ordered_json regs;
    for (const auto& [group, reg] : inputs.regressions) {
        regs[group] = {{"slope", reg.slope},
                       {"intercept", reg.intercept},
                       {"r_squared", reg.r_squared},
                       {"n", reg.n},
                       {"annotation", regression_annotation(reg)}};
    }
    summary["regressions"] = std::move(regs);
    summary["skipped"] = inputs.skipped_groups;
    summary["stage_stats"] = {{"reference", stats_json(inputs.reference_stats)},
                              {"generated", stats_json(inputs.generated_stats)}};
    if (inputs.fid) {
        const auto& f = *inputs.fid;
        summary["fid"] = {{"fid_rg", f.fid_rg},     {"fid_rt", f.fid_rt},
                          {"fid_gt", f.fid_gt},     {"n_r", f.n_r},
                          {"n_g", f.n_g},           {"n_t", f.n_t},
                          {"regularized", f.regularized},
                          {"verdict", fid::fid_verdict(f)}};
    } else {
        summary["fid"] = nullptr;
    }
    nlohmann::ordered_json zero_stages = nlohmann::ordered_json::array();
    for (const auto& [stage, count] : inputs.training_pairs_per_stage)
        if (count == 0) zero_stages.push_back(stage);
    summary["stages_without_training_pairs"] = std::move(zero_stages);

    {
        std::ofstream os(out_dir / "summary.json", std::ios::binary);
        if (!os) throw DataError("cannot write " + (out_dir / "summary.json").string());
        os << summary.dump(2) << "\n";
    }

    for (const auto& [group, reg] : inputs.regressions) {
        auto pts_it = inputs.scatter_points.find(group);
        if (pts_it == inputs.scatter_points.end()) continue;
        write_scatter_svg(out_dir / ("scatter_" + group + ".svg"), group, pts_it->second, reg);
        csv::Table table;
        table.header = {"reference_area_px", "generated_area_px", "stage", "treatment"};
        for (const auto& p : pts_it->second)
            table.rows.push_back({format_double(p.reference_area_px),
                                  format_double(p.generated_area_px), std::to_string(p.stage),
                                  to_string(p.treatment)});
        csv::write_file(out_dir / ("scatter_" + group + ".csv"), table);
    }

    if (!inputs.reference_stats.empty() || !inputs.generated_stats.empty()) {
        write_growth_svg(out_dir / "growth_curves.svg", inputs.reference_stats,
                         inputs.generated_stats, inputs.stage_unit);
        csv::Table table;
        table.header = {"series", "stage", "treatment", "mean_area_px", "std_area_px", "n"};
        for (auto [series, stats] :
             {std::pair{"reference", &inputs.reference_stats}, {"generated", &inputs.generated_stats}})
            for (const auto& s : *stats)
                table.rows.push_back({series, std::to_string(s.stage), to_string(s.treatment),
                                      format_double(s.mean_area_px), format_double(s.std_area_px),
                                      std::to_string(s.n)});
        csv::write_file(out_dir / "growth_curves.csv", table);
    }
}

}  // namespace growthcast
