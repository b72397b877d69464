#include "genflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace genflow {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

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

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
};

std::string header(const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f2(kWidth) + "\" height=\"" +
           f2(kHeight) + "\" viewBox=\"0 0 " + f2(kWidth) + " " + f2(kHeight) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           "<text x=\"" + f2(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(title) + "</text>\n";
}

std::string axes(const Frame& f, const std::vector<double>& xticks,
                 const std::vector<double>& yticks, const std::string& xlabel,
                 const std::string& ylabel, int xdigits) {
    std::string s;
    s += "<g stroke=\"black\" fill=\"none\">\n";
    s += "<line x1=\"" + f2(f.px(f.x0)) + "\" y1=\"" + f2(f.py(f.y0)) + "\" x2=\"" + f2(f.px(f.x1)) +
         "\" y2=\"" + f2(f.py(f.y0)) + "\"/>\n";
    s += "<line x1=\"" + f2(f.px(f.x0)) + "\" y1=\"" + f2(f.py(f.y0)) + "\" x2=\"" + f2(f.px(f.x0)) +
         "\" y2=\"" + f2(f.py(f.y1)) + "\"/>\n";
    s += "</g>\n";
    char buf[32];
    for (double x : xticks) {
        std::snprintf(buf, sizeof buf, "%.*f", xdigits, x);
        s += "<text x=\"" + f2(f.px(x)) + "\" y=\"" + f2(f.py(f.y0) + 16) +
             "\" text-anchor=\"middle\">" + buf + "</text>\n";
    }
    for (double y : yticks) {
        s += "<line x1=\"" + f2(f.px(f.x0) - 4) + "\" y1=\"" + f2(f.py(y)) + "\" x2=\"" +
             f2(f.px(f.x0)) + "\" y2=\"" + f2(f.py(y)) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + f2(f.px(f.x0) - 8) + "\" y=\"" + f2(f.py(y) + 4) +
             "\" text-anchor=\"end\">" + f2(y) + "</text>\n";
    }
    s += "<text x=\"" + f2((f.px(f.x0) + f.px(f.x1)) / 2) + "\" y=\"" + f2(kHeight - 18) +
         "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
    s += "<text x=\"18\" y=\"" + f2((f.py(f.y0) + f.py(f.y1)) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         f2((f.py(f.y0) + f.py(f.y1)) / 2) + ")\">" + escape(ylabel) + "</text>\n";
    return s;
}

std::string legend_entry(int i, const std::string& color, const std::string& label) {
    const double x = kWidth - kRight + 16, y = kTop + 10 + 20.0 * i;
    return "<line x1=\"" + f2(x) + "\" y1=\"" + f2(y) + "\" x2=\"" + f2(x + 24) + "\" y2=\"" +
           f2(y) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n<text x=\"" + f2(x + 30) +
           "\" y=\"" + f2(y + 4) + "\">" + escape(label) + "</text>\n";
}

}  // namespace

std::string dimension_plot_svg(const DimSweepResult& dims, const std::string& title) {
    std::size_t d = 1;
    double lo = 1.0, hi = 0.0;
    for (const auto& c : dims.curves) {
        d = std::max(d, c.accuracy.size());
        for (double a : c.accuracy) {
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
    }
    if (lo > hi) lo = 0.0, hi = 1.0;
    lo = std::max(0.0, std::floor(lo * 20 - 1e-9) / 20);
    hi = std::min(1.0, std::ceil(hi * 20 + 1e-9) / 20);
    if (hi - lo < 0.05) hi = std::min(1.0, lo + 0.05), lo = hi - 0.05;
    const Frame f{1.0, d > 1 ? static_cast<double>(d) : 2.0, lo, hi};

    std::vector<double> xt, yt;
    const std::size_t step = d <= 12 ? 1 : (d + 9) / 10;
    for (std::size_t k = 1; k <= d; k += step) xt.push_back(static_cast<double>(k));
    for (int i = 0; i <= 5; ++i) yt.push_back(lo + (hi - lo) * i / 5.0);

    std::string s = header(title + ": accuracy vs number of top features");
    s += axes(f, xt, yt, "number of top-ranked features", "cross-validated accuracy", 0);
    int i = 0;
    for (const auto& c : dims.curves) {
        const std::string color = kColors[i % 5];
        s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < c.accuracy.size(); ++k) {
            if (k) s += ' ';
            s += f2(f.px(static_cast<double>(k + 1))) + "," + f2(f.py(c.accuracy[k]));
        }
        s += "\"/>\n";
        s += legend_entry(i, color, std::string(to_string(c.method)));
        ++i;
    }
    s += "</svg>\n";
    return s;
}

std::string roc_plot_svg(const std::vector<RocPoint>& roc, double auc, const std::string& title) {
    const Frame f{0.0, 1.0, 0.0, 1.0};
    std::vector<double> ticks;
    for (int i = 0; i <= 5; ++i) ticks.push_back(i / 5.0);
    std::string s = header(title + ": ROC (AUC " + f2(auc) + ")");
    s += axes(f, ticks, ticks, "false positive rate", "true positive rate", 1);
    s += "<line x1=\"" + f2(f.px(0)) + "\" y1=\"" + f2(f.py(0)) + "\" x2=\"" + f2(f.px(1)) +
         "\" y2=\"" + f2(f.py(1)) + "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    s += "<polyline fill=\"none\" stroke=\"" + std::string(kColors[0]) +
         "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < roc.size(); ++i) {
        if (i) s += ' ';
        s += f2(f.px(roc[i].fpr)) + "," + f2(f.py(roc[i].tpr));
    }
    s += "\"/>\n";
    s += legend_entry(0, kColors[0], "model");
    s += legend_entry(1, "gray", "chance");
    s += "</svg>\n";
    return s;
}

}  // namespace genflow
