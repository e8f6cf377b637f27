#include "coda/svg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace coda {

namespace {

const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                          "#66a61e", "#e6ab02", "#a6761d", "#666666"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string xml_escape(const std::string& s) {
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

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << v;
    return os.str();
}

struct Box {
    double xmin, xmax, ymin, ymax;
};

Box bounds(const MatrixXd& pts) {
    Box b{pts.col(0).minCoeff(), pts.col(0).maxCoeff(), pts.col(1).minCoeff(),
          pts.col(1).maxCoeff()};
    const double pad_x = std::max(1e-9, 0.08 * (b.xmax - b.xmin));
    const double pad_y = std::max(1e-9, 0.08 * (b.ymax - b.ymin));
    b.xmin -= pad_x;
    b.xmax += pad_x;
    b.ymin -= pad_y;
    b.ymax += pad_y;
    return b;
}

}  // namespace

std::string render_scatter_svg(const MatrixXd& y, const std::vector<std::string>& labels,
                               const std::vector<int>& clusters, const std::string& title) {
    const double width = 720, height = 560, margin = 50;
    const Box b = bounds(y);
    auto sx = [&](double v) {
        return margin + (v - b.xmin) / (b.xmax - b.xmin) * (width - 2 * margin);
    };
    auto sy = [&](double v) {
        return height - margin - (v - b.ymin) / (b.ymax - b.ymin) * (height - 2 * margin);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const std::size_t color = clusters.empty()
                                      ? 0
                                      : static_cast<std::size_t>(std::max(clusters[idx] - 1, 0)) %
                                            kPaletteSize;
        svg << "<circle cx=\"" << fmt(sx(y(i, 0))) << "\" cy=\"" << fmt(sy(y(i, 1)))
            << "\" r=\"5\" fill=\"" << kPalette[color] << "\"/>\n";
        if (idx < labels.size()) {
            svg << "<text x=\"" << fmt(sx(y(i, 0)) + 7) << "\" y=\"" << fmt(sy(y(i, 1)) - 4)
                << "\" font-family=\"sans-serif\" font-size=\"10\">" << xml_escape(labels[idx])
                << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_dendrogram_svg(const Dendrogram& dendrogram, const std::string& title) {
    const std::size_t n = dendrogram.leaves();
    const double width = std::max(720.0, 40.0 * static_cast<double>(n)), height = 560;
    const double margin = 60, label_zone = 110;

    // leaf order by depth-first walk from the root
    std::vector<std::size_t> order;
    std::function<void(std::size_t)> walk = [&](std::size_t id) {
        if (id < n) {
            order.push_back(id);
            return;
        }
        const auto& m = dendrogram.merges[id - n];
        walk(m.left);
        walk(m.right);
    };
    if (n == 1) {
        order.push_back(0);
    } else {
        walk(n + dendrogram.merges.size() - 1);
    }

    std::vector<double> leaf_x(n, 0.0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        leaf_x[order[i]] = margin + (width - 2 * margin) * (static_cast<double>(i) + 0.5) /
                                        static_cast<double>(n);
    }

    double max_h = 1e-12;
    for (const auto& m : dendrogram.merges) max_h = std::max(max_h, m.height);
    const double base_y = height - label_zone;
    auto sy = [&](double h) { return base_y - h / max_h * (base_y - margin); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title) << "</text>\n";

    std::vector<double> node_x(n + dendrogram.merges.size());
    std::vector<double> node_y(n + dendrogram.merges.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        node_x[i] = leaf_x[i];
        node_y[i] = 0.0;
    }
    for (std::size_t m = 0; m < dendrogram.merges.size(); ++m) {
        const auto& mg = dendrogram.merges[m];
        const double xl = node_x[mg.left], xr = node_x[mg.right];
        const double yl = sy(node_y[mg.left]), yr = sy(node_y[mg.right]);
        const double yt = sy(mg.height);
        svg << "<path d=\"M " << fmt(xl) << " " << fmt(yl) << " V " << fmt(yt) << " H " << fmt(xr)
            << " V " << fmt(yr) << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
        node_x[n + m] = 0.5 * (xl + xr);
        node_y[n + m] = mg.height;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::string label =
            i < dendrogram.leaf_labels.size() ? dendrogram.leaf_labels[i] : std::to_string(i);
        svg << "<text x=\"" << fmt(leaf_x[i]) << "\" y=\"" << fmt(base_y + 12)
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\" "
            << "transform=\"rotate(-45 " << fmt(leaf_x[i]) << " " << fmt(base_y + 12) << ")\">"
            << xml_escape(label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_biplot_svg(const PcaModel& model, const std::vector<std::string>& point_labels,
                              const std::vector<std::string>& arrow_labels,
                              const std::string& title) {
    const double width = 720, height = 640, margin = 60;
    const auto n = model.scores.rows();
    const double nm1 = std::max(static_cast<double>(model.n) - 1.0, 1.0);

    // symmetric (alpha = 0.5) scaling: split the singular value between
    // scores and loadings
    MatrixXd pts(n, 2);
    MatrixXd arrows(model.loadings_clr.rows(), 2);
    for (int c = 0; c < 2; ++c) {
        const double lambda = model.variances.size() > c ? model.variances[c] : 0.0;
        const double d = std::sqrt(std::max(lambda, 1e-300) * nm1);
        const double sd = std::sqrt(d);
        pts.col(c) = model.scores.col(c) / d * sd;
        arrows.col(c) = model.loadings_clr.col(c) * sd;
    }
    // fit arrows into the point cloud's scale
    const double pt_span = std::max(pts.cwiseAbs().maxCoeff(), 1e-12);
    const double ar_span = std::max(arrows.cwiseAbs().maxCoeff(), 1e-12);
    arrows *= 0.85 * pt_span / ar_span;

    MatrixXd all(pts.rows() + arrows.rows(), 2);
    all.topRows(pts.rows()) = pts;
    all.bottomRows(arrows.rows()) = arrows;
    const Box b = bounds(all);
    auto sx = [&](double v) {
        return margin + (v - b.xmin) / (b.xmax - b.xmin) * (width - 2 * margin);
    };
    auto sy = [&](double v) {
        return height - margin - (v - b.ymin) / (b.ymax - b.ymin) * (height - 2 * margin);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title) << "</text>\n";

    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        svg << "<circle cx=\"" << fmt(sx(pts(i, 0))) << "\" cy=\"" << fmt(sy(pts(i, 1)))
            << "\" r=\"3.5\" fill=\"#4477aa\"/>\n";
        const auto idx = static_cast<std::size_t>(i);
        if (idx < point_labels.size()) {
            svg << "<text x=\"" << fmt(sx(pts(i, 0)) + 5) << "\" y=\"" << fmt(sy(pts(i, 1)) - 3)
                << "\" font-family=\"sans-serif\" font-size=\"9\">"
                << xml_escape(point_labels[idx]) << "</text>\n";
        }
    }
    const double ox = sx(0.0), oy = sy(0.0);
    for (Eigen::Index a = 0; a < arrows.rows(); ++a) {
        const double tx = sx(arrows(a, 0)), ty = sy(arrows(a, 1));
        svg << "<line x1=\"" << fmt(ox) << "\" y1=\"" << fmt(oy) << "\" x2=\"" << fmt(tx)
            << "\" y2=\"" << fmt(ty)
            << "\" stroke=\"#cc3311\" stroke-width=\"1.5\" marker-end=\"url(#ah)\"/>\n";
        const auto idx = static_cast<std::size_t>(a);
        if (idx < arrow_labels.size()) {
            svg << "<text x=\"" << fmt(tx + 4) << "\" y=\"" << fmt(ty)
                << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#cc3311\">"
                << xml_escape(arrow_labels[idx]) << "</text>\n";
        }
    }
    svg << "<defs><marker id=\"ah\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" "
        << "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 Z\" fill=\"#cc3311\"/></marker></defs>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace coda
