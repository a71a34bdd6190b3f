#include "elastica/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elastica/export.hpp"

namespace elastica {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

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

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

// Round tick spacing covering [lo, hi] with about n intervals.
double nice_step(double lo, double hi, int n) {
  const double raw = (hi - lo) / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

struct Run {
  std::vector<std::pair<double, double>> pts;
  bool stable = false;
};

}  // namespace

std::string render_svg(const BranchArtifact& artifact, const SvgStyle& style) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const Branch& b : artifact.branches) {
    for (const BranchPoint& p : b.points) {
      xmin = std::min(xmin, p.xi);
      xmax = std::max(xmax, p.xi);
      ymin = std::min(ymin, p.ordinate);
      ymax = std::max(ymax, p.ordinate);
    }
  }
  if (!(xmin <= xmax)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double W = style.width, H = style.height, M = style.margin;
  auto X = [&](double x) { return M + (x - xmin) / (xmax - xmin) * (W - 2 * M); };
  auto Y = [&](double y) { return H - M - (y - ymin) / (ymax - ymin) * (H - 2 * M); };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\"" << fmt(H)
    << "\" viewBox=\"0 0 " << fmt(W) << ' ' << fmt(H) << "\">\n";
  s << "<style>path.stable{stroke-width:2;fill:none}path.unstable{stroke-width:1.5;fill:none;stroke-dasharray:6 4}"
       "circle.fold{fill:#fff;stroke:#000;stroke-width:1.2}text{font-family:sans-serif;font-size:12px}"
       "polyline.rod{fill:none;stroke:#333;stroke-width:1.5}</style>\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << fmt(W) << "\" height=\"" << fmt(H) << "\" fill=\"#fff\"/>\n";
  if (!style.title.empty()) {
    s << "<text x=\"" << fmt(W / 2) << "\" y=\"" << fmt(M / 2) << "\" text-anchor=\"middle\">" << escape(style.title)
      << "</text>\n";
  }

  // Axes and ticks.
  s << "<g class=\"axes\" stroke=\"#000\">\n";
  s << "<line x1=\"" << fmt(M) << "\" y1=\"" << fmt(H - M) << "\" x2=\"" << fmt(W - M) << "\" y2=\"" << fmt(H - M) << "\"/>\n";
  s << "<line x1=\"" << fmt(M) << "\" y1=\"" << fmt(M) << "\" x2=\"" << fmt(M) << "\" y2=\"" << fmt(H - M) << "\"/>\n";
  s << "</g>\n<g class=\"ticks\">\n";
  const double dx = nice_step(xmin, xmax, 8);
  for (double t = std::ceil(xmin / dx) * dx; t <= xmax + 1e-12; t += dx) {
    s << "<text x=\"" << fmt(X(t)) << "\" y=\"" << fmt(H - M + 18) << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
  }
  const double dy = nice_step(ymin, ymax, 6);
  for (double t = std::ceil(ymin / dy) * dy; t <= ymax + 1e-12; t += dy) {
    s << "<text x=\"" << fmt(M - 6) << "\" y=\"" << fmt(Y(t) + 4) << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
  }
  const std::string xname = artifact.branches.empty() ? std::string("xi") : std::string(to_string(artifact.branches.front().kind));
  s << "<text x=\"" << fmt(W / 2) << "\" y=\"" << fmt(H - M / 3) << "\" text-anchor=\"middle\">" << escape(xname)
    << "</text>\n";
  s << "<text x=\"" << fmt(M / 3) << "\" y=\"" << fmt(H / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
    << fmt(M / 3) << ' ' << fmt(H / 2) << ")\">ordinate</text>\n";
  s << "</g>\n";

  for (std::size_t bi = 0; bi < artifact.branches.size(); ++bi) {
    const Branch& b = artifact.branches[bi];
    const char* color = kPalette[bi % std::size(kPalette)];
    std::vector<Run> runs;
    std::size_t next_fold = 0;
    for (std::size_t i = 0; i < b.points.size(); ++i) {
      const BranchPoint& p = b.points[i];
      const bool stable = p.index == 0;
      if (runs.empty() || runs.back().stable != stable) {
        Run r;
        r.stable = stable;
        if (!runs.empty()) r.pts.push_back(runs.back().pts.back());
        runs.push_back(std::move(r));
      }
      runs.back().pts.emplace_back(p.xi, p.ordinate);
      while (next_fold < b.folds.size() && b.folds[next_fold].prev_point == i) {
        const FoldRecord& f = b.folds[next_fold++];
        if (f.kind != SingularityKind::Fold || f.at_fold.state.theta.empty()) continue;
        const std::pair<double, double> fp{f.xi_star, f.at_fold.ordinate};
        runs.back().pts.push_back(fp);
        Run r;
        r.stable = stable;
        r.pts.push_back(fp);
        runs.push_back(std::move(r));
      }
    }
    s << "<g class=\"branch\" id=\"branch" << bi << "\" stroke=\"" << color << "\">\n";
    for (const Run& r : runs) {
      if (r.pts.size() < 2) continue;
      s << "<path class=\"" << (r.stable ? "stable" : "unstable") << "\" d=\"";
      for (std::size_t k = 0; k < r.pts.size(); ++k) {
        s << (k ? " L" : "M") << fmt(X(r.pts[k].first)) << ',' << fmt(Y(r.pts[k].second));
      }
      s << "\"/>\n";
    }
    s << "</g>\n";
  }

  s << "<g class=\"folds\">\n";
  for (const Branch& b : artifact.branches) {
    for (const FoldRecord& f : b.folds) {
      if (f.kind != SingularityKind::Fold || f.at_fold.state.theta.empty()) continue;
      s << "<circle class=\"fold\" cx=\"" << fmt(X(f.xi_star)) << "\" cy=\"" << fmt(Y(f.at_fold.ordinate))
        << "\" r=\"4\"><title>fold " << escape(std::string(to_string(b.kind))) << " = " << format_double(f.xi_star) << ", index "
        << f.index_before << " to " << f.index_after << "</title></circle>\n";
    }
  }
  s << "</g>\n";

  // Centerline glyphs above each labeled point.
  s << "<g class=\"insets\">\n";
  const double size = style.inset_size;
  for (const LabeledShape& sh : artifact.shapes) {
    if (sh.centerline.size() < 2) continue;
    double cx0 = INFINITY, cx1 = -INFINITY, cy0 = INFINITY, cy1 = -INFINITY;
    for (const Point2& p : sh.centerline) {
      cx0 = std::min(cx0, p.x);
      cx1 = std::max(cx1, p.x);
      cy0 = std::min(cy0, p.y);
      cy1 = std::max(cy1, p.y);
    }
    const double span = std::max({cx1 - cx0, cy1 - cy0, 1e-9});
    const double px = X(sh.xi);
    const double py = Y(sh.ordinate);
    const double ox = std::clamp(px - size / 2, 0.0, W - size);
    const double oy = std::clamp(py - size - 14, 0.0, H - size);
    s << "<g class=\"inset\"><line x1=\"" << fmt(px) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(ox + size / 2)
      << "\" y2=\"" << fmt(oy + size) << "\" stroke=\"#999\" stroke-width=\"0.6\"/>";
    s << "<rect x=\"" << fmt(ox) << "\" y=\"" << fmt(oy) << "\" width=\"" << fmt(size) << "\" height=\"" << fmt(size)
      << "\" fill=\"#fff\" stroke=\"#ccc\"/><polyline class=\"rod\" points=\"";
    for (std::size_t k = 0; k < sh.centerline.size(); ++k) {
      const double u = ox + 4 + (sh.centerline[k].x - cx0) / span * (size - 8);
      const double v = oy + 4 + (cy1 - sh.centerline[k].y) / span * (size - 8);
      s << (k ? " " : "") << fmt(u) << ',' << fmt(v);
    }
    s << "\"/><text x=\"" << fmt(ox + 2) << "\" y=\"" << fmt(oy + 11) << "\">" << sh.index << "</text></g>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace elastica
