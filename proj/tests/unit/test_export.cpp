#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "elastica/export.hpp"
#include "elastica/svg.hpp"

using namespace elastica;

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t count(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator());
}

BranchPoint point(double tau, double xi, double ordinate, int index) {
  BranchPoint p;
  p.tau = tau;
  p.xi = xi;
  p.ordinate = ordinate;
  p.index = index;
  p.state = straight_state(Mesh(5), {});
  return p;
}

BranchArtifact line_artifact() {
  BranchArtifact a;
  a.config.name = "line";
  Branch b;
  b.kind = OrdinateKind::Psi;
  for (int i = 0; i < 5; ++i) b.points.push_back(point(i, 0.1 * i, 1.0 + i, 0));
  a.branches.push_back(b);
  a.seeds.emplace_back();
  return a;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, kPi, -1e-300, 123456789.123456789, 2.0 / 3.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(BranchCsv, RoundTripsEveryColumn) {
  const ElasticaParams p{kPi * kPi / 4, 0.1, 0.5, kPi / 2, 0.2};
  Branch b;
  b.kind = OrdinateKind::Theta0;
  b.params = p;
  for (int i = 0; i < 3; ++i) {
    BranchPoint pt;
    pt.tau = 0.1 * i + 1.0 / 3.0;
    pt.xi = 0.2;
    std::vector<double> theta(11);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = 0.2 + 0.01 * i * k * k;
    pt.state = make_state(Mesh(11), theta, p);
    pt.ordinate = ordinate(pt.state, p, b.kind);
    pt.index = i;
    b.points.push_back(pt);
  }
  std::stringstream ss;
  write_branch_csv(ss, b);
  const auto rows = read_branch_csv(ss);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BranchPoint& pt = b.points[i];
    EXPECT_EQ(rows[i].tau, pt.tau);
    EXPECT_EQ(rows[i].ordinate, pt.ordinate);
    EXPECT_EQ(rows[i].index, pt.index);
    EXPECT_EQ(rows[i].theta1, pt.state.theta.back());
    EXPECT_EQ(rows[i].theta_prime_1, pt.state.theta_prime_1);
    EXPECT_EQ(rows[i].energy, pt.state.energy);
    // The clamp-angle ordinate is the clamp slope column.
    EXPECT_EQ(rows[i].ordinate, rows[i].theta_prime_0);
  }
}

TEST(BranchCsv, EmptyBranchIsHeaderOnly) {
  std::stringstream ss;
  write_branch_csv(ss, Branch{});
  EXPECT_EQ(ss.str(), "tau,xi,ordinate,index,theta0,theta1,theta_prime_0,theta_prime_1,x1,y1,energy\n");
  EXPECT_TRUE(read_branch_csv(ss).empty());
}

TEST(BranchCsv, RejectsMalformedRows) {
  std::stringstream bad("tau,xi\n1,2\n");
  EXPECT_THROW(read_branch_csv(bad), std::runtime_error);
  std::stringstream short_row("tau,xi,ordinate,index,theta0,theta1,theta_prime_0,theta_prime_1,x1,y1,energy\n1,2,3\n");
  EXPECT_THROW(read_branch_csv(short_row), std::runtime_error);
}

TEST(FoldsCsv, HasSpecifiedColumns) {
  Branch b;
  FoldRecord f;
  f.verdict = Verdict::Pass;
  f.mu_at_fold = 1e-9;
  b.folds.push_back(f);
  std::stringstream ss;
  write_folds_csv(ss, b);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "tau_star,xi_star,xi_ddot_sign,ordinate_slope_sign,index_before,index_after,mu_min_at_fold,verdict");
  EXPECT_NE(row.find(",pass"), std::string::npos);
}

TEST(DerivedCsv, ReducesAnglesModuloTwoPi) {
  Branch b;
  b.kind = OrdinateKind::Alpha;
  b.points.push_back(point(0, 7.0, 0, 0));
  b.points.push_back(point(1, -1.0, 0, 0));
  std::stringstream ss;
  write_derived_csv(ss, b);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "tau,xi_mod_2pi,predicted_index");
  std::getline(ss, line);
  EXPECT_NEAR(std::stod(line.substr(line.find(',') + 1)), 7.0 - 2 * kPi, 1e-15);
  std::getline(ss, line);
  EXPECT_NEAR(std::stod(line.substr(line.find(',') + 1)), 2 * kPi - 1.0, 1e-15);
}

TEST(Svg, SingleStableSegmentIsOnePath) {
  const std::string svg = render_svg(line_artifact());
  EXPECT_EQ(count(svg, "<path class=\"stable\""), 1u);
  EXPECT_EQ(count(svg, "<path class=\"unstable\""), 0u);
  EXPECT_EQ(count(svg, "<circle class=\"fold\""), 0u);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(Svg, TwoFoldsSplitIntoThreePaths) {
  BranchArtifact a;
  a.config.name = "s";
  Branch b;
  b.kind = OrdinateKind::Psi;
  const double xs[] = {0.0, 1.0, 2.0, 1.5, 1.0, 2.0, 3.0};
  const int idx[] = {0, 0, 0, 1, 1, 0, 0};
  for (int i = 0; i < 7; ++i) b.points.push_back(point(i, xs[i], i, idx[i]));
  for (std::size_t at : {2u, 4u}) {
    FoldRecord f;
    f.kind = SingularityKind::Fold;
    f.prev_point = at;
    f.next_point = at + 1;
    f.xi_star = at == 2 ? 2.1 : 0.9;
    f.at_fold = point(at + 0.5, f.xi_star, at + 0.5, 0);
    b.folds.push_back(f);
  }
  a.branches.push_back(b);
  a.seeds.emplace_back();
  const std::string svg = render_svg(a);
  EXPECT_EQ(count(svg, "<path class="), 3u);
  EXPECT_EQ(count(svg, "<path class=\"unstable\""), 1u);
  EXPECT_EQ(count(svg, "<circle class=\"fold\""), 2u);
}

TEST(Artifact, WritesManifestAndValidates) {
  const auto dir = std::filesystem::temp_directory_path() / "elastica_export_test";
  std::filesystem::remove_all(dir);
  const WrittenArtifact w = write_artifact(line_artifact(), dir.string(), true);
  ASSERT_TRUE(std::filesystem::exists(w.manifest));
  EXPECT_TRUE(std::filesystem::exists(dir / "line.svg"));
  EXPECT_TRUE(std::filesystem::exists(dir / "line_b0.csv"));
  std::ifstream in(w.manifest);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("format"), "elastica-branch-artifact");
  EXPECT_EQ(j.at("branches").size(), 1u);
  const ValidationSummary v = validate_manifest(w.manifest);
  EXPECT_EQ(v.folds, 0);
  EXPECT_EQ(v.mismatch, 0);
  std::filesystem::remove_all(dir);
}
