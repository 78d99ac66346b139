#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "catch_amalgamated.hpp"

#include "singmin/cone_field.hpp"
#include "singmin/field_ops.hpp"
#include "singmin/geometry.hpp"

using namespace singmin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string write_mask(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST_CASE("disk and rectangle volumes approach the continuum values", "[geometry]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  CHECK(disk->volume() >= 0.98 * std::numbers::pi);
  CHECK(disk->volume() <= 1.02 * std::numbers::pi);

  const auto square = make_domain(ShapeSpec::rect(1.0, 1.0, 64));
  CHECK(square->volume() >= 0.96);
  CHECK(square->volume() <= 1.0 + 1e-12);
}

TEST_CASE("weights are positive and sum to the triangulated volume", "[geometry]") {
  for (const auto& spec : {ShapeSpec::disk(1.0, 40), ShapeSpec::rect(1.0, 0.5, 40), ShapeSpec::lshape(1, 1, 0.5, 40)}) {
    const auto d = make_domain(spec);
    double sum = 0.0;
    for (double w : d->weights()) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK_THAT(sum, WithinRel(d->volume(), 1e-12));
    CHECK_THAT(d->volume(), WithinRel(d->triangles().size() * d->triangle_area(), 1e-12));
    CHECK(static_cast<int>(d->weights().size()) == d->interior_count());
  }
}

TEST_CASE("every interior node lies in a triangle and non-interior unknowns are -1", "[geometry]") {
  const auto d = make_domain(ShapeSpec::lshape(1.0, 1.0, 0.4, 32));
  std::vector<int> touched(d->node_count(), 0);
  for (const auto& t : d->triangles())
    for (int n : t.nodes()) {
      CHECK(d->kind(n) != NodeKind::exterior);
      ++touched[n];
    }
  for (int n = 0; n < d->node_count(); ++n) {
    if (d->kind(n) == NodeKind::interior) {
      CHECK(touched[n] == 6);
      CHECK(d->unknown_of(n) >= 0);
    } else {
      CHECK(d->unknown_of(n) == -1);
    }
  }
}

TEST_CASE("mask files: an all-exterior mask and a missing file are rejected", "[geometry]") {
  const auto empty = write_mask("singmin_empty_mask.txt", "....\n....\n....\n");
  CHECK_THROWS_AS(make_domain(ShapeSpec::mask_file(empty, 0.1)), ConstructionError);
  CHECK_THROWS_AS(make_domain(ShapeSpec::mask_file("/nonexistent/singmin_mask.txt", 0.1)), IoError);

  const auto block = write_mask("singmin_block_mask.txt", "......\n.####.\n.####.\n.####.\n.####.\n......\n");
  const auto d = make_domain(ShapeSpec::mask_file(block, 0.25));
  CHECK_THAT(d->volume(), WithinRel(0.75 * 0.75, 1e-12));
  CHECK(d->interior_count() == 4);
}

TEST_CASE("scale_domain multiplies the volume by t^2", "[geometry]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 48));
  const auto twice = scale_domain(*disk, 2.0);
  CHECK(twice->volume() / disk->volume() == 4.0);
  CHECK(twice->interior_count() == disk->interior_count());

  const auto same = scale_domain(*disk, 1.0);
  CHECK(same->volume() == disk->volume());
  CHECK(same->h() == disk->h());
  CHECK(same->mask() == disk->mask());

  const auto square = make_domain(ShapeSpec::rect(1.0, 1.0, 32));
  CHECK_THAT(scale_domain(*square, 0.5)->volume(), WithinRel(0.25, 1e-14));

  CHECK_THROWS_AS(scale_domain(*disk, 0.0), ArgumentError);
  CHECK_THROWS_AS(scale_domain(*disk, -1.0), ArgumentError);
}

TEST_CASE("normalize_volume produces a unit-volume copy", "[geometry]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 48));
  CHECK_THAT(normalize_volume(*disk)->volume(), WithinRel(1.0, 1e-13));
  CHECK_THAT(normalize_volume(*disk, 3.0)->volume(), WithinRel(3.0, 1e-13));
}

TEST_CASE("Schwarz radius of the equal-volume ball", "[geometry]") {
  const auto square = make_domain(ShapeSpec::rect(1.0, 1.0, 64));
  CHECK_THAT(schwarz_radius(*square), WithinAbs(1.0 / std::sqrt(std::numbers::pi), 1e-3));

  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  CHECK_THAT(schwarz_radius(*disk), WithinRel(1.0, 0.01));
  CHECK_THAT(schwarz_radius(*scale_domain(*disk, 2.0)), WithinRel(2.0 * schwarz_radius(*disk), 1e-13));
}

TEST_CASE("cone field on the disk approximates 1 - |x|", "[geometry][cone]") {
  const auto d = make_domain(ShapeSpec::disk(1.0, 64));
  const auto rho = cone_field(d);
  double err = 0.0;
  int ones = 0;
  for (int n = 0; n < d->node_count(); ++n) {
    if (d->kind(n) != NodeKind::interior) {
      CHECK(rho[n] == 0.0);
      continue;
    }
    const Point x = d->position(n);
    err = std::max(err, std::abs(rho[n] - (1.0 - std::hypot(x.x, x.y))));
    CHECK(rho[n] >= 0.0);
    CHECK(rho[n] <= 1.0);
    if (rho[n] == 1.0) ++ones;
  }
  CHECK(err <= 2.0 * d->h());
  CHECK(ones == 1);
}

TEST_CASE("cone field on the unit square", "[geometry][cone]") {
  auto spec = ShapeSpec::rect(1.0, 1.0, 64);
  spec.center = Point{0.5, 0.5};
  const auto d = make_domain(spec);
  const auto rho = cone_field(d, {0.5, 0.5});
  int node = -1;
  for (int n = 0; n < d->node_count(); ++n) {
    const Point x = d->position(n);
    if (std::abs(x.x - 0.75) < 1e-9 && std::abs(x.y - 0.5) < 1e-9) node = n;
  }
  REQUIRE(node >= 0);
  CHECK_THAT(rho[node], WithinAbs(0.5, 2.0 * d->h()));

  CHECK_THROWS_AS(cone_field(d, {2.0, 2.0}), ArgumentError);
}

TEST_CASE("cone level sets have measure (1-t)^2 |Omega|", "[geometry][cone]") {
  const auto d = make_domain(ShapeSpec::disk(1.0, 128));
  const auto rho = cone_field(d);
  for (double t : {0.25, 0.5, 0.75}) {
    const double expected = (1.0 - t) * (1.0 - t);
    CHECK_THAT(level_set_measure(rho, t) / d->volume(), WithinRel(expected, 0.03));
  }
}

TEST_CASE("exact level-set measure of a linear field on a square", "[geometry]") {
  const auto d = make_domain(ShapeSpec::rect(1.0, 1.0, 16));
  ScalarField v(d);
  for (int n = 0; n < d->node_count(); ++n) v[n] = d->position(n).x;
  // {x > t} on [0,1]^2 has area 1 - t for the (exact) linear interpolant
  for (double t : {0.1, 0.33, 0.5, 0.9}) CHECK_THAT(level_set_measure(v, t), WithinAbs(1.0 - t, 1e-12));
}
