#include <doctest.h>

#include <sstream>

#include "../support.hpp"
#include "rockperm/errors.hpp"
#include "rockperm/manifest.hpp"

using namespace rockperm;

namespace {

Manifest sample_manifest() {
  Manifest m;
  m.voxel_edge = 2.25e-6;
  m.size = 100;
  m.stride = 50;
  SampleRecord a;
  a.id = "000000-none";
  a.file = "samples/000000-none.raw";
  a.parent = "bentheimer.raw";
  a.porosity = 0.2314;
  a.face_count = 123456;
  a.area_m2 = 6.25e-7;
  a.specific_area = 1.1e5;
  a.f_max = 37;
  a.status = SampleStatus::labeled;
  a.k_cmp_mD = 1234.5678901234567;
  a.iterations = 812;
  a.residual = 9.7e-7;
  a.split = "train";
  SampleRecord b = a;
  b.id = "000000-y90";
  b.file = "samples/000000-y90.raw";
  b.meta = {{0, 50, 0}, Rotation::y90, Axis::z};
  b.f_max = 0;
  b.status = SampleStatus::failed;
  b.k_cmp_mD.reset();
  b.iterations.reset();
  b.residual.reset();
  b.split.clear();
  b.error = "MINRES stopped, residual \"4e-3\", after 50000 iterations";
  m.rows = {a, b};
  return m;
}

std::string text_of(const Manifest& m) {
  std::ostringstream out;
  write_manifest(m, out);
  return out.str();
}

Manifest parse(const std::string& text) {
  std::istringstream in(text);
  return read_manifest(in);
}

}  // namespace

TEST_CASE("manifest round trip is byte-stable") {
  const auto m = sample_manifest();
  const auto text = text_of(m);
  CHECK(text.rfind("# rockperm-manifest schema=1 voxel_edge=2.25e-06 size=100 stride=50 units=mD\n", 0) == 0);
  const auto back = parse(text);
  CHECK(text_of(back) == text);
  REQUIRE(back.rows.size() == 2);
  CHECK(*back.rows[0].k_cmp_mD == m.rows[0].k_cmp_mD.value());
  CHECK(back.rows[1].meta.rotation == Rotation::y90);
  CHECK(back.rows[1].meta.origin[1] == 50);
  CHECK(back.rows[1].error == m.rows[1].error);
  CHECK_FALSE(back.rows[1].k_cmp_mD.has_value());
  CHECK(back.length_scale() == doctest::Approx(2.25e-4));
  CHECK(back.find("000000-y90") == &back.rows[1]);
  CHECK(back.find("nope") == nullptr);
}

TEST_CASE("k_prd written by another tool survives a rewrite, and unknown columns are kept") {
  auto text = text_of(sample_manifest());
  // Append a foreign column and fill k_prd the way an external trainer would.
  std::istringstream in(text);
  std::string meta, header, row1, row2;
  std::getline(in, meta);
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  header += ",trainer_note";
  row1 += ",\"epoch 15, fold 2\"";
  row2 += ",";
  auto m = parse(meta + "\n" + header + "\n" + row1 + "\n" + row2 + "\n");
  REQUIRE(m.extra_columns == std::vector<std::string>{"trainer_note"});
  CHECK(m.rows[0].extra[0].second == "epoch 15, fold 2");

  m.rows[0].k_prd_mD = 1100.0;
  const auto again = parse(text_of(m));
  CHECK(again.extra_columns == m.extra_columns);
  CHECK(again.rows[0].extra[0].second == "epoch 15, fold 2");
  CHECK(*again.rows[0].k_prd_mD == 1100.0);
}

TEST_CASE("malformed manifests") {
  const std::string meta = "# rockperm-manifest schema=1 voxel_edge=1e-06 size=10 stride=10 units=mD\n";
  CHECK_THROWS_AS(parse(""), FormatError);
  CHECK_THROWS_AS(parse("id,file\n"), FormatError);
  CHECK_THROWS_AS(parse("# rockperm-manifest schema=2 units=mD\nid,file\n"), FormatError);
  CHECK_THROWS_AS(parse("# rockperm-manifest voxel_edge=1\nid,file\n"), FormatError);
  CHECK_THROWS_AS(parse("# rockperm-manifest schema=1 units=D\nid,file\n"), FormatError);
  CHECK_THROWS_AS(parse(meta + "id\n"), FormatError);
  CHECK_THROWS_AS(parse(meta + "id,file\na,x.raw\na,y.raw\n"), FormatError);
  CHECK_THROWS_AS(parse(meta + "id,file,f_max\na,x.raw,many\n"), FormatError);
  CHECK_THROWS_AS(parse(meta + "id,file\na\n"), FormatError);
  CHECK_THROWS_AS(parse(meta + "id,file,rotation\na,x.raw,x90\n"), FormatError);
  CHECK_THROWS_AS(parse(meta + "id,file\n\"a,x.raw\n"), FormatError);

  const auto minimal = parse(meta + "id,file\na,x.raw\n");
  CHECK(minimal.rows[0].status == SampleStatus::pending);
  CHECK(minimal.sample_dims() == Dims{10, 10, 10});
}

TEST_CASE("file output replaces atomically") {
  rockperm::testing::TempDir dir("manifest");
  const auto path = dir.path() / "sub" / "manifest.csv";
  write_manifest(sample_manifest(), path);
  CHECK(std::filesystem::exists(path));
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  CHECK(read_manifest(path).rows.size() == 2);
  CHECK_THROWS_AS(read_manifest(dir.path() / "absent.csv"), FormatError);
}

TEST_CASE("numbers print in shortest round-trip form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
