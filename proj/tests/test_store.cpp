#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ict/store.hpp"

using namespace ict;
using cd = std::complex<double>;

namespace {

std::string tmp_file(const char* tag) {
  return (std::filesystem::temp_directory_path() / (std::string("ict_store_") + tag + ".ictb"))
      .string();
}

std::vector<unsigned char> slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& file, const std::vector<unsigned char>& bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

Container sample_container() {
  Container c;
  c.meta.group = Group::O3;
  c.meta.space_spec = "(1x1)-";
  c.meta.basis = "spherical";
  Path p;
  p.start = Weight::integer(1);
  p.steps = {{Weight::integer(1), Weight::integer(2)}};
  p.terminal_parity = -1;

  StoredObject a;
  a.name = "path/t0/l2/q1";
  a.kind = "path_matrix";
  a.path = p;
  a.dtype = "f64";
  a.f64 = MatD::Random(9, 5);
  StoredObject b;
  b.name = "mix/l2p-";
  b.kind = "mix_shape";
  b.dtype = "f64";
  b.f64 = MatD::Zero(1, 3);
  c.objects = {a, b};
  return c;
}

}  // namespace

TEST_SUITE("store") {

TEST_CASE("save/load round trip is bit exact") {
  const Container c = sample_container();
  const std::string file = tmp_file("roundtrip");
  save_container(file, c.meta, c.objects);
  const Container r = load_container(file);
  CHECK(r.meta.group == Group::O3);
  CHECK(r.meta.space_spec == c.meta.space_spec);
  CHECK(!r.meta.space_spec_out);
  REQUIRE(r.objects.size() == 2);
  CHECK(r.objects[0].name == "path/t0/l2/q1");
  CHECK(r.objects[0].kind == "path_matrix");
  REQUIRE(r.objects[0].path);
  CHECK(*r.objects[0].path == *c.objects[0].path);
  CHECK((r.objects[0].f64.array() == c.objects[0].f64.array()).all());
  CHECK((r.objects[1].f64.array() == c.objects[1].f64.array()).all());
  std::remove(file.c_str());
}

TEST_CASE("repeated saves are byte identical") {
  const Container c = sample_container();
  const std::string f1 = tmp_file("det1"), f2 = tmp_file("det2");
  save_container(f1, c.meta, c.objects);
  save_container(f2, c.meta, c.objects);
  CHECK(slurp(f1) == slurp(f2));
  std::remove(f1.c_str());
  std::remove(f2.c_str());
}

TEST_CASE("complex payloads round trip") {
  Container c;
  c.meta.group = Group::SU2;
  c.meta.space_spec = "(1/2x1/2)";
  c.meta.basis = "spherical";
  StoredObject o;
  o.name = "path/t0/l1/q1";
  o.kind = "path_matrix";
  Path p;
  p.start = Weight::from_doubled(1);
  p.steps = {{Weight::from_doubled(1), Weight::from_doubled(2)}};
  p.terminal_parity = 1;
  o.path = p;
  o.dtype = "c128";
  o.c128 = MatC::Random(4, 3);
  const std::string file = tmp_file("complex");
  save_container(file, c.meta, {o});
  const Container r = load_container(file);
  CHECK(r.meta.group == Group::SU2);
  CHECK((r.objects[0].c128.array() == o.c128.array()).all());
  std::remove(file.c_str());
}

TEST_CASE("empty object list is a valid container") {
  Container c;
  c.meta.group = Group::O3;
  c.meta.space_spec = "(1)-";
  c.meta.basis = "cartesian";
  const std::string file = tmp_file("empty");
  save_container(file, c.meta, {});
  const Container r = load_container(file);
  CHECK(r.objects.empty());
  CHECK(r.meta.basis == "cartesian");
  std::remove(file.c_str());
}

TEST_CASE("alignment: every blob offset is a multiple of 8") {
  Container c = sample_container();
  c.objects[1].f64 = MatD::Random(3, 3);  // 72 bytes between blobs still lands aligned
  const std::string file = tmp_file("align");
  save_container(file, c.meta, c.objects);
  const Container r = load_container(file);
  CHECK(r.objects.size() == 2);
  std::remove(file.c_str());
}

TEST_CASE("bad magic is rejected") {
  const std::string file = tmp_file("magic");
  const Container c = sample_container();
  save_container(file, c.meta, c.objects);
  auto bytes = slurp(file);
  bytes[0] = 'X';
  spit(file, bytes);
  CHECK_THROWS_AS(load_container(file), store_error);
  std::remove(file.c_str());
}

TEST_CASE("flipped payload byte triggers a CRC error naming the object") {
  const std::string file = tmp_file("crc");
  const Container c = sample_container();
  save_container(file, c.meta, c.objects);
  auto bytes = slurp(file);
  bytes[bytes.size() - 9] ^= 0x40;  // inside the last blob
  spit(file, bytes);
  try {
    load_container(file);
    FAIL("expected store_error");
  } catch (const store_error& e) {
    CHECK(std::string(e.what()).find("crc32") != std::string::npos);
    CHECK(!e.object().empty());
  }
  std::remove(file.c_str());
}

TEST_CASE("overlapping offsets are rejected") {
  const std::string file = tmp_file("overlap");
  const Container c = sample_container();
  save_container(file, c.meta, c.objects);
  auto bytes = slurp(file);
  // rewrite the second object's byte_offset to overlap the first (9*5*8 = 360)
  std::string text(bytes.begin(), bytes.end());
  const std::string needle = "\"byte_offset\":360";
  const auto at = text.find(needle);
  REQUIRE(at != std::string::npos);
  text.replace(at, needle.size(), "\"byte_offset\":8  ");
  spit(file, std::vector<unsigned char>(text.begin(), text.end()));
  CHECK_THROWS_AS(load_container(file), store_error);
  std::remove(file.c_str());
}

TEST_CASE("unsupported format version is rejected") {
  const std::string file = tmp_file("version");
  const Container c = sample_container();
  save_container(file, c.meta, c.objects);
  auto bytes = slurp(file);
  std::string text(bytes.begin(), bytes.end());
  const std::string needle = "\"format_version\":1";
  const auto at = text.find(needle);
  REQUIRE(at != std::string::npos);
  text.replace(at, needle.size(), "\"format_version\":9");
  spit(file, std::vector<unsigned char>(text.begin(), text.end()));
  try {
    load_container(file);
    FAIL("expected store_error");
  } catch (const store_error& e) {
    CHECK(std::string(e.what()).find("format_version") != std::string::npos);
  }
  std::remove(file.c_str());
}

TEST_CASE("truncated payload is rejected") {
  const std::string file = tmp_file("trunc");
  const Container c = sample_container();
  save_container(file, c.meta, c.objects);
  auto bytes = slurp(file);
  bytes.resize(bytes.size() - 16);
  spit(file, bytes);
  CHECK_THROWS_AS(load_container(file), store_error);
  std::remove(file.c_str());
}

}  // TEST_SUITE
