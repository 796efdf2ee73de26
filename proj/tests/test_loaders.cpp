#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "ucfl/loaders.hpp"

using namespace ucfl;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "ucfl_loader_tests";
  fs::create_directories(dir);
  return dir;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void push_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

}  // namespace

TEST_SUITE("loaders") {

TEST_CASE("hand-written 2x2 idx pair round-trips") {
  const auto dir = temp_dir();
  std::vector<std::uint8_t> img;
  push_u32(img, 0x00000803);
  push_u32(img, 2);  // two images
  push_u32(img, 2);
  push_u32(img, 2);
  // image 0: all zeros; image 1: all 255
  for (int i = 0; i < 4; ++i) img.push_back(0);
  for (int i = 0; i < 4; ++i) img.push_back(255);
  std::vector<std::uint8_t> lab;
  push_u32(lab, 0x00000801);
  push_u32(lab, 2);
  lab.push_back(0);
  lab.push_back(1);
  write_bytes(dir / "img.idx", img);
  write_bytes(dir / "lab.idx", lab);

  const auto data = load_idx((dir / "img.idx").string(), (dir / "lab.idx").string());
  CHECK(data.size() == 2);
  CHECK(data.dim() == 4);
  CHECK(data.classes == 2);
  for (int j = 0; j < 4; ++j) {
    CHECK(data.features(0, j) == 0.0);
    CHECK(data.features(1, j) == 1.0);
  }
  CHECK(data.labels == std::vector<int>{0, 1});
}

TEST_CASE("idx count mismatch is a format error") {
  const auto dir = temp_dir();
  std::vector<std::uint8_t> img;
  push_u32(img, 0x00000803);
  push_u32(img, 1);
  push_u32(img, 1);
  push_u32(img, 1);
  img.push_back(7);
  std::vector<std::uint8_t> lab;
  push_u32(lab, 0x00000801);
  push_u32(lab, 2);
  lab.push_back(0);
  lab.push_back(1);
  write_bytes(dir / "img2.idx", img);
  write_bytes(dir / "lab2.idx", lab);
  CHECK_THROWS_AS(load_idx((dir / "img2.idx").string(), (dir / "lab2.idx").string()), format_error);
}

TEST_CASE("empty idx file errors at offset 0") {
  const auto dir = temp_dir();
  write_bytes(dir / "empty.idx", {});
  std::vector<std::uint8_t> lab;
  push_u32(lab, 0x00000801);
  push_u32(lab, 0);
  write_bytes(dir / "lab3.idx", lab);
  try {
    load_idx((dir / "empty.idx").string(), (dir / "lab3.idx").string());
    FAIL("expected format_error");
  } catch (const format_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("offset 0") != std::string::npos);
    CHECK(msg.find("empty.idx") != std::string::npos);
  }
}

TEST_CASE("bad magic names the file") {
  const auto dir = temp_dir();
  std::vector<std::uint8_t> img;
  push_u32(img, 0x00000802);
  push_u32(img, 0);
  push_u32(img, 0);
  push_u32(img, 0);
  write_bytes(dir / "badmagic.idx", img);
  std::vector<std::uint8_t> lab;
  push_u32(lab, 0x00000801);
  push_u32(lab, 0);
  write_bytes(dir / "lab4.idx", lab);
  try {
    load_idx((dir / "badmagic.idx").string(), (dir / "lab4.idx").string());
    FAIL("expected format_error");
  } catch (const format_error& e) {
    CHECK(std::string(e.what()).find("badmagic.idx") != std::string::npos);
  }
}

TEST_CASE("truncated idx payload reports the offset") {
  const auto dir = temp_dir();
  std::vector<std::uint8_t> img;
  push_u32(img, 0x00000803);
  push_u32(img, 2);
  push_u32(img, 2);
  push_u32(img, 2);
  img.push_back(1);  // 1 of 8 payload bytes
  write_bytes(dir / "trunc.idx", img);
  std::vector<std::uint8_t> lab;
  push_u32(lab, 0x00000801);
  push_u32(lab, 2);
  lab.push_back(0);
  lab.push_back(1);
  write_bytes(dir / "lab5.idx", lab);
  CHECK_THROWS_AS(load_idx((dir / "trunc.idx").string(), (dir / "lab5.idx").string()), format_error);
}

TEST_CASE("csv loader finds the label column") {
  const auto dir = temp_dir();
  {
    std::ofstream out(dir / "data.csv");
    out << "x0,label,x1\n";
    out << "0.5,1,2.0\n";
    out << "-1.5,0,3.25\n";
  }
  const auto data = load_csv((dir / "data.csv").string());
  CHECK(data.size() == 2);
  CHECK(data.dim() == 2);
  CHECK(data.classes == 2);
  CHECK(data.features(0, 0) == 0.5);
  CHECK(data.features(0, 1) == 2.0);
  CHECK(data.labels == std::vector<int>{1, 0});
}

TEST_CASE("csv without a label column fails") {
  const auto dir = temp_dir();
  {
    std::ofstream out(dir / "nolabel.csv");
    out << "x0,x1\n0.5,1.0\n";
  }
  CHECK_THROWS_AS(load_csv((dir / "nolabel.csv").string()), format_error);
}

TEST_CASE("ragged csv row fails with the line number") {
  const auto dir = temp_dir();
  {
    std::ofstream out(dir / "ragged.csv");
    out << "x0,label\n1.0,0\n2.0\n";
  }
  try {
    load_csv((dir / "ragged.csv").string());
    FAIL("expected format_error");
  } catch (const format_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

}  // TEST_SUITE
