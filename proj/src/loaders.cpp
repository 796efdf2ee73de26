#include "ucfl/loaders.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace ucfl {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path, std::size_t offset) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4)
    throw format_error(path + ": truncated header at offset " + std::to_string(offset));
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::vector<unsigned char> read_bytes(std::ifstream& in, std::size_t count,
                                      const std::string& path, std::size_t offset) {
  std::vector<unsigned char> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw format_error(path + ": truncated payload at offset " +
                       std::to_string(offset + static_cast<std::size_t>(std::max<std::streamsize>(in.gcount(), 0))));
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw io_error(images_path + ": cannot open");
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw io_error(labels_path + ": cannot open");

  if (img.peek() == std::ifstream::traits_type::eof())
    throw format_error(images_path + ": empty file at offset 0");
  if (lab.peek() == std::ifstream::traits_type::eof())
    throw format_error(labels_path + ": empty file at offset 0");

  const auto img_magic = read_u32_be(img, images_path, 0);
  if (img_magic != kImagesMagic)
    throw format_error(images_path + ": bad magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08x", img_magic);
      return std::string(buf);
    }() + " at offset 0 (expected 00000803)");
  const auto n_img = read_u32_be(img, images_path, 4);
  const auto rows = read_u32_be(img, images_path, 8);
  const auto cols = read_u32_be(img, images_path, 12);

  const auto lab_magic = read_u32_be(lab, labels_path, 0);
  if (lab_magic != kLabelsMagic)
    throw format_error(labels_path + ": bad magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08x", lab_magic);
      return std::string(buf);
    }() + " at offset 0 (expected 00000801)");
  const auto n_lab = read_u32_be(lab, labels_path, 4);

  if (n_img != n_lab)
    throw format_error(images_path + ": image count " + std::to_string(n_img) +
                       " does not match label count " + std::to_string(n_lab) + " in " + labels_path);

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  const auto img_bytes = read_bytes(img, static_cast<std::size_t>(n_img) * pixels, images_path, 16);
  const auto lab_bytes = read_bytes(lab, n_lab, labels_path, 8);

  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(n_img), static_cast<Eigen::Index>(pixels));
  out.labels.resize(n_lab);
  int max_label = 0;
  for (std::uint32_t i = 0; i < n_img; ++i) {
    for (std::size_t px = 0; px < pixels; ++px)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(px)) =
          img_bytes[i * pixels + px] / 255.0;
    out.labels[i] = lab_bytes[i];
    max_label = std::max(max_label, static_cast<int>(lab_bytes[i]));
  }
  out.classes = max_label + 1;
  return out;
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open");

  std::string line;
  if (!std::getline(in, line)) throw format_error(path + ": empty file at offset 0");
  const auto header = split_csv_line(line);
  int label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == "label") label_col = static_cast<int>(c);
  if (label_col < 0) throw format_error(path + ": no column named \"label\" in header");
  const int p = static_cast<int>(header.size()) - 1;
  if (p < 1) throw format_error(path + ": needs at least one feature column");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw format_error(path + ": line " + std::to_string(line_no) + " has " +
                         std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(header.size()));
    std::vector<double> feat;
    feat.reserve(static_cast<std::size_t>(p));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        throw format_error(path + ": line " + std::to_string(line_no) + ": cannot parse \"" +
                           cells[c] + "\"");
      }
      if (used != cells[c].size())
        throw format_error(path + ": line " + std::to_string(line_no) + ": cannot parse \"" +
                           cells[c] + "\"");
      if (static_cast<int>(c) == label_col) {
        const int y = static_cast<int>(std::lround(v));
        if (y < 0 || std::abs(v - y) > 1e-9)
          throw format_error(path + ": line " + std::to_string(line_no) +
                             ": label must be a nonnegative integer");
        labels.push_back(y);
        max_label = std::max(max_label, y);
      } else {
        feat.push_back(v);
      }
    }
    rows.push_back(std::move(feat));
  }
  if (rows.empty()) throw format_error(path + ": no data rows");

  LabeledDataset out;
  out.classes = max_label + 1;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), p);
  out.labels = std::move(labels);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < p; ++c)
      out.features(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  return out;
}

}  // namespace ucfl
