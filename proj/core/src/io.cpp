#include "vskf/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "vskf/errors.hpp"

namespace vskf {

namespace {

using nlohmann::json;

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

double parse_double(std::string_view text, const std::string& path, std::size_t line) {
  double value;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw IoError(path + ": line " + std::to_string(line) + ": malformed number '" +
                  std::string(text) + "'");
  return value;
}

// Strips one trailing CR so CRLF inputs read cleanly; the writer emits LF only.
std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << fmt(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Eigen::MatrixXd read_matrix(const std::string& path, int side) {
  std::ifstream in = open_in(path);
  Eigen::MatrixXd m(side, side);
  std::string line;
  for (int i = 0; i < side; ++i) {
    if (!std::getline(in, line))
      throw IoError(path + ": expected " + std::to_string(side) + " rows, got " +
                    std::to_string(i));
    std::string_view view = trim_cr(line);
    std::size_t pos = 0;
    for (int j = 0; j < side; ++j) {
      while (pos < view.size() && view[pos] == ' ') ++pos;
      std::size_t end = pos;
      while (end < view.size() && view[end] != ' ') ++end;
      if (pos == end)
        throw IoError(path + ": line " + std::to_string(i + 1) + ": expected " +
                      std::to_string(side) + " columns");
      m(i, j) = parse_double(view.substr(pos, end - pos), path, i + 1);
      pos = end;
    }
  }
  return m;
}

json read_json(const std::string& path) {
  std::ifstream in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void write_visibility_csv(const std::string& path, const VisibilitySet& data) {
  if (data.points.size() != data.values.size())
    throw ContractError("visibility set: points/values length mismatch");
  std::ofstream out = open_out(path);
  out << "u,v,re,im\n";
  for (std::size_t i = 0; i < data.points.size(); ++i)
    out << fmt(data.points[i].u) << ',' << fmt(data.points[i].v) << ','
        << fmt(data.values[i].real()) << ',' << fmt(data.values[i].imag()) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

VisibilitySet read_visibility_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim_cr(line) != "u,v,re,im")
    throw IoError(path + ": line 1: expected header 'u,v,re,im'");

  VisibilitySet data;
  std::map<std::pair<double, double>, std::size_t> seen;  // node -> file line
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim_cr(line);
    if (view.empty()) continue;
    std::array<std::string_view, 4> fields;
    std::size_t pos = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = view.find(',', pos);
      if (f < 3 && comma == std::string_view::npos)
        throw IoError(path + ": line " + std::to_string(line_no) + ": expected 4 fields");
      const std::size_t end = f < 3 ? comma : view.size();
      fields[f] = view.substr(pos, end - pos);
      pos = end + 1;
    }
    if (fields[3].find(',') != std::string_view::npos)
      throw IoError(path + ": line " + std::to_string(line_no) + ": expected 4 fields");
    const double u = parse_double(fields[0], path, line_no);
    const double v = parse_double(fields[1], path, line_no);
    const double re = parse_double(fields[2], path, line_no);
    const double im = parse_double(fields[3], path, line_no);
    const auto [it, inserted] = seen.emplace(std::make_pair(u, v), line_no);
    if (!inserted)
      throw IoError(path + ": duplicate (u,v) node on lines " +
                    std::to_string(it->second) + " and " + std::to_string(line_no));
    data.points.push_back({u, v});
    data.values.emplace_back(re, im);
  }
  if (data.points.empty()) throw IoError(path + ": no visibility rows");
  return data;
}

void write_image(const std::string& base, const ImageGrid& image) {
  write_matrix(base + ".txt", image.data);
  json meta;
  meta["side"] = image.side;
  meta["pixel_size_arcsec"] = image.pixel_size;
  meta["center_arcsec"] = {image.center[0], image.center[1]};
  meta["units"] = "photon cm^-2 s^-1 arcsec^-2";
  write_json(base + ".json", meta);
}

ImageGrid read_image(const std::string& base) {
  const json meta = read_json(base + ".json");
  try {
    const int side = meta.at("side").get<int>();
    const double pixel = meta.at("pixel_size_arcsec").get<double>();
    const auto center = meta.at("center_arcsec").get<std::array<double, 2>>();
    return ImageGrid(side, pixel, center, read_matrix(base + ".txt", side));
  } catch (const json::exception& e) {
    throw IoError(base + ".json: " + e.what());
  }
}

void write_frequency_grid(const std::string& base, const FrequencyGrid& grid) {
  write_matrix(base + "_re.txt", grid.data.real());
  write_matrix(base + "_im.txt", grid.data.imag());
  json meta;
  meta["side"] = grid.side;
  meta["mesh_arcsec_inv"] = grid.mesh;
  meta["units"] = "photon cm^-2 s^-1";
  write_json(base + ".json", meta);
}

FrequencyGrid read_frequency_grid(const std::string& base) {
  const json meta = read_json(base + ".json");
  int side;
  double mesh;
  try {
    side = meta.at("side").get<int>();
    mesh = meta.at("mesh_arcsec_inv").get<double>();
  } catch (const json::exception& e) {
    throw IoError(base + ".json: " + e.what());
  }
  const Eigen::MatrixXd re = read_matrix(base + "_re.txt", side);
  const Eigen::MatrixXd im = read_matrix(base + "_im.txt", side);
  Eigen::MatrixXcd data(side, side);
  data.real() = re;
  data.imag() = im;
  return FrequencyGrid(side, mesh, std::move(data));
}

void write_matrix_text(const std::string& path, const Eigen::MatrixXd& matrix) {
  write_matrix(path, matrix);
}

void write_pgm(const std::string& path, const ImageGrid& image) {
  std::ofstream out = open_out(path);
  const double lo = image.data.minCoeff();
  const double hi = image.data.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << image.side << ' ' << image.side << "\n65535\n";
  for (int i = 0; i < image.side; ++i)
    for (int j = 0; j < image.side; ++j) {
      const double t = (image.data(i, j) - lo) / span;
      const unsigned value = static_cast<unsigned>(t * 65535.0 + 0.5);
      out.put(static_cast<char>((value >> 8) & 0xff));
      out.put(static_cast<char>(value & 0xff));
    }
  if (!out) throw IoError("write failed: " + path);
}

void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& log) {
  std::ofstream out = open_out(path);
  out << "k,residual,rel_change\n";
  for (const auto& rec : log)
    out << rec.k << ',' << fmt(rec.residual) << ',' << fmt(rec.rel_change) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace vskf
