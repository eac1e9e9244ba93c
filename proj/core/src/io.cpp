#include "dualwarp/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "dualwarp/errors.hpp"

namespace dualwarp {
namespace {

using Bytes = std::vector<std::uint8_t>;
using Json = nlohmann::ordered_json;

constexpr std::array<char, 4> kDepthMagic{'D', 'P', 'M', '1'};
constexpr std::array<char, 4> kFlowMagic{'D', 'F', 'L', '1'};

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint32_t get_u32(const Bytes& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

std::uint16_t get_u16(const Bytes& in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

void put_header(Bytes& out, const std::array<char, 4>& magic, int width, int height) {
  out.insert(out.end(), magic.begin(), magic.end());
  put_u32(out, static_cast<std::uint32_t>(width));
  put_u32(out, static_cast<std::uint32_t>(height));
}

// Returns (width, height) after checking magic, positivity and total size.
std::pair<int, int> get_header(const Bytes& in, const std::array<char, 4>& magic,
                               std::size_t bytes_per_pixel, const char* what) {
  if (in.size() < 12 || std::memcmp(in.data(), magic.data(), 4) != 0) {
    throw FormatError(std::string(what) + ": bad magic");
  }
  const std::uint32_t w = get_u32(in, 4);
  const std::uint32_t h = get_u32(in, 8);
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) {
    throw FormatError(std::string(what) + ": invalid dimensions");
  }
  const std::uint64_t expected = 12 + std::uint64_t{w} * h * bytes_per_pixel;
  if (in.size() != expected) {
    throw FormatError(std::string(what) + ": payload is " + std::to_string(in.size()) +
                      " bytes, expected " + std::to_string(expected));
  }
  return {static_cast<int>(w), static_cast<int>(h)};
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

// Netpbm header: magic, then width, height, maxval separated by whitespace
// (comments allowed), then exactly one whitespace byte.
struct PnmHeader {
  int width;
  int height;
  std::size_t data_offset;
};

PnmHeader parse_pnm(const Bytes& in, const char* magic, const std::string& name) {
  if (in.size() < 2 || in[0] != magic[0] || in[1] != magic[1]) {
    throw FormatError(name + ": expected " + magic + " header");
  }
  std::size_t pos = 2;
  std::array<long, 3> fields{};
  for (auto& field : fields) {
    for (;;) {
      if (pos >= in.size()) throw FormatError(name + ": truncated header");
      if (in[pos] == '#') {
        while (pos < in.size() && in[pos] != '\n') ++pos;
      } else if (std::isspace(in[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    if (!std::isdigit(in[pos])) throw FormatError(name + ": malformed header");
    long v = 0;
    while (pos < in.size() && std::isdigit(in[pos])) {
      v = v * 10 + (in[pos] - '0');
      if (v > (1L << 24)) throw FormatError(name + ": header value out of range");
      ++pos;
    }
    field = v;
  }
  if (pos >= in.size() || !std::isspace(in[pos])) throw FormatError(name + ": malformed header");
  ++pos;
  if (fields[0] < 1 || fields[1] < 1) throw FormatError(name + ": invalid dimensions");
  if (fields[2] != 255) throw FormatError(name + ": maxval must be 255");
  return {static_cast<int>(fields[0]), static_cast<int>(fields[1]), pos};
}

std::string pnm_header(const char* magic, int width, int height) {
  return std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) +
         "\n255\n";
}

std::string extension_of(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

[[noreturn]] void png_throw(png_structp png, png_const_charp) { png_longjmp(png, 1); }

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, Bytes(text.begin(), text.end()));
}

std::string read_text_file(const std::filesystem::path& path) {
  const Bytes b = read_file(path);
  return std::string(b.begin(), b.end());
}

std::vector<std::uint8_t> encode_depth_raw(const DepthImage& image) {
  Bytes out;
  out.reserve(12 + 4 * image.size());
  put_header(out, kDepthMagic, image.width(), image.height());
  for (float v : image.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

DepthImage decode_depth_raw(const std::vector<std::uint8_t>& bytes) {
  const auto [w, h] = get_header(bytes, kDepthMagic, 4, "depth file");
  std::vector<float> data(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float v = std::bit_cast<float>(get_u32(bytes, 12 + 4 * i));
    if (!std::isfinite(v) || v < 0.0f) {
      throw FormatError("depth file: value at index " + std::to_string(i) +
                        " is negative or non-finite");
    }
    data[i] = v;
  }
  return DepthImage(w, h, std::move(data));
}

void write_depth_raw(const std::filesystem::path& path, const DepthImage& image) {
  write_file(path, encode_depth_raw(image));
}

DepthImage read_depth_raw(const std::filesystem::path& path) {
  try {
    return decode_depth_raw(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_depth_png16(const std::filesystem::path& path, const DepthImage& image,
                       double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("png scale must be positive");
  const int w = image.width();
  const int h = image.height();
  Bytes rows(static_cast<std::size_t>(w) * h * 2);
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = std::round(static_cast<double>(image.at(i)) * 1000.0 / scale);
    if (v > 65535.0) {
      throw InvalidArgument("depth " + std::to_string(image.at(i)) +
                            " does not fit in a 16-bit png at this scale");
    }
    const auto q = static_cast<std::uint16_t>(v);
    rows[2 * i] = static_cast<std::uint8_t>(q >> 8);  // png samples are big-endian
    rows[2 * i + 1] = static_cast<std::uint8_t>(q);
  }
  std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) row_ptrs[y] = rows.data() + static_cast<std::size_t>(y) * w * 2;

  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png write failed: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

DepthImage read_depth_png16(const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("png scale must be positive");
  FilePtr file = open_file(path, "rb");
  std::array<png_byte, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() ||
      png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
    throw FormatError(path.string() + ": not a png file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialisation failed");
  }
  // Everything touched after setjmp lives in heap storage owned by these
  // objects, which are created first so longjmp does not skip destructors.
  Bytes rows;
  std::vector<png_bytep> row_ptrs;
  png_uint_32 w = 0;
  png_uint_32 h = 0;
  int depth = 0;
  int color = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": corrupt png");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, static_cast<int>(sig.size()));
  png_read_info(png, info);
  png_get_IHDR(png, info, &w, &h, &depth, &color, nullptr, nullptr, nullptr);
  if (depth != 16 || color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": expected a 16-bit grayscale png");
  }
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": invalid dimensions");
  }
  rows.resize(std::size_t{w} * h * 2);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = rows.data() + std::size_t{y} * w * 2;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<float> data(std::size_t{w} * h);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned q = (unsigned{rows[2 * i]} << 8) | rows[2 * i + 1];
    data[i] = static_cast<float>(q * scale / 1000.0);
  }
  return DepthImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

DepthImage read_depth(const std::filesystem::path& path) {
  const std::string ext = extension_of(path);
  if (ext == ".png") return read_depth_png16(path);
  if (ext == ".dpm") return read_depth_raw(path);
  throw InvalidArgument("unknown depth file extension: " + path.string());
}

void write_depth(const std::filesystem::path& path, const DepthImage& image) {
  const std::string ext = extension_of(path);
  if (ext == ".png") return write_depth_png16(path, image);
  if (ext == ".dpm") return write_depth_raw(path, image);
  throw InvalidArgument("unknown depth file extension: " + path.string());
}

void write_mask(const std::filesystem::path& path, const PixelMask& mask) {
  const std::string header = pnm_header("P5", mask.width(), mask.height());
  Bytes out(header.begin(), header.end());
  for (auto b : mask.bits()) out.push_back(b ? 255 : 0);
  write_file(path, out);
}

PixelMask read_mask(const std::filesystem::path& path) {
  const Bytes in = read_file(path);
  const PnmHeader hdr = parse_pnm(in, "P5", path.string());
  const std::size_t n = static_cast<std::size_t>(hdr.width) * hdr.height;
  if (in.size() - hdr.data_offset != n) throw FormatError(path.string() + ": wrong payload size");
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t v = in[hdr.data_offset + i];
    if (v != 0 && v != 255) {
      throw FormatError(path.string() + ": mask values must be 0 or 255");
    }
    bits[i] = v ? 1 : 0;
  }
  return PixelMask(hdr.width, hdr.height, std::move(bits));
}

PixelMask read_mask(const std::filesystem::path& path, const DepthImage& companion) {
  PixelMask mask = read_mask(path);
  if (!mask.same_shape(companion)) {
    throw FormatError(path.string() + ": mask is " + std::to_string(mask.width()) + "x" +
                      std::to_string(mask.height()) + " but its depth image is " +
                      std::to_string(companion.width()) + "x" +
                      std::to_string(companion.height()));
  }
  return mask;
}

std::vector<std::uint8_t> encode_flow(const DisplacementField& field) {
  Bytes out;
  out.reserve(12 + 4 * field.size());
  put_header(out, kFlowMagic, field.width(), field.height());
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (const std::int32_t v : {field.dx(i), field.dy(i)}) {
      if (v < std::numeric_limits<std::int16_t>::min() ||
          v > std::numeric_limits<std::int16_t>::max()) {
        throw FormatError("displacement " + std::to_string(v) + " does not fit in 16 bits");
      }
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
  }
  return out;
}

DisplacementField decode_flow(const std::vector<std::uint8_t>& bytes) {
  const auto [w, h] = get_header(bytes, kFlowMagic, 4, "flow file");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<std::int32_t> dx(n);
  std::vector<std::int32_t> dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = static_cast<std::int16_t>(get_u16(bytes, 12 + 4 * i));
    dy[i] = static_cast<std::int16_t>(get_u16(bytes, 14 + 4 * i));
  }
  return DisplacementField(w, h, std::move(dx), std::move(dy));
}

void write_flow(const std::filesystem::path& path, const DisplacementField& field) {
  write_file(path, encode_flow(field));
}

DisplacementField read_flow(const std::filesystem::path& path) {
  try {
    return decode_flow(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_rgb(const std::filesystem::path& path, const RgbImage& image) {
  const std::string header = pnm_header("P6", image.width(), image.height());
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), image.data().begin(), image.data().end());
  write_file(path, out);
}

RgbImage read_rgb(const std::filesystem::path& path) {
  const Bytes in = read_file(path);
  const PnmHeader hdr = parse_pnm(in, "P6", path.string());
  const std::size_t n = 3 * static_cast<std::size_t>(hdr.width) * hdr.height;
  if (in.size() - hdr.data_offset != n) throw FormatError(path.string() + ": wrong payload size");
  return RgbImage(hdr.width, hdr.height, Bytes(in.begin() + hdr.data_offset, in.end()));
}

std::string manifest_to_text(const DatasetManifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    Json pose = Json::array();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) pose.push_back(e.pose.rotation()(r, c));
    }
    for (int r = 0; r < 3; ++r) pose.push_back(e.pose.translation()(r));
    Json j;
    j["complete"] = e.complete;
    j["occluded"] = e.occluded;
    j["mask"] = e.mask;
    j["pose"] = pose;
    j["intrinsics"] = {e.intrinsics.f, e.intrinsics.cx, e.intrinsics.cy};
    j["strategy"] = e.strategy;
    j["seed"] = e.seed;
    out += j.dump();
    out += '\n';
  }
  return out;
}

DatasetManifest manifest_from_text(const std::string& text) {
  static const std::array<const char*, 7> kFields{"complete", "occluded", "mask",  "pose",
                                                  "intrinsics", "strategy", "seed"};
  DatasetManifest manifest;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "manifest line " + std::to_string(line_no) + ": ";
    try {
      const Json j = Json::parse(line);
      if (!j.is_object()) throw FormatError(where + "expected an object");
      for (const auto& [key, value] : j.items()) {
        if (std::find_if(kFields.begin(), kFields.end(),
                         [&](const char* f) { return key == f; }) == kFields.end()) {
          throw FormatError(where + "unknown field '" + key + "'");
        }
      }
      for (const char* f : kFields) {
        if (!j.contains(f)) throw FormatError(where + "missing field '" + f + "'");
      }
      const Json& pose = j.at("pose");
      const Json& k = j.at("intrinsics");
      if (!pose.is_array() || pose.size() != 12) {
        throw FormatError(where + "pose must hold 12 numbers");
      }
      if (!k.is_array() || k.size() != 3) {
        throw FormatError(where + "intrinsics must hold 3 numbers");
      }
      if (!j.at("seed").is_number_unsigned()) {
        throw FormatError(where + "seed must be a non-negative integer");
      }
      Eigen::Matrix3d r;
      Eigen::Vector3d t;
      for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = pose.at(i).get<double>();
      for (int i = 0; i < 3; ++i) t(i) = pose.at(9 + i).get<double>();
      ManifestEntry e{j.at("complete").get<std::string>(),
                      j.at("occluded").get<std::string>(),
                      j.at("mask").get<std::string>(),
                      Pose(r, t),
                      CameraIntrinsics(k.at(0).get<double>(), k.at(1).get<double>(),
                                       k.at(2).get<double>()),
                      j.at("strategy").get<std::string>(),
                      j.at("seed").get<std::uint64_t>()};
      manifest.entries.push_back(std::move(e));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(where + e.what());
    }
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  write_text_file(path, manifest_to_text(manifest));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_text(read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

Json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string metrics_report_to_json(const MetricsReport& report) {
  Json j;
  j["mean"] = number_or_null(report.errors.mean);
  j["median"] = number_or_null(report.errors.median);
  j["count"] = report.errors.count;
  j["excluded"] = report.errors.excluded;
  j["loss_tv"] = number_or_null(report.loss_tv);
  j["loss_content"] = number_or_null(report.loss_content);
  j["loss_total"] = number_or_null(report.loss_total);
  if (report.psnr) j["psnr"] = number_or_null(*report.psnr);
  return j.dump(2) + "\n";
}

std::string metrics_report_to_text(const MetricsReport& report) {
  std::string out;
  out += "mean: " + format_value(report.errors.mean) + "\n";
  out += "median: " + format_value(report.errors.median) + "\n";
  out += "count: " + std::to_string(report.errors.count) + "\n";
  out += "excluded: " + std::to_string(report.errors.excluded) + "\n";
  out += "loss_tv: " + format_value(report.loss_tv) + "\n";
  out += "loss_content: " + format_value(report.loss_content) + "\n";
  out += "loss_total: " + format_value(report.loss_total) + "\n";
  if (report.psnr) out += "psnr: " + format_value(*report.psnr) + "\n";
  return out;
}

void write_scene(const std::filesystem::path& path, const Scene& scene) {
  write_text_file(path, scene_to_text(scene));
}

Scene read_scene(const std::filesystem::path& path) {
  try {
    return scene_from_text(read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace dualwarp
