#include "coco/image.hpp"

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <jpeglib.h>
#include <png.h>

#include "coco/errors.hpp"

namespace coco {

Image::Image(int width, int height)
    : Image(width, height,
            std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * 3, 0)) {}

Image::Image(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (width <= 0 || height <= 0 ||
      rgb_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw InputDomainError("image buffer does not match " + std::to_string(width) + "x" +
                           std::to_string(height) + " RGB");
  }
}

SrgbColor Image::at(int x, int y) const {
  if (!contains(x, y)) {
    throw InputDomainError("pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                           ") outside image");
  }
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
}

void Image::set(int x, int y, SrgbColor c) {
  if (!contains(x, y)) throw InputDomainError("pixel outside image");
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  rgb_[i] = c.r;
  rgb_[i + 1] = c.g;
  rgb_[i + 2] = c.b;
}

ImageFormat sniff_format(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPng), std::end(kPng), bytes.begin())) {
    return ImageFormat::png;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) {
    return ImageFormat::jpeg;
  }
  return ImageFormat::unknown;
}

std::string mime_type(ImageFormat f) {
  switch (f) {
    case ImageFormat::png:
      return "image/png";
    case ImageFormat::jpeg:
      return "image/jpeg";
    case ImageFormat::unknown:
      break;
  }
  return "application/octet-stream";
}

namespace {

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw ContractError(std::string("PNG decode failed: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ContractError("PNG decode failed: " + msg);
  }
  return Image(static_cast<int>(img.width), static_cast<int>(img.height), std::move(buf));
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  std::vector<std::uint8_t> buf;
  int width = 0, height = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw ContractError(std::string("JPEG decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  buf.resize(static_cast<std::size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buf.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return Image(width, height, std::move(buf));
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open image " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Image decode_image(std::span<const std::uint8_t> bytes) {
  switch (sniff_format(bytes)) {
    case ImageFormat::png:
      return decode_png(bytes);
    case ImageFormat::jpeg:
      return decode_jpeg(bytes);
    case ImageFormat::unknown:
      break;
  }
  throw ContractError("unsupported image format (expected PNG or JPEG)");
}

Image load_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_bytes(path));
  } catch (const ContractError& e) {
    throw ContractError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  png_image p;
  std::memset(&p, 0, sizeof p);
  p.version = PNG_IMAGE_VERSION;
  p.width = static_cast<png_uint_32>(img.width());
  p.height = static_cast<png_uint_32>(img.height());
  p.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  const auto* data = img.pixels().data();
  if (!png_image_write_to_memory(&p, nullptr, &size, 0, data, 0, nullptr)) {
    throw ContractError(std::string("PNG encode failed: ") + p.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&p, out.data(), &size, 0, data, 0, nullptr)) {
    throw ContractError(std::string("PNG encode failed: ") + p.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

SrgbColor sample_pixel(const Image& img, int x, int y, int patch_size) {
  if (patch_size < 1 || patch_size % 2 == 0) {
    throw InputDomainError("patch size must be a positive odd number");
  }
  if (patch_size == 1) return img.at(x, y);
  if (!img.contains(x, y)) return img.at(x, y);  // throws
  const int half = patch_size / 2;
  std::vector<std::uint8_t> r, g, b;
  for (int yy = std::max(0, y - half); yy <= std::min(img.height() - 1, y + half); ++yy) {
    for (int xx = std::max(0, x - half); xx <= std::min(img.width() - 1, x + half); ++xx) {
      const auto c = img.at(xx, yy);
      r.push_back(c.r);
      g.push_back(c.g);
      b.push_back(c.b);
    }
  }
  // Lower median when clipping leaves an even count.
  auto med = [](std::vector<std::uint8_t>& v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
  };
  return {med(r), med(g), med(b)};
}

}  // namespace coco
