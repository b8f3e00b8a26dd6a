#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coco/color.hpp"

namespace coco {

// Decoded 8-bit RGB raster, row-major, 3 bytes per pixel.
class Image {
 public:
  Image() = default;
  Image(int width, int height);
  Image(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  SrgbColor at(int x, int y) const;
  void set(int x, int y, SrgbColor c);
  std::span<const std::uint8_t> pixels() const { return rgb_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> rgb_;
};

enum class ImageFormat { png, jpeg, unknown };

ImageFormat sniff_format(std::span<const std::uint8_t> bytes);
std::string mime_type(ImageFormat f);

// PNG (any bit depth/color type, converted to 8-bit RGB) and baseline JPEG.
// Throws ContractError on undecodable input.
Image decode_image(std::span<const std::uint8_t> bytes);
Image load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Image& img);
void write_png(const std::filesystem::path& path, const Image& img);

// Color at a pick. patch_size 1 reads exactly one pixel; an odd patch_size
// k > 1 takes the per-channel median of the k x k window clipped to the image.
SrgbColor sample_pixel(const Image& img, int x, int y, int patch_size = 1);

}  // namespace coco
