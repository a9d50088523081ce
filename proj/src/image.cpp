#include "seedo/image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include <openssl/evp.h>

#include "seedo/error.hpp"

namespace seedo {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(ErrorKind::EmptyImage, "negative image dimensions");
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {data_[o], data_[o + 1], data_[o + 2]};
}

void Image::set(int x, int y, Rgb color) {
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  data_[o] = color[0];
  data_[o + 1] = color[1];
  data_[o + 2] = color[2];
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

// libpng reports errors by longjmp; the message is stashed here and turned
// into an exception once control is back in C++ frames.
struct PngErrorState {
  char message[256] = "unknown libpng error";
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", msg);
  png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

// Returns false on libpng failure.
bool encode(const Image& image, png_structp png, png_infop info) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto* base = image.bytes().data();
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(base + static_cast<std::size_t>(y) * image.width() * 3));
  }
  png_write_end(png, nullptr);
  return true;
}

bool read_header(png_structp png, png_infop info, std::FILE* file, png_uint_32* width, png_uint_32* height) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_read_info(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  *width = png_get_image_width(png, info);
  *height = png_get_image_height(png, info);
  return true;
}

bool read_rows(png_structp png, std::uint8_t* base, int width, int height) {
  if (setjmp(png_jmpbuf(png))) return false;
  for (int y = 0; y < height; ++y) {
    png_read_row(png, base + static_cast<std::size_t>(y) * width * 3, nullptr);
  }
  png_read_end(png, nullptr);
  return true;
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorKind::MissingFile, path.string());

  PngErrorState state;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  png_uint_32 width = 0, height = 0;
  Image image;
  bool ok = read_header(png, info, file.get(), &width, &height);
  if (ok) {
    image = Image(static_cast<int>(width), static_cast<int>(height));
    ok = read_rows(png, image.bytes().data(), image.width(), image.height());
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw Error(ErrorKind::SchemaError, path.string() + ": " + state.message);
  return image;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (image.empty()) throw Error(ErrorKind::EmptyImage, "cannot write an empty image");
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorKind::MissingFile, "cannot open " + path.string() + " for writing");
  PngErrorState state;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, file.get());
  const bool ok = encode(image, png, info);
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error(ErrorKind::SchemaError, path.string() + ": " + state.message);
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.empty()) throw Error(ErrorKind::EmptyImage, "cannot encode an empty image");
  std::vector<std::uint8_t> out;
  PngErrorState state;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  const bool ok = encode(image, png, info);
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error(ErrorKind::SchemaError, std::string("png encode: ") + state.message);
  return out;
}

std::string content_hash(const Image& image) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(image.width()), static_cast<std::uint32_t>(image.height())};
  EVP_DigestUpdate(ctx, dims, sizeof dims);
  EVP_DigestUpdate(ctx, image.bytes().data(), image.bytes().size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace seedo
