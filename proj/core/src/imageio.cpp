#include "mcv/imageio.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <unordered_map>

namespace mcv {

ImageBuffer::ImageBuffer(Lattice lat, int bands_, int max_value_)
    : lattice(lat),
      bands(bands_),
      samples(lat.size() * static_cast<std::size_t>(bands_), 0.0),
      max_value(max_value_) {
  if (bands_ < 1) throw DomainError("image must have at least one band");
}

LabelImage::LabelImage(Lattice lat, std::vector<Label> values)
    : lattice(lat), labels(std::move(values)) {
  if (labels.size() != lattice.size()) throw DomainError("label count does not match lattice");
}

namespace {

class PnmReader {
 public:
  explicit PnmReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("pnm: " + what, pos_); }

  void skip_space_and_comments() {
    while (!at_end()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (!at_end() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (is_space(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t read_uint(const char* what) {
    skip_space_and_comments();
    if (at_end()) fail(std::string("unexpected end of data reading ") + what);
    if (bytes_[pos_] < '0' || bytes_[pos_] > '9') fail(std::string("expected ") + what);
    std::uint64_t value = 0;
    while (!at_end() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
      if (value > std::numeric_limits<std::uint32_t>::max()) fail(std::string(what) + " too large");
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from a binary raster.
  void single_space() {
    if (at_end() || !is_space(bytes_[pos_])) fail("expected whitespace after maxval");
    ++pos_;
  }

  unsigned read_binary_sample(bool wide) {
    const std::size_t need = wide ? 2 : 1;
    if (bytes_.size() - pos_ < need) fail("truncated raster");
    unsigned v = static_cast<unsigned char>(bytes_[pos_]);
    if (wide) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + 1]);
    pos_ += need;
    return v;
  }

  char next() { return bytes_[pos_++]; }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void append_u16be(std::string& out, unsigned v) {
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

ImageBuffer load_pnm(std::string_view bytes) {
  PnmReader in(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P') in.fail("missing magic number");
  in.next();
  const char kind = in.next();
  bool binary = false;
  int bands = 1;
  switch (kind) {
    case '2': break;
    case '3': bands = 3; break;
    case '5': binary = true; break;
    case '6': binary = true; bands = 3; break;
    default: in.fail(std::string("unsupported format P") + kind);
  }

  const auto width = in.read_uint("width");
  const auto height = in.read_uint("height");
  if (width == 0 || height == 0) in.fail("zero image dimension");
  const std::size_t maxval_at = in.pos();
  const auto maxval = in.read_uint("maxval");
  if (maxval < 1 || maxval > 65535) throw ParseError("pnm: maxval outside [1, 65535]", maxval_at);

  ImageBuffer image(Lattice(static_cast<int>(width), static_cast<int>(height)), bands,
                    static_cast<int>(maxval));
  if (binary) {
    in.single_space();
    const bool wide = maxval > 255;
    for (double& s : image.samples) {
      const std::size_t at = in.pos();
      const unsigned v = in.read_binary_sample(wide);
      if (v > maxval) throw ParseError("pnm: sample exceeds maxval", at);
      s = static_cast<double>(v);
    }
  } else {
    for (double& s : image.samples) {
      const std::uint64_t v = in.read_uint("sample");
      if (v > maxval) in.fail("sample exceeds maxval");
      s = static_cast<double>(v);
    }
  }
  return image;
}

std::string save_pnm(const ImageBuffer& image, PnmEncoding encoding) {
  if (image.bands != 1 && image.bands != 3)
    throw DomainError("PNM supports 1 or 3 bands, got " + std::to_string(image.bands));
  if (image.max_value < 1 || image.max_value > 65535)
    throw DomainError("PNM maxval must be in [1, 65535]");
  if (image.samples.size() != image.lattice.size() * static_cast<std::size_t>(image.bands))
    throw DomainError("sample count does not match lattice");

  const bool ascii = encoding == PnmEncoding::ascii;
  const char kind = image.bands == 1 ? (ascii ? '2' : '5') : (ascii ? '3' : '6');
  std::string out = std::string("P") + kind + "\n" + std::to_string(image.lattice.width()) + " " +
                    std::to_string(image.lattice.height()) + "\n" +
                    std::to_string(image.max_value) + "\n";
  const bool wide = image.max_value > 255;
  const std::size_t per_row = static_cast<std::size_t>(image.lattice.width()) *
                              static_cast<std::size_t>(image.bands);
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    const double s = image.samples[i];
    if (!(s >= 0.0 && s <= image.max_value) || s != std::floor(s))
      throw DomainError("sample " + std::to_string(i) + " is not an integer in [0, maxval]");
    const auto v = static_cast<unsigned>(s);
    if (ascii) {
      out += std::to_string(v);
      out.push_back((i + 1) % per_row == 0 ? '\n' : ' ');
    } else if (wide) {
      append_u16be(out, v);
    } else {
      out.push_back(static_cast<char>(v));
    }
  }
  return out;
}

std::string save_labels(const LabelImage& labels, LabelFormat format) {
  const Lattice& lat = labels.lattice;
  std::string out;
  if (format == LabelFormat::pgm16) {
    for (Label l : labels.labels)
      if (l > 65535) throw CapacityError("label " + std::to_string(l) + " does not fit pgm16");
    out = "P5\n" + std::to_string(lat.width()) + " " + std::to_string(lat.height()) + "\n65535\n";
    out.reserve(out.size() + 2 * labels.labels.size());
    for (Label l : labels.labels) append_u16be(out, l);
    return out;
  }
  const auto w = static_cast<std::size_t>(lat.width());
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    out += std::to_string(labels.labels[i]);
    out.push_back((i + 1) % w == 0 ? '\n' : ',');
  }
  return out;
}

namespace {

LabelImage load_label_csv(std::string_view bytes) {
  std::vector<Label> values;
  std::size_t width = 0;
  std::size_t row_count = 0;
  std::size_t in_row = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> void { throw ParseError("csv: " + what, pos); };

  while (pos < bytes.size()) {
    if (bytes[pos] < '0' || bytes[pos] > '9') fail("expected label");
    std::uint64_t v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + static_cast<std::uint64_t>(bytes[pos] - '0');
      if (v > std::numeric_limits<Label>::max()) fail("label out of range");
      ++pos;
    }
    values.push_back(static_cast<Label>(v));
    ++in_row;
    if (pos < bytes.size() && bytes[pos] == '\r') ++pos;
    if (pos >= bytes.size() || bytes[pos] == '\n') {
      if (row_count == 0) width = in_row;
      else if (in_row != width) fail("ragged row");
      ++row_count;
      in_row = 0;
      if (pos < bytes.size()) ++pos;
    } else if (bytes[pos] == ',') {
      ++pos;
    } else {
      fail("expected ',' or newline");
    }
  }
  if (row_count == 0) fail("empty label file");
  return LabelImage(Lattice(static_cast<int>(width), static_cast<int>(row_count)),
                    std::move(values));
}

}  // namespace

LabelImage load_labels(std::string_view bytes) {
  if (!bytes.empty() && bytes[0] == 'P') {
    const ImageBuffer image = load_pnm(bytes);
    if (image.bands != 1) throw ParseError("pnm: label maps must be single-band", 0);
    std::vector<Label> values(image.samples.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<Label>(image.samples[i]);
    return LabelImage(image.lattice, std::move(values));
  }
  return load_label_csv(bytes);
}

ImageBuffer colorize(const LabelImage& labels, std::uint64_t seed) {
  // Rank labels by first raster occurrence, then push ranks through an affine
  // bijection of Z/2^24 (odd multiplier) to get well-spread, distinct colours.
  constexpr std::uint64_t kMask = (1u << 24) - 1;
  const std::uint64_t mul = (splitmix64(seed) | 1u) & kMask;
  const std::uint64_t add = splitmix64(seed ^ 0xC0105EEDULL) & kMask;

  std::unordered_map<Label, std::uint64_t> rank;
  ImageBuffer out(labels.lattice, 3, 255);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const auto [it, inserted] = rank.try_emplace(labels.labels[i], rank.size());
    const std::uint64_t c = (it->second * mul + add) & kMask;
    out.samples[3 * i + 0] = static_cast<double>((c >> 16) & 0xFF);
    out.samples[3 * i + 1] = static_cast<double>((c >> 8) & 0xFF);
    out.samples[3 * i + 2] = static_cast<double>(c & 0xFF);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace mcv
