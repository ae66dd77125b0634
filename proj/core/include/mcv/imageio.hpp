#pragma once

// PNM ingestion/emission and label-map serialization.
//
// Samples are stored row-major with bands interleaved:
//   samples[(row - 1) * width * bands + (col - 1) * bands + band].

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcv/geometry.hpp"

namespace mcv {

using Label = std::uint32_t;

struct ImageBuffer {
  Lattice lattice;
  int bands = 1;
  std::vector<double> samples;
  int max_value = 255;

  ImageBuffer() = default;
  ImageBuffer(Lattice lat, int bands, int max_value);

  std::span<const double> pixel(Pixel p) const {
    return {samples.data() + lattice.index(p) * static_cast<std::size_t>(bands),
            static_cast<std::size_t>(bands)};
  }
  std::span<double> pixel(Pixel p) {
    return {samples.data() + lattice.index(p) * static_cast<std::size_t>(bands),
            static_cast<std::size_t>(bands)};
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

struct LabelImage {
  Lattice lattice;
  std::vector<Label> labels;

  LabelImage() = default;
  explicit LabelImage(Lattice lat, Label fill = 0) : lattice(lat), labels(lat.size(), fill) {}
  LabelImage(Lattice lat, std::vector<Label> values);

  Label at(Pixel p) const { return labels[lattice.index(p)]; }

  friend bool operator==(const LabelImage&, const LabelImage&) = default;
};

enum class PnmEncoding { ascii, binary };
enum class LabelFormat { pgm16, csv };

/// Decodes P2/P3/P5/P6. Binary payloads with maxval > 255 are 16-bit big-endian.
ImageBuffer load_pnm(std::string_view bytes);

/// Emits P2/P5 (bands == 1) or P3/P6 (bands == 3). Samples must be integral
/// and within [0, max_value].
std::string save_pnm(const ImageBuffer& image, PnmEncoding encoding = PnmEncoding::binary);

/// pgm16: binary PGM, maxval 65535. csv: one line per lattice row, LF endings.
/// Throws CapacityError when a label does not fit pgm16.
std::string save_labels(const LabelImage& labels, LabelFormat format);

/// Accepts anything save_labels emits, plus any PGM (sample values become labels).
LabelImage load_labels(std::string_view bytes);

/// Distinct labels map to distinct RGB triples (up to 2^24 labels); stable per seed.
ImageBuffer colorize(const LabelImage& labels, std::uint64_t seed);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mcv
