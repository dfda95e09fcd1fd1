#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facet/errors.hpp"

namespace facet {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

// Closed polygon, vertices in drawing order, >= 3 vertices, finite coords.
struct Polygon {
  std::vector<Point> points;
};

inline bool operator==(const Polygon& a, const Polygon& b) { return a.points == b.points; }

struct Region {
  Polygon polygon;
  std::map<std::string, std::string> attributes;

  // Class label; annotation tools leave it blank for single-class sets.
  std::string class_name() const {
    auto it = attributes.find("class");
    return it == attributes.end() ? std::string("window") : it->second;
  }
};

inline bool operator==(const Region& a, const Region& b) {
  return a.polygon == b.polygon && a.attributes == b.attributes;
}

struct ImageRecord {
  std::string filename;
  std::uint64_t file_size = 0;
  int width = 0;   // 0 until resolved
  int height = 0;  // 0 until resolved
  std::vector<Region> regions;
};

inline bool operator==(const ImageRecord& a, const ImageRecord& b) {
  return a.filename == b.filename && a.file_size == b.file_size && a.width == b.width &&
         a.height == b.height && a.regions == b.regions;
}

struct Dataset {
  std::vector<ImageRecord> images;
  std::vector<std::string> class_names{"window"};
};

inline bool operator==(const Dataset& a, const Dataset& b) {
  return a.images == b.images && a.class_names == b.class_names;
}

struct DatasetStats {
  std::size_t n_images = 0;
  std::size_t n_instances = 0;
  double mean_instances_per_image = 0.0;
  // instance count per image -> number of images with that count
  std::map<std::size_t, std::size_t> histogram;
};

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

struct FoldSet {
  std::uint64_t seed = 0;
  int k = 0;
  std::vector<Fold> folds;
};

// VIA-style polygon annotation document. Accepts both the 1.x layout
// (regions as an index-keyed object) and the 2.x layout (regions as an
// array), plus project files that nest entries under _via_img_metadata.
// Image dimensions stay 0 until resolve_dimensions/apply_dimension_manifest.
Dataset parse_via(const std::string& text);

// Inverse of parse_via up to float formatting. Regions are written in the
// 2.x array form; resolved dimensions ride along in file_attributes.
std::string write_via(const Dataset& d);

struct ResolveReport {
  std::size_t clamped_vertices = 0;
};

// Fill width/height by sniffing image headers under image_dir, then clamp
// out-of-bounds vertices to the canvas. Missing or undecodable files raise
// ParseError listing every offender.
ResolveReport resolve_dimensions(Dataset& d, const std::filesystem::path& image_dir);

// Same contract, but dimensions come from a "filename,width,height" CSV.
ResolveReport apply_dimension_manifest(Dataset& d, const std::string& csv_text);

// (width, height) from a PNG or JPEG header prefix. PNG: IHDR big-endian
// words at offsets 16/20. JPEG: first SOF0/SOF2 segment.
std::pair<int, int> sniff_dimensions(std::span<const unsigned char> bytes);

// Deterministic shuffled split. |val| = max(1, n - round(fraction*n)) so
// neither side is ever empty; needs n >= 2.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed);

// k validation folds that partition the image list; sizes differ by <= 1.
FoldSet kfold(const Dataset& d, int k, std::uint64_t seed);

DatasetStats stats(const Dataset& d);

// Subset by image indices (ascending original order is preserved).
Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices);

}  // namespace facet
