#include "facet/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "facet/rng.hpp"
#include "json.hpp"

namespace facet {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string scalar_to_string(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// VIA 1.x keys regions "0","1",...,"10": order numerically, not lexically.
bool region_key_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) {
    bool a_num = !a.empty() && a.find_first_not_of("0123456789") == std::string::npos;
    bool b_num = !b.empty() && b.find_first_not_of("0123456789") == std::string::npos;
    if (a_num && b_num) return a.size() < b.size();
  }
  return a < b;
}

void parse_region(const ordered_json& rj, const std::string& where, Region& out,
                  std::vector<std::string>& violations) {
  if (!rj.is_object() || !rj.contains("shape_attributes")) {
    violations.push_back(where + ": missing shape_attributes");
    return;
  }
  const auto& shape = rj["shape_attributes"];
  std::string name = shape.value("name", std::string());
  if (name != "polygon" && name != "polyline") {
    violations.push_back(where + ": unsupported shape type '" + name + "'");
    return;
  }
  if (!shape.contains("all_points_x") || !shape.contains("all_points_y")) {
    violations.push_back(where + ": missing all_points_x/all_points_y");
    return;
  }
  const auto& xs = shape["all_points_x"];
  const auto& ys = shape["all_points_y"];
  if (!xs.is_array() || !ys.is_array() || xs.size() != ys.size()) {
    violations.push_back(where + ": all_points_x/all_points_y length mismatch");
    return;
  }
  if (xs.size() < 3) {
    violations.push_back(where + ": polygon has fewer than 3 points");
    return;
  }
  out.polygon.points.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i].is_number() || !ys[i].is_number()) {
      violations.push_back(where + ": non-numeric coordinate at point " + std::to_string(i));
      return;
    }
    Point p{xs[i].get<double>(), ys[i].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      violations.push_back(where + ": non-finite coordinate at point " + std::to_string(i));
      return;
    }
    out.polygon.points.push_back(p);
  }
  if (rj.contains("region_attributes") && rj["region_attributes"].is_object()) {
    for (auto it = rj["region_attributes"].begin(); it != rj["region_attributes"].end(); ++it) {
      out.attributes[it.key()] = scalar_to_string(it.value());
    }
  }
}

void parse_image_entry(const std::string& key, const ordered_json& entry, Dataset& d,
                       std::vector<std::string>& violations) {
  if (!entry.is_object()) {
    violations.push_back(key + ": entry is not an object");
    return;
  }
  ImageRecord rec;
  rec.filename = entry.value("filename", key);
  if (entry.contains("size") && entry["size"].is_number()) {
    rec.file_size = entry["size"].get<std::uint64_t>();
  }
  if (entry.contains("file_attributes") && entry["file_attributes"].is_object()) {
    const auto& fa = entry["file_attributes"];
    if (fa.contains("width") && fa["width"].is_number()) rec.width = fa["width"].get<int>();
    if (fa.contains("height") && fa["height"].is_number()) rec.height = fa["height"].get<int>();
  }
  if (entry.contains("regions")) {
    const auto& regions = entry["regions"];
    if (regions.is_array()) {
      for (std::size_t i = 0; i < regions.size(); ++i) {
        Region r;
        std::size_t before = violations.size();
        parse_region(regions[i], rec.filename + "/regions/" + std::to_string(i), r, violations);
        if (violations.size() == before) rec.regions.push_back(std::move(r));
      }
    } else if (regions.is_object()) {
      std::vector<std::string> keys;
      for (auto it = regions.begin(); it != regions.end(); ++it) keys.push_back(it.key());
      std::sort(keys.begin(), keys.end(), region_key_less);
      for (const auto& rk : keys) {
        Region r;
        std::size_t before = violations.size();
        parse_region(regions[rk], rec.filename + "/regions/" + rk, r, violations);
        if (violations.size() == before) rec.regions.push_back(std::move(r));
      }
    } else if (!regions.is_null()) {
      violations.push_back(rec.filename + ": regions is neither an object nor an array");
    }
  }
  d.images.push_back(std::move(rec));
}

std::string join_violations(const std::vector<std::string>& v) {
  std::string msg = "annotation document invalid (" + std::to_string(v.size()) + " problem(s)):";
  for (const auto& s : v) msg += "\n  " + s;
  return msg;
}

std::uint32_t be32(std::span<const unsigned char> b, std::size_t off) {
  return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
         (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

std::uint16_t be16(std::span<const unsigned char> b, std::size_t off) {
  return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}

std::size_t clamp_record(ImageRecord& img) {
  std::size_t clamped = 0;
  const double w = img.width;
  const double h = img.height;
  for (auto& region : img.regions) {
    for (auto& p : region.polygon.points) {
      double cx = std::min(std::max(p.x, 0.0), w);
      double cy = std::min(std::max(p.y, 0.0), h);
      if (cx != p.x || cy != p.y) {
        ++clamped;
        p.x = cx;
        p.y = cy;
      }
    }
  }
  return clamped;
}

}  // namespace

Dataset parse_via(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top-level JSON value must be an object");

  const ordered_json* root = &doc;
  if (doc.contains("_via_img_metadata") && doc["_via_img_metadata"].is_object()) {
    root = &doc["_via_img_metadata"];
  }

  Dataset d;
  std::vector<std::string> violations;
  for (auto it = root->begin(); it != root->end(); ++it) {
    if (it.key() == "_via_settings" || it.key() == "_via_attributes" ||
        it.key() == "_via_data_format_version") {
      continue;
    }
    parse_image_entry(it.key(), it.value(), d, violations);
  }

  std::set<std::string> seen;
  for (const auto& img : d.images) {
    if (!seen.insert(img.filename).second) {
      violations.push_back(img.filename + ": duplicate filename");
    }
  }
  if (!violations.empty()) throw ParseError(join_violations(violations), violations);
  return d;
}

std::string write_via(const Dataset& d) {
  ordered_json root = ordered_json::object();
  for (const auto& img : d.images) {
    ordered_json entry;
    entry["filename"] = img.filename;
    entry["size"] = img.file_size;
    ordered_json regions = ordered_json::array();
    for (const auto& region : img.regions) {
      ordered_json shape;
      shape["name"] = "polygon";
      ordered_json xs = ordered_json::array();
      ordered_json ys = ordered_json::array();
      for (const auto& p : region.polygon.points) {
        xs.push_back(p.x);
        ys.push_back(p.y);
      }
      shape["all_points_x"] = std::move(xs);
      shape["all_points_y"] = std::move(ys);
      ordered_json rj;
      rj["shape_attributes"] = std::move(shape);
      rj["region_attributes"] = ordered_json::object();
      for (const auto& [k, v] : region.attributes) rj["region_attributes"][k] = v;
      regions.push_back(std::move(rj));
    }
    entry["regions"] = std::move(regions);
    entry["file_attributes"] = ordered_json::object();
    if (img.width > 0 && img.height > 0) {
      entry["file_attributes"]["width"] = img.width;
      entry["file_attributes"]["height"] = img.height;
    }
    root[img.filename + std::to_string(img.file_size)] = std::move(entry);
  }
  return root.dump(2);
}

std::pair<int, int> sniff_dimensions(std::span<const unsigned char> bytes) {
  static const unsigned char kPngMagic[8] = {137, 'P', 'N', 'G', '\r', '\n', 26, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    if (bytes.size() < 24) throw ParseError("truncated PNG header");
    if (!(bytes[12] == 'I' && bytes[13] == 'H' && bytes[14] == 'D' && bytes[15] == 'R')) {
      throw ParseError("PNG file does not start with IHDR");
    }
    int w = static_cast<int>(be32(bytes, 16));
    int h = static_cast<int>(be32(bytes, 20));
    if (w <= 0 || h <= 0) throw ParseError("PNG header declares non-positive dimensions");
    return {w, h};
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    std::size_t pos = 2;
    while (pos + 4 <= bytes.size()) {
      if (bytes[pos] != 0xFF) {
        ++pos;
        continue;
      }
      unsigned char marker = bytes[pos + 1];
      if (marker == 0xFF) {
        ++pos;
        continue;
      }
      if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD9)) {
        pos += 2;  // standalone marker, no length field
        continue;
      }
      if (marker == 0xDA) break;  // entropy-coded data starts, no SOF seen
      std::uint16_t seg_len = be16(bytes, pos + 2);
      if (seg_len < 2) throw ParseError("corrupt JPEG segment length");
      if (marker == 0xC0 || marker == 0xC2) {
        if (pos + 9 > bytes.size()) throw ParseError("truncated JPEG SOF segment");
        int h = be16(bytes, pos + 5);
        int w = be16(bytes, pos + 7);
        if (w <= 0 || h <= 0) throw ParseError("JPEG SOF declares non-positive dimensions");
        return {w, h};
      }
      pos += 2 + seg_len;
    }
    throw ParseError("truncated JPEG header: no SOF0/SOF2 segment found");
  }
  throw ParseError("unknown image format (magic bytes not PNG or JPEG)");
}

ResolveReport resolve_dimensions(Dataset& d, const std::filesystem::path& image_dir) {
  ResolveReport report;
  std::vector<std::string> violations;
  for (auto& img : d.images) {
    std::filesystem::path path = image_dir / img.filename;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      violations.push_back("missing file: " + path.string());
      continue;
    }
    std::vector<unsigned char> head(256 * 1024);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    try {
      auto [w, h] = sniff_dimensions(head);
      img.width = w;
      img.height = h;
    } catch (const ParseError& e) {
      violations.push_back(path.string() + ": " + e.what());
      continue;
    }
    report.clamped_vertices += clamp_record(img);
  }
  if (!violations.empty()) throw ParseError(join_violations(violations), violations);
  return report;
}

ResolveReport apply_dimension_manifest(Dataset& d, const std::string& csv_text) {
  std::map<std::string, std::pair<int, int>> dims;
  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("filename,", 0) == 0) continue;  // header
    std::istringstream row(line);
    std::string name, ws, hs;
    if (!std::getline(row, name, ',') || !std::getline(row, ws, ',') || !std::getline(row, hs)) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected filename,width,height");
    }
    int w = 0, h = 0;
    try {
      w = std::stoi(ws);
      h = std::stoi(hs);
    } catch (const std::exception&) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": non-numeric dimension");
    }
    if (w <= 0 || h <= 0) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": non-positive dimension");
    }
    dims[name] = {w, h};
  }

  ResolveReport report;
  std::vector<std::string> violations;
  for (auto& img : d.images) {
    auto it = dims.find(img.filename);
    if (it == dims.end()) {
      violations.push_back("manifest has no entry for " + img.filename);
      continue;
    }
    img.width = it->second.first;
    img.height = it->second.second;
    report.clamped_vertices += clamp_record(img);
  }
  if (!violations.empty()) throw ParseError(join_violations(violations), violations);
  return report;
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.class_names = d.class_names;
  out.images.reserve(indices.size());
  for (std::size_t i : indices) out.images.push_back(d.images.at(i));
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must be in (0, 1)");
  }
  std::size_t n = d.images.size();
  if (n == 0) throw std::invalid_argument("cannot split an empty dataset");
  if (n < 2) throw std::invalid_argument("need at least 2 images to keep both sides non-empty");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  fisher_yates_shuffle(order, rng);

  auto n_train_target = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n)));
  std::size_t n_val = std::max<std::size_t>(1, n - n_train_target);
  std::size_t n_train = n - n_val;
  if (n_train == 0) {
    n_train = 1;
    n_val = n - 1;
  }

  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {subset(d, train_idx), subset(d, val_idx)};
}

FoldSet kfold(const Dataset& d, int k, std::uint64_t seed) {
  std::size_t n = d.images.size();
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("k must satisfy 2 <= k <= n_images");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  fisher_yates_shuffle(order, rng);

  FoldSet fs;
  fs.seed = seed;
  fs.k = k;
  std::size_t base = n / static_cast<std::size_t>(k);
  std::size_t rem = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
    Fold fold;
    fold.val.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(fold.val.begin(), fold.val.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::binary_search(fold.val.begin(), fold.val.end(), i)) fold.train.push_back(i);
    }
    fs.folds.push_back(std::move(fold));
    pos += size;
  }
  return fs;
}

DatasetStats stats(const Dataset& d) {
  DatasetStats s;
  s.n_images = d.images.size();
  for (const auto& img : d.images) {
    s.n_instances += img.regions.size();
    s.histogram[img.regions.size()] += 1;
  }
  s.mean_instances_per_image =
      s.n_images == 0 ? 0.0
                      : static_cast<double>(s.n_instances) / static_cast<double>(s.n_images);
  return s;
}

}  // namespace facet
