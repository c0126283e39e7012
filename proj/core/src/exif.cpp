// Minimal EXIF/TIFF reader: only the handful of tags the FOV estimate needs.

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>

#include "peaktag/metadata.hpp"

namespace peaktag {
namespace {

constexpr std::uint16_t kTagImageWidth = 256;
constexpr std::uint16_t kTagImageLength = 257;
constexpr std::uint16_t kTagMake = 271;
constexpr std::uint16_t kTagModel = 272;
constexpr std::uint16_t kTagExifIfd = 34665;
constexpr std::uint16_t kTagFocalLength = 37386;

constexpr std::uint16_t kTypeShort = 3;
constexpr std::uint16_t kTypeLong = 4;
constexpr std::uint16_t kTypeAscii = 2;
constexpr std::uint16_t kTypeRational = 5;

class TiffReader {
 public:
  explicit TiffReader(std::span<const std::uint8_t> data) : data_(data) {}

  bool init() {
    if (data_.size() < 8) return false;
    if (data_[0] == 'I' && data_[1] == 'I') {
      little_ = true;
    } else if (data_[0] == 'M' && data_[1] == 'M') {
      little_ = false;
    } else {
      return false;
    }
    return u16(2) == 42;
  }

  std::uint32_t first_ifd() const { return u32(4); }

  struct Entry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::size_t value_offset;  // offset of the 4-byte value/offset field
  };

  // Calls fn(entry) for every well-formed entry of the IFD at `offset`.
  template <typename Fn>
  void for_each_entry(std::uint32_t offset, Fn&& fn) const {
    if (!in_range(offset, 2)) return;
    const std::uint16_t n = u16(offset);
    for (std::uint16_t i = 0; i < n; ++i) {
      const std::size_t e = offset + 2 + 12u * i;
      if (!in_range(e, 12)) return;
      fn(Entry{u16(e), u16(e + 2), u32(e + 4), e + 8});
    }
  }

  std::optional<std::uint32_t> integer(const Entry& e) const {
    if (e.count < 1) return std::nullopt;
    if (e.type == kTypeShort) return u16(e.value_offset);
    if (e.type == kTypeLong) return u32(e.value_offset);
    return std::nullopt;
  }

  std::optional<double> rational(const Entry& e) const {
    if (e.type != kTypeRational || e.count < 1) return std::nullopt;
    const std::uint32_t off = u32(e.value_offset);
    if (!in_range(off, 8)) return std::nullopt;
    const std::uint32_t num = u32(off);
    const std::uint32_t den = u32(off + 4);
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / den;
  }

  std::optional<std::string> ascii(const Entry& e) const {
    if (e.type != kTypeAscii) return std::nullopt;
    const std::size_t off = e.count <= 4 ? e.value_offset : u32(e.value_offset);
    if (!in_range(off, e.count)) return std::nullopt;
    std::string s(reinterpret_cast<const char*>(data_.data() + off), e.count);
    const auto nul = s.find('\0');
    if (nul != std::string::npos) s.resize(nul);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  }

 private:
  bool in_range(std::size_t off, std::size_t len) const {
    return off <= data_.size() && len <= data_.size() - off;
  }
  std::uint16_t u16(std::size_t off) const {
    if (!in_range(off, 2)) return 0;
    const std::uint8_t* p = data_.data() + off;
    return little_ ? static_cast<std::uint16_t>(p[0] | (p[1] << 8))
                   : static_cast<std::uint16_t>((p[0] << 8) | p[1]);
  }
  std::uint32_t u32(std::size_t off) const {
    if (!in_range(off, 4)) return 0;
    const std::uint8_t* p = data_.data() + off;
    if (little_) {
      return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
             (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
  }

  std::span<const std::uint8_t> data_;
  bool little_ = true;
};

struct TiffTags {
  ExifTags exif;
  std::optional<std::uint32_t> width;
  std::optional<std::uint32_t> height;
};

std::optional<TiffTags> parse_tiff(std::span<const std::uint8_t> tiff) {
  TiffReader reader(tiff);
  if (!reader.init()) return std::nullopt;
  TiffTags tags;
  std::optional<std::uint32_t> exif_ifd;
  reader.for_each_entry(reader.first_ifd(), [&](const TiffReader::Entry& e) {
    switch (e.tag) {
      case kTagMake: tags.exif.make = reader.ascii(e); break;
      case kTagModel: tags.exif.model = reader.ascii(e); break;
      case kTagExifIfd: exif_ifd = reader.integer(e); break;
      case kTagFocalLength: tags.exif.focal_length_mm = reader.rational(e); break;
      case kTagImageWidth: tags.width = reader.integer(e); break;
      case kTagImageLength: tags.height = reader.integer(e); break;
      default: break;
    }
  });
  if (exif_ifd) {
    reader.for_each_entry(*exif_ifd, [&](const TiffReader::Entry& e) {
      if (e.tag == kTagFocalLength) tags.exif.focal_length_mm = reader.rational(e);
    });
  }
  return tags;
}

std::optional<std::span<const std::uint8_t>> jpeg_exif_payload(
    std::span<const std::uint8_t> b) {
  std::size_t pos = 2;
  while (pos + 4 <= b.size()) {
    if (b[pos] != 0xFF) return std::nullopt;
    const std::uint8_t marker = b[pos + 1];
    if (marker == 0xD8 || (marker >= 0xD0 && marker <= 0xD7) || marker == 0x01) {
      pos += 2;
      continue;
    }
    if (marker == 0xDA || marker == 0xD9) return std::nullopt;  // scan data or EOI
    const std::size_t len = (static_cast<std::size_t>(b[pos + 2]) << 8) | b[pos + 3];
    if (len < 2 || pos + 2 + len > b.size()) return std::nullopt;
    if (marker == 0xE1 && len >= 8 && std::memcmp(&b[pos + 4], "Exif\0\0", 6) == 0) {
      return b.subspan(pos + 10, len - 8);
    }
    pos += 2 + len;
  }
  return std::nullopt;
}

std::optional<std::span<const std::uint8_t>> png_exif_payload(
    std::span<const std::uint8_t> b) {
  std::size_t pos = 8;
  while (pos + 12 <= b.size()) {
    const std::size_t len = (static_cast<std::size_t>(b[pos]) << 24) |
                            (static_cast<std::size_t>(b[pos + 1]) << 16) |
                            (static_cast<std::size_t>(b[pos + 2]) << 8) | b[pos + 3];
    if (pos + 12 + len > b.size()) return std::nullopt;
    if (std::memcmp(&b[pos + 4], "eXIf", 4) == 0) return b.subspan(pos + 8, len);
    if (std::memcmp(&b[pos + 4], "IEND", 4) == 0) return std::nullopt;
    pos += 12 + len;
  }
  return std::nullopt;
}

}  // namespace

std::optional<ExifTags> read_exif(std::span<const std::uint8_t> bytes) {
  std::optional<std::span<const std::uint8_t>> payload;
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    payload = jpeg_exif_payload(bytes);
  } else if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P') {
    payload = png_exif_payload(bytes);
  } else {
    payload = bytes;
  }
  if (!payload) return std::nullopt;
  auto tags = parse_tiff(*payload);
  if (!tags) return std::nullopt;
  return tags->exif;
}

namespace detail {

// Pixel size recorded in a bare TIFF container, used when no raster decoder
// applies.
std::optional<std::pair<int, int>> tiff_dimensions(std::span<const std::uint8_t> bytes) {
  auto tags = parse_tiff(bytes);
  if (!tags || !tags->width || !tags->height) return std::nullopt;
  return std::make_pair(static_cast<int>(*tags->width), static_cast<int>(*tags->height));
}

}  // namespace detail
}  // namespace peaktag
