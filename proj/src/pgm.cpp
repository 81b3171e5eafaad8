#include "hgr/pgm.hpp"

#include <fstream>
#include <string>

namespace hgr {

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

long parse_positive(const std::string& tok, const std::string& what,
                    const std::filesystem::path& path) {
  try {
    const long v = std::stol(tok);
    require(v > 0, "");
    return v;
  } catch (...) {
    throw Error("pgm: invalid " + what + " in " + path.string());
  }
}

struct Header {
  std::string magic;
  Index width, height;
  long maxval = 0;  // unused for P4
};

Header read_header(std::istream& in, const std::filesystem::path& path) {
  Header h;
  h.magic = next_token(in);
  h.width = parse_positive(next_token(in), "width", path);
  h.height = parse_positive(next_token(in), "height", path);
  if (h.magic != "P4") {
    h.maxval = parse_positive(next_token(in), "maxval", path);
    require(h.maxval <= 65535, "pgm: maxval too large in " + path.string());
  }
  // the single whitespace byte after the header was already consumed by next_token
  return h;
}

}  // namespace

DepthMap read_depth_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("pgm: cannot open " + path.string());
  const Header h = read_header(in, path);
  if (h.magic != "P5") throw Error("pgm: expected P5 depth map in " + path.string());

  DepthMap d(h.height, h.width);
  const std::size_t n = d.values.size();
  if (h.maxval > 255) {
    std::vector<unsigned char> raw(n * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw Error("pgm: truncated pixel data in " + path.string());
    for (std::size_t i = 0; i < n; ++i)
      d.values[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  } else {
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw Error("pgm: truncated pixel data in " + path.string());
    for (std::size_t i = 0; i < n; ++i) d.values[i] = raw[i];
  }
  return d;
}

void write_depth_pgm(const std::filesystem::path& path, const DepthMap& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("pgm: cannot write " + path.string());
  out << "P5\n" << depth.width << " " << depth.height << "\n65535\n";
  std::vector<unsigned char> raw(depth.values.size() * 2);
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(depth.values[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(depth.values[i] & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("pgm: failed writing " + path.string());
}

BinaryMask read_mask(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("pgm: cannot open " + path.string());
  const Header h = read_header(in, path);

  BinaryMask m(h.height, h.width);
  if (h.magic == "P5") {
    require(h.maxval <= 255, "pgm: mask maxval must be <= 255 in " + path.string());
    std::vector<unsigned char> raw(m.values.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw Error("pgm: truncated pixel data in " + path.string());
    for (std::size_t i = 0; i < raw.size(); ++i) m.values[i] = raw[i] ? 1 : 0;
  } else if (h.magic == "P4") {
    const Index row_bytes = (h.width + 7) / 8;
    std::vector<unsigned char> raw(static_cast<std::size_t>(row_bytes * h.height));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw Error("pgm: truncated pixel data in " + path.string());
    for (Index y = 0; y < h.height; ++y)
      for (Index x = 0; x < h.width; ++x) {
        const unsigned char byte = raw[static_cast<std::size_t>(y * row_bytes + x / 8)];
        m.at(y, x) = (byte >> (7 - x % 8)) & 1;  // P4: 1 = black = foreground
      }
  } else {
    throw Error("pgm: expected P5 or P4 mask in " + path.string());
  }
  return m;
}

void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("pgm: cannot write " + path.string());
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<unsigned char> raw(mask.values.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = mask.values[i] ? 255 : 0;
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("pgm: failed writing " + path.string());
}

void write_mask_pbm(const std::filesystem::path& path, const BinaryMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("pgm: cannot write " + path.string());
  out << "P4\n" << mask.width << " " << mask.height << "\n";
  const Index row_bytes = (mask.width + 7) / 8;
  std::vector<unsigned char> raw(static_cast<std::size_t>(row_bytes * mask.height), 0);
  for (Index y = 0; y < mask.height; ++y)
    for (Index x = 0; x < mask.width; ++x)
      if (mask.at(y, x))
        raw[static_cast<std::size_t>(y * row_bytes + x / 8)] |=
            static_cast<unsigned char>(0x80u >> (x % 8));
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("pgm: failed writing " + path.string());
}

}  // namespace hgr
